#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace cltool {

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename to " + target.string() + " failed: " + ec.message());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (auto& h : header) add(h);
  end_row();
  rows_ = 0;
}

void Csv::sep() {
  if (cell_++ > 0) out_ += ',';
}

Csv& Csv::add(double v) {
  sep();
  out_ += format_double(v);
  return *this;
}

Csv& Csv::add(long long v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

Csv& Csv::add(const std::string& v) {
  sep();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    out_ += v;
    return *this;
  }
  out_ += '"';
  for (char c : v) {
    if (c == '"') out_ += '"';
    out_ += c;
  }
  out_ += '"';
  return *this;
}

void Csv::end_row() {
  if (cell_ != columns_) throw std::logic_error("csv row has " + std::to_string(cell_) + " cells, header has " +
                                               std::to_string(columns_));
  out_ += '\n';
  cell_ = 0;
  ++rows_;
}

nlohmann::ordered_json checks_json(const std::vector<Check>& checks) {
  auto arr = nlohmann::ordered_json::array();
  for (auto& c : checks) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(format_double(c.value));
    j["limit"] = std::isfinite(c.limit) ? nlohmann::ordered_json(c.limit) : nlohmann::ordered_json(format_double(c.limit));
    if (!c.detail.empty()) j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace cltool
