#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace cltool {

inline constexpr const char* kSchemaVersion = "1.0";

// Writes through a temporary file in the same directory, then renames over the target.
void write_atomic(const std::string& path, const std::string& content);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& add(double v);
  Csv& add(long long v);
  Csv& add(int v) { return add(static_cast<long long>(v)); }
  Csv& add(size_t v) { return add(static_cast<long long>(v)); }
  Csv& add(bool v) { return add(static_cast<long long>(v ? 1 : 0)); }
  Csv& add(const std::string& v);
  Csv& add(const char* v) { return add(std::string(v)); }
  void end_row();
  std::string str() const { return out_; }
  size_t rows() const { return rows_; }

 private:
  void sep();
  size_t columns_;
  size_t cell_ = 0;
  size_t rows_ = 0;
  std::string out_;
};

std::string format_double(double v);  // 17 significant digits, nan/inf spelled out

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

nlohmann::ordered_json checks_json(const std::vector<Check>& checks);

}  // namespace cltool
