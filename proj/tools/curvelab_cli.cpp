// Batch driver: runs one command, writes <out>/<command>.json and <out>/<command>.csv.
// Exit codes: 0 ok, 2 configuration, 3 acceptance check failed, 4 numerical health.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "curvelab/curvelab.h"
#include "json.hpp"
#include "report.hpp"

namespace {

using cltool::Check;
using cltool::Csv;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kConfig = 2, kAcceptance = 3, kHealth = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LibError : std::runtime_error {
  int status;
  LibError(int st, const std::string& what) : std::runtime_error(what), status(st) {}
};

void ok(int st, const char* call) {
  if (st != CL_OK) throw LibError(st, std::string(call) + ": " + cl_status_name(st) + ": " + cl_last_error());
}

template <class T, void (*D)(T*)>
struct Del {
  void operator()(T* p) const { D(p); }
};
using Frame = std::unique_ptr<cl_frame, Del<cl_frame, cl_frame_destroy>>;
using Profile = std::unique_ptr<cl_profile, Del<cl_profile, cl_profile_destroy>>;
using Decomp = std::unique_ptr<cl_decomp, Del<cl_decomp, cl_decomp_destroy>>;
using Lattice = std::unique_ptr<cl_lattice, Del<cl_lattice, cl_lattice_destroy>>;
using Estimator = std::unique_ptr<cl_dual_estimator, Del<cl_dual_estimator, cl_dual_estimator_destroy>>;

Frame make_frame(int n, double lambda) {
  cl_frame* f = nullptr;
  ok(cl_frame_create(n, lambda, &f), "frame");
  return Frame(f);
}

Profile make_profile(const std::string& d, int n, double lambda) {
  cl_profile* p = nullptr;
  ok(cl_profile_create(d.c_str(), n, lambda, &p), "profile");
  return Profile(p);
}

Lattice normalized_random_lattice(int n, uint64_t seed) {
  cl_lattice *raw = nullptr, *norm = nullptr;
  ok(cl_lattice_random(n, seed, 20, &raw), "lattice");
  Lattice r(raw);
  ok(cl_lattice_normalize(raw, &norm), "normalize");
  return Lattice(norm);
}

std::vector<std::string> matrix(int n) {
  size_t k = 0;
  ok(cl_profile_matrix_size(n, &k), "matrix");
  std::vector<std::string> out;
  char buf[256];
  for (size_t i = 0; i < k; ++i) {
    ok(cl_profile_matrix_entry(n, i, buf, sizeof buf), "matrix");
    out.emplace_back(buf);
  }
  return out;
}

// ---------------------------------------------------------------- configuration

const std::map<std::string, double> kDefaultTolerances = {
    {"identity", 1e-8},        // |window identity - 1|
    {"c_routes", 1e-9},        // |ln C^-2 by the y-substitution - ln C^-2 by the polar angle|
    {"sandwich", 1e-12},       // slack on [1, sqrt 2]
    {"i2", 1e-8},              // relative
    {"quadrature", 1e-6},      // relative quadrature error budget on T
    {"success_rate", 0.95},    // lattice-demo
    {"sigma_band", 3.0},       // erasure-sim monotonicity band in standard errors
    {"bound_constant", 0.0},   // 0: twice the Gaussian fit of ratio sqrt(n / ln n)
};

struct RunConfig {
  std::string command;
  std::vector<int> dims;
  std::vector<std::string> profiles;
  double lambda = 1.0;
  int kappa = 2;
  uint64_t seed = 1;
  std::string out = "out";
  int jobs = 1;
  std::map<std::string, double> tol = kDefaultTolerances;
  std::map<std::string, double> extra;  // instances, samples, trials, side, weight_floor

  double x(const std::string& k, double fallback) const {
    auto it = extra.find(k);
    return it == extra.end() ? fallback : it->second;
  }
};

const std::vector<std::string> kCommands = {"check-identities", "uncertainty-scan", "obstruction-report",
                                            "lattice-demo", "erasure-sim"};
const std::vector<std::string> kExtraKeys = {"instances", "samples", "trials", "side", "weight_floor", "net_draws"};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty() && std::isfinite(d)) return d;
  } catch (...) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

void set_tolerance(RunConfig& c, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("--tolerance expects KEY=VALUE, got '" + kv + "'");
  std::string key = trim(kv.substr(0, eq));
  if (!kDefaultTolerances.count(key)) throw ConfigError("unknown tolerance '" + key + "'");
  double v = parse_number("tolerance " + key, kv.substr(eq + 1));
  if (v < 0.0) throw ConfigError("tolerance '" + key + "' must be >= 0");
  c.tol[key] = v;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "command") {
    c.command = value;
  } else if (key == "n") {
    c.dims.clear();
    for (auto& s : split(value, ',')) {
      double d = parse_number("n", s);
      if (d != std::floor(d)) throw ConfigError("n must be an integer");
      c.dims.push_back(static_cast<int>(d));
    }
  } else if (key == "profile") {
    c.profiles = split(value, ';');
  } else if (key == "lambda") {
    c.lambda = parse_number(key, value);
  } else if (key == "kappa") {
    c.kappa = static_cast<int>(parse_number(key, value));
  } else if (key == "seed") {
    double d = parse_number(key, value);
    if (d < 0 || d != std::floor(d)) throw ConfigError("seed must be a non-negative integer");
    c.seed = static_cast<uint64_t>(d);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(parse_number(key, value));
  } else if (key.rfind("tolerance.", 0) == 0) {
    set_tolerance(c, key.substr(10) + "=" + value);
  } else if (std::find(kExtraKeys.begin(), kExtraKeys.end(), key) != kExtraKeys.end()) {
    c.extra[key] = parse_number(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void read_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected key = value");
    apply(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void validate(RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw ConfigError("unknown or missing command '" + c.command + "'");
  if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.kappa < 1) throw ConfigError("kappa must be >= 1");
  if (c.dims.empty()) {
    if (c.command == "check-identities") c.dims = {4, 8, 16, 32, 64};
    if (c.command == "uncertainty-scan") c.dims = {16};
    if (c.command == "obstruction-report") c.dims = {16, 32, 64, 128};
    if (c.command == "lattice-demo") c.dims = {3};
    if (c.command == "erasure-sim") c.dims = {2};
  }
  for (int n : c.dims)
    if (n < 2) throw ConfigError("dimensions must be >= 2");
  if (c.command == "lattice-demo" && (c.dims.size() != 1 || c.dims[0] > 3))
    throw ConfigError("lattice-demo takes one dimension n <= 3");
  if (c.command == "erasure-sim" && (c.dims.size() != 1 || c.dims[0] != 2))
    throw ConfigError("erasure-sim runs at n = 2");
  if ((c.command == "uncertainty-scan" || c.command == "obstruction-report") && c.profiles.empty())
    for (int n : c.dims)
      if (n < 3) throw ConfigError("the default profile matrix needs n >= 3; pass --profile");
  for (auto& [k, v] : c.extra)
    if (v < 0) throw ConfigError("'" + k + "' must be >= 0");
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["n"] = c.dims;
  j["profiles"] = c.profiles;
  j["lambda"] = c.lambda;
  j["kappa"] = c.kappa;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  json t;
  for (auto& [k, v] : c.tol) t[k] = v;
  j["tolerances"] = t;
  json e = json::object();
  for (auto& [k, v] : c.extra) e[k] = v;
  j["options"] = e;
  return j;
}

template <class Fn>
void parallel(size_t count, int jobs, Fn&& fn) {
  std::atomic<size_t> next{0};
  std::exception_ptr first;
  std::mutex m;
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(m);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < std::min<int>(jobs, static_cast<int>(count)); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------- commands

struct Outcome {
  std::vector<Check> checks;
  json summary = json::object();
  Csv csv{{}};
  bool health_ok = true;
  std::string health_detail;
};

Outcome check_identities(const RunConfig& c) {
  Outcome o;
  o.csv = Csv({"n", "check", "parameter", "value", "expected", "error", "pass"});
  const double tid = c.tol.at("identity"), tc = c.tol.at("c_routes"), ts = c.tol.at("sandwich"),
               ti = c.tol.at("i2");
  double worst_id = 0.0, worst_routes = 0.0, worst_i2 = 0.0;
  int sandwich_bad = 0, id_bad = 0, routes_bad = 0, i2_bad = 0;
  for (int n : c.dims) {
    auto f = make_frame(n, c.lambda);
    for (double k : {1.0, 2.0, 10.0, 1000.0}) {
      double v = 0;
      ok(cl_window_identity(f.get(), k / c.lambda, &v), "window_identity");
      double e = std::fabs(v - 1.0);
      bool pass = e <= tid;
      worst_id = std::max(worst_id, e);
      id_bad += !pass;
      o.csv.add(n).add("window_identity").add(k).add(v).add(1.0).add(e).add(pass).end_row();
    }
    for (int j = 1; j <= 12; ++j) {
      double a = std::ldexp(1.0, -j), r = 0, l1 = 0, l2 = 0;
      ok(cl_frame_sandwich_ratio(f.get(), a, &r), "sandwich");
      bool pass = r >= 1.0 - ts && r <= std::sqrt(2.0) * (1.0 + ts);
      sandwich_bad += !pass;
      o.csv.add(n).add("normalization_sandwich").add(a).add(r).add(std::sqrt(2.0)).add(std::max(0.0, 1.0 - r)).add(pass).end_row();
      ok(cl_frame_log_c_inv2(f.get(), a, &l1), "log_c_inv2");
      ok(cl_frame_log_c_inv2_polar(f.get(), a, &l2), "log_c_inv2_polar");
      double e = std::fabs(l1 - l2);
      bool rp = e <= tc;
      routes_bad += !rp;
      worst_routes = std::max(worst_routes, e);
      o.csv.add(n).add("log_c_inv2_routes").add(a).add(l1).add(l2).add(e).add(rp).end_row();
    }
    if (n >= 3) {
      double q = 0, ls0 = 0, ls0p = 0;
      ok(cl_i2_quadrature(n, &q), "i2");
      ok(cl_sphere_surface(n, &ls0, &ls0p), "sphere");
      double exact = std::exp(ls0p) / (n - 1.0);
      double e = std::fabs(q - exact) / exact;
      bool pass = e <= ti;
      i2_bad += !pass;
      worst_i2 = std::max(worst_i2, e);
      o.csv.add(n).add("i2").add(0.0).add(q).add(exact).add(e).add(pass).end_row();
    }
  }
  o.checks.push_back({"window_identity", id_bad == 0, worst_id, tid, std::to_string(id_bad) + " violations"});
  o.checks.push_back({"normalization_sandwich", sandwich_bad == 0, static_cast<double>(sandwich_bad), 0.0, "violations"});
  o.checks.push_back({"log_c_inv2_routes", routes_bad == 0, worst_routes, tc, std::to_string(routes_bad) + " violations"});
  o.checks.push_back({"i2_exact", i2_bad == 0, worst_i2, ti, std::to_string(i2_bad) + " violations"});
  o.summary["max_identity_error"] = worst_id;
  o.summary["max_route_gap"] = worst_routes;
  o.summary["max_i2_error"] = worst_i2;
  return o;
}

struct Entry {
  int n;
  std::string profile;
};

std::vector<Entry> entries(const RunConfig& c) {
  std::vector<Entry> e;
  for (int n : c.dims)
    for (auto& p : c.profiles.empty() ? matrix(n) : c.profiles) e.push_back({n, p});
  return e;
}

Outcome uncertainty_scan(const RunConfig& c) {
  Outcome o;
  o.csv = Csv({"n", "profile", "a", "weight", "gamma_mass", "T", "lower", "upper", "expected_sq_distance",
               "x_second_moment", "sandwich_holds", "lemmas_hold", "quadrature_error"});
  auto es = entries(c);
  std::vector<std::vector<std::pair<double, cl_uncertainty_report>>> rows(es.size());
  std::map<int, std::shared_ptr<cl_frame>> frames;
  for (int n : c.dims) frames[n] = std::shared_ptr<cl_frame>(make_frame(n, c.lambda).release(), cl_frame_destroy);
  parallel(es.size(), c.jobs, [&](size_t i) {
    auto p = make_profile(es[i].profile, es[i].n, c.lambda);
    cl_frame* f = frames.at(es[i].n).get();
    cl_decomp* d = nullptr;
    ok(cl_decomp_create(p.get(), f, 0.0, c.x("weight_floor", -1.0), &d), "decomp");
    Decomp dd(d);
    size_t bins = 0, count = 0;
    ok(cl_decomp_size(d, &bins), "decomp");
    std::vector<cl_uncertainty_report> reps(bins);
    ok(cl_uncertainty_scan(d, f, 1e-9, 1, reps.data(), reps.size(), &count), "scan");
    for (size_t k = 0; k < count; ++k) {
      double weight = 0.0;
      for (size_t j = 0; j < bins; ++j) {
        double a = 0, w = 0;
        ok(cl_decomp_bin(d, j, &a, &w), "bin");
        if (a == reps[k].a) weight = w;
      }
      rows[i].emplace_back(weight, reps[k]);
    }
  });
  int sand = 0, lem = 0, total = 0;
  double worst_q = 0.0;
  for (size_t i = 0; i < es.size(); ++i)
    for (auto& [w, r] : rows[i]) {
      ++total;
      sand += !r.sandwich_holds;
      lem += !r.lemmas_hold;
      double q = r.T != 0.0 ? r.quadrature_error / std::fabs(r.T) : r.quadrature_error;
      worst_q = std::max(worst_q, q);
      o.csv.add(es[i].n).add(es[i].profile).add(r.a).add(w).add(r.gamma_mass).add(r.T).add(r.lower_bound)
          .add(r.upper_bound).add(r.expected_sq_distance).add(r.x_second_moment).add(static_cast<bool>(r.sandwich_holds))
          .add(static_cast<bool>(r.lemmas_hold)).add(r.quadrature_error);
      o.csv.end_row();
    }
  o.checks.push_back({"uncertainty_sandwich", sand == 0, static_cast<double>(sand), 0.0, "violations over " + std::to_string(total) + " bins"});
  o.checks.push_back({"lemma_sandwiches", lem == 0, static_cast<double>(lem), 0.0, "violations"});
  o.summary["bins"] = total;
  o.summary["max_relative_quadrature_error"] = worst_q;
  if (worst_q > c.tol.at("quadrature")) {
    o.health_ok = false;
    o.health_detail = "relative quadrature error " + cltool::format_double(worst_q) + " exceeds the budget";
  }
  return o;
}

Outcome obstruction_report(const RunConfig& c) {
  Outcome o;
  o.csv = Csv({"n", "profile", "a_max", "a_max_weight", "r_overlap", "r_overlap_upper", "r_curv", "r_curv_lower",
               "r_all", "ratio", "normalized_ratio", "bound_rhs", "passes_threshold", "assumption_violated",
               "overlap_within_bound", "curv_above_bound"});
  auto es = entries(c);
  std::vector<cl_obstruction_report> reps(es.size());
  std::map<int, std::shared_ptr<cl_frame>> frames;
  for (int n : c.dims) frames[n] = std::shared_ptr<cl_frame>(make_frame(n, c.lambda).release(), cl_frame_destroy);
  parallel(es.size(), c.jobs, [&](size_t i) {
    auto p = make_profile(es[i].profile, es[i].n, c.lambda);
    cl_obstruction_config cfg;
    cl_obstruction_config_default(&cfg);
    if (c.extra.count("weight_floor")) cfg.weight_floor = c.extra.at("weight_floor");
    ok(cl_obstruction_ratio(p.get(), frames.at(es[i].n).get(), &cfg, &reps[i]), "obstruction");
  });
  double cstar = c.tol.at("bound_constant");
  double gauss_fit = 0.0;
  bool have_gauss = false;
  for (size_t i = 0; i < es.size(); ++i)
    if (es[i].profile.rfind("gaussian", 0) == 0) {
      have_gauss = true;
      gauss_fit = std::max(gauss_fit, reps[i].normalized_ratio);
    }
  if (cstar == 0.0) {
    if (!have_gauss) throw ConfigError("no Gaussian profile to fit the bound constant; pass --tolerance bound_constant=C");
    cstar = 2.0 * gauss_fit;
  }
  int over = 0, thresh = 0, ub = 0, lb = 0, flagged = 0, unreached = 0;
  double worst = 0.0;
  for (size_t i = 0; i < es.size(); ++i) {
    auto& r = reps[i];
    double rhs = cstar * std::sqrt(std::log(static_cast<double>(r.n)) / r.n);
    over += r.normalized_ratio > cstar;
    thresh += r.passes_threshold;
    ub += !r.overlap_within_bound;
    lb += !r.curv_above_bound;
    flagged += r.assumption_violated;
    unreached += !r.r_overlap_reached;
    worst = std::max(worst, r.normalized_ratio);
    o.csv.add(r.n).add(es[i].profile).add(r.a_max).add(r.a_max_weight).add(r.r_overlap).add(r.r_overlap_upper)
        .add(r.r_curv).add(r.r_curv_lower).add(r.r_all).add(r.ratio).add(r.normalized_ratio).add(rhs)
        .add(static_cast<bool>(r.passes_threshold)).add(static_cast<bool>(r.assumption_violated))
        .add(static_cast<bool>(r.overlap_within_bound)).add(static_cast<bool>(r.curv_above_bound));
    o.csv.end_row();
  }
  o.checks.push_back({"ratio_bound", over == 0, worst, cstar, std::to_string(over) + " entries above C*"});
  o.checks.push_back({"below_threshold", thresh == 0, static_cast<double>(thresh), 0.0, "entries with ratio >= 1 + 1/n"});
  o.checks.push_back({"overlap_upper_bound", ub == 0, static_cast<double>(ub), 0.0, "violations"});
  o.checks.push_back({"curvature_lower_bound", lb == 0, static_cast<double>(lb), 0.0, "violations"});
  o.summary["bound_constant"] = cstar;
  o.summary["gaussian_fit"] = have_gauss ? json(gauss_fit) : json(nullptr);
  o.summary["entries"] = es.size();
  o.summary["assumption_violated"] = flagged;
  if (unreached > 0) {
    o.health_ok = false;
    o.health_detail = std::to_string(unreached) + " entries where the overlap scan never fell below the threshold";
  }
  return o;
}

Outcome lattice_demo(const RunConfig& c) {
  Outcome o;
  o.csv = Csv({"instance", "det", "lambda1", "target_distance", "verified", "success", "converged", "iterations"});
  const int n = c.dims[0];
  const size_t instances = static_cast<size_t>(c.x("instances", 200));
  const size_t samples = static_cast<size_t>(c.x("samples", 2000));
  const std::string prof = c.profiles.empty() ? "gaussian:sigma=0.1" : c.profiles[0];
  auto p = make_profile(prof, n, c.lambda);
  auto f = make_frame(n, c.lambda);
  cl_obstruction_config cfg;
  cl_obstruction_config_default(&cfg);
  cfg.weight_floor = c.x("weight_floor", 0.01);
  cl_obstruction_report rep;
  ok(cl_obstruction_ratio(p.get(), f.get(), &cfg, &rep), "obstruction");
  const double dist = 0.5 * rep.r_overlap;

  struct Row {
    double det, l1;
    bool verified, success;
    int converged, iterations;
  };
  std::vector<Row> rows(instances);
  parallel(instances, c.jobs, [&](size_t i) {
    auto lat = normalized_random_lattice(n, c.seed * 1000003ULL + i);
    std::mt19937_64 rng(c.seed * 7919ULL + i);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> coef(-2, 2);
    std::vector<double> u(n), t(n), v(n);
    double nn = 0;
    for (auto& x : u) {
      x = gauss(rng);
      nn += x * x;
    }
    std::vector<int64_t> cv(n), got(n), want(n);
    for (auto& x : want) x = coef(rng);
    ok(cl_lattice_point(lat.get(), want.data(), v.data()), "point");
    for (int k = 0; k < n; ++k) t[k] = v[k] + dist * u[k] / std::sqrt(nn);
    double d = 0;
    ok(cl_lattice_closest(lat.get(), t.data(), cv.data(), &d), "closest");
    cl_dual_estimator* e = nullptr;
    ok(cl_dual_estimator_create(lat.get(), p.get(), samples, c.seed + i, &e), "estimator");
    Estimator est(e);
    Row r{};
    ok(cl_lattice_info(lat.get(), nullptr, &r.det, &r.l1, nullptr, nullptr), "info");
    ok(cl_gradient_ascent(lat.get(), e, t.data(), got.data(), nullptr, &r.converged, &r.iterations), "ascent");
    r.verified = cv == want && std::fabs(d - dist) <= 1e-9 * std::max(1.0, dist);
    r.success = got == want;
    rows[i] = r;
  });
  size_t succ = 0, verified = 0;
  for (size_t i = 0; i < instances; ++i) {
    auto& r = rows[i];
    succ += r.success;
    verified += r.verified;
    o.csv.add(i).add(r.det).add(r.l1).add(dist).add(r.verified).add(r.success).add(r.converged != 0).add(r.iterations);
    o.csv.end_row();
  }
  double rate = instances ? static_cast<double>(succ) / instances : 0.0;
  o.checks.push_back({"targets_verified", verified == instances, static_cast<double>(verified),
                      static_cast<double>(instances), "closest vector equals the planted point"});
  o.checks.push_back({"ascent_success_rate", rate >= c.tol.at("success_rate"), rate, c.tol.at("success_rate"), ""});

  cl_qspec_result q;
  ok(cl_qspec_sandwich(std::max(n, 2), c.kappa, 1, 1.0, 1.0, 1.0, &q), "qspec");
  double floor = 1.0 - std::ldexp(1.0, -c.kappa - 1);
  o.checks.push_back({"q_overlap_floor", q.overlap_floor == floor && q.lower == floor, q.overlap_floor, floor,
                      "lower factor 1 - 2^(-kappa-1)"});

  // epsilon-net guarantee: any point within eps of the line segment has a net point within sqrt(2) eps
  const size_t draws = static_cast<size_t>(c.x("net_draws", 10000));
  std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  size_t net_fail = 0;
  double worst = 0.0;
  std::vector<double> pts;
  for (size_t i = 0; i < draws; ++i) {
    std::vector<double> b(n), th(n), x(n), perp(n);
    double nn = 0;
    for (auto& z : th) {
      z = gauss(rng);
      nn += z * z;
    }
    for (auto& z : th) z /= std::sqrt(nn);
    for (auto& z : b) z = unif(rng);
    double tau = 0.05 + std::fabs(unif(rng)), eps = 0.005 + 0.1 * std::fabs(unif(rng));
    double s = tau * unif(rng), pd = 0, pn = 0;
    for (int k = 0; k < n; ++k) perp[k] = gauss(rng);
    for (int k = 0; k < n; ++k) pd += perp[k] * th[k];
    for (int k = 0; k < n; ++k) {
      perp[k] -= pd * th[k];
      pn += perp[k] * perp[k];
    }
    double rad = eps * std::fabs(unif(rng)) / std::sqrt(std::max(pn, 1e-300));
    for (int k = 0; k < n; ++k) x[k] = b[k] + s * th[k] + rad * perp[k];
    size_t count = 0;
    cl_epsilon_net_line(n, b.data(), th.data(), tau, eps, nullptr, 0, &count);
    pts.assign(count * n, 0.0);
    ok(cl_epsilon_net_line(n, b.data(), th.data(), tau, eps, pts.data(), count, &count), "net");
    double best = INFINITY;
    for (size_t j = 0; j < count; ++j) {
      double d2 = 0;
      for (int k = 0; k < n; ++k) d2 += (pts[j * n + k] - x[k]) * (pts[j * n + k] - x[k]);
      best = std::min(best, std::sqrt(d2));
    }
    worst = std::max(worst, best / eps);
    net_fail += best > std::sqrt(2.0) * eps;
  }
  o.checks.push_back({"epsilon_net", net_fail == 0, worst, std::sqrt(2.0), std::to_string(net_fail) + " failures in " + std::to_string(draws) + " draws"});
  o.summary["profile"] = prof;
  o.summary["r_overlap"] = rep.r_overlap;
  o.summary["target_distance"] = dist;
  o.summary["success_rate"] = rate;
  return o;
}

Outcome erasure_sim(const RunConfig& c) {
  Outcome o;
  o.csv = Csv({"r", "successes", "trials", "probability", "stderr"});
  const std::string prof = c.profiles.empty() ? "gaussian:sigma=0.03" : c.profiles[0];
  auto p = make_profile(prof, 2, c.lambda);
  auto f = make_frame(2, c.lambda);
  auto lat = normalized_random_lattice(2, c.seed);
  std::vector<double> radii;
  for (double r = 0.005; r < 0.6; r *= 1.25) radii.push_back(r);
  cl_erasure_config cfg;
  cl_erasure_config_default(&cfg);
  cfg.seed = c.seed;
  cfg.trials = static_cast<size_t>(c.x("trials", static_cast<double>(cfg.trials)));
  cfg.side = static_cast<int>(c.x("side", cfg.side));
  std::vector<cl_erasure_point> pts(radii.size());
  double tau = 0, msd = 0, defect = 0;
  ok(cl_erasure_simulate(lat.get(), p.get(), radii.data(), radii.size(), &cfg, pts.data(), &tau, &msd, &defect),
     "erasure");

  // analytic lower bound on the curvature radius from the uncertainty sandwich at a_max
  cl_decomp* d = nullptr;
  ok(cl_decomp_create(p.get(), f.get(), 0.0, c.x("weight_floor", 0.01), &d), "decomp");
  Decomp dd(d);
  double a_max = 0;
  ok(cl_decomp_a_max(d, &a_max, nullptr), "a_max");
  cl_uncertainty_report u;
  ok(cl_uncertainty_at(p.get(), f.get(), a_max, &u), "uncertainty");
  const double bound = std::sqrt(u.lower_bound / u.gamma_mass);

  const double band = c.tol.at("sigma_band");
  int drops = 0;
  std::optional<double> r50;
  for (size_t i = 0; i < pts.size(); ++i) {
    auto& q = pts[i];
    o.csv.add(q.r).add(q.successes).add(q.trials).add(q.probability).add(q.stderr_);
    o.csv.end_row();
    if (!r50 && q.probability >= 0.5) r50 = q.r;
    if (i > 0) {
      double se = std::hypot(pts[i - 1].stderr_, q.stderr_);
      drops += q.probability < pts[i - 1].probability - band * se;
    }
  }
  o.checks.push_back({"monotone_in_r", drops == 0, static_cast<double>(drops), 0.0, "drops beyond the sigma band"});
  o.checks.push_back({"r50_above_curvature_bound", r50 && *r50 >= bound, r50 ? *r50 : NAN, bound,
                      "smallest radius with success >= 1/2"});
  o.summary["profile"] = prof;
  o.summary["tau"] = tau;
  o.summary["mean_sq_distance"] = msd;
  o.summary["column_defect"] = defect;
  o.summary["a_max"] = a_max;
  o.summary["curvature_lower_bound"] = bound;
  o.summary["r50"] = r50 ? json(*r50) : json(nullptr);
  return o;
}

int run(const RunConfig& c) {
  Outcome o;
  if (c.command == "check-identities") o = check_identities(c);
  if (c.command == "uncertainty-scan") o = uncertainty_scan(c);
  if (c.command == "obstruction-report") o = obstruction_report(c);
  if (c.command == "lattice-demo") o = lattice_demo(c);
  if (c.command == "erasure-sim") o = erasure_sim(c);
  bool pass = std::all_of(o.checks.begin(), o.checks.end(), [](const Check& k) { return k.pass; });
  int code = !o.health_ok ? kHealth : (pass ? kOk : kAcceptance);

  json j;
  j["schema_version"] = cltool::kSchemaVersion;
  j["library_version"] = cl_version();
  j["command"] = c.command;
  j["config"] = config_json(c);
  j["checks"] = cltool::checks_json(o.checks);
  j["summary"] = o.summary;
  j["numerical_health"] = o.health_ok ? "ok" : o.health_detail;
  j["status"] = code == kOk ? "pass" : (code == kHealth ? "numerical_health" : "fail");
  j["exit_code"] = code;
  j["csv"] = c.command + ".csv";
  cltool::write_atomic(c.out + "/" + c.command + ".csv", o.csv.str());
  cltool::write_atomic(c.out + "/" + c.command + ".json", j.dump(2) + "\n");
  for (auto& k : o.checks)
    std::printf("%-28s %s  value=%s limit=%s %s\n", k.name.c_str(), k.pass ? "PASS" : "FAIL",
                cltool::format_double(k.value).c_str(), cltool::format_double(k.limit).c_str(), k.detail.c_str());
  if (!o.health_ok) std::printf("numerical health: %s\n", o.health_detail.c_str());
  return code;
}

void diagnose(const std::string& kind, const std::string& msg) {
  json j;
  j["schema_version"] = cltool::kSchemaVersion;
  j["error"] = kind;
  j["message"] = msg;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvelab batch driver"};
  std::string config_file, command, dims, profiles, out;
  std::optional<double> lambda;
  std::optional<int> kappa, jobs;
  std::optional<uint64_t> seed;
  std::vector<std::string> tolerances, options;
  app.add_option("--config", config_file, "key = value configuration file; flags override it");
  app.add_option("--command", command, "check-identities | uncertainty-scan | obstruction-report | lattice-demo | erasure-sim");
  app.add_option("--n", dims, "comma-separated dimensions");
  app.add_option("--profile", profiles, "profile descriptors separated by ';'");
  app.add_option("--lambda", lambda, "frame lambda");
  app.add_option("--kappa", kappa, "kappa of the Q-restricted state");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--jobs", jobs, "worker threads");
  app.add_option("--tolerance", tolerances, "KEY=VALUE tolerance override (repeatable)");
  app.add_option("--set", options, "KEY=VALUE option (instances, samples, trials, side, weight_floor, net_draws)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("config", e.what());
    return kConfig;
  }

  RunConfig c;
  try {
    if (!config_file.empty()) read_config_file(c, config_file);
    if (!command.empty()) apply(c, "command", command);
    if (!dims.empty()) apply(c, "n", dims);
    if (!profiles.empty()) apply(c, "profile", profiles);
    if (lambda) c.lambda = *lambda;
    if (kappa) c.kappa = *kappa;
    if (seed) c.seed = *seed;
    if (!out.empty()) c.out = out;
    if (jobs) c.jobs = *jobs;
    for (auto& t : tolerances) set_tolerance(c, t);
    for (auto& kv : options) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE");
      apply(c, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    validate(c);
  } catch (const ConfigError& e) {
    diagnose("config", e.what());
    return kConfig;
  }

  try {
    return run(c);
  } catch (const ConfigError& e) {
    diagnose("config", e.what());
    return kConfig;
  } catch (const LibError& e) {
    bool numeric = e.status == CL_ERR_NUMERICAL || e.status == CL_ERR_CONDITIONING || e.status == CL_ERR_ALIASING;
    diagnose(numeric ? "numerical_health" : "config", e.what());
    return numeric ? kHealth : kConfig;
  } catch (const std::exception& e) {
    diagnose("io", e.what());
    return kConfig;
  }
}
