// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvelab/curvelet.hpp"
#include "curvelab/discrete_oracle.hpp"
#include "curvelab/lattice.hpp"
#include "curvelab/obstruction.hpp"
#include "curvelab/parallel.hpp"
#include "curvelab/radialfn.hpp"
#include "curvelab/specfun.hpp"
#include "curvelab/windows.hpp"

using namespace curvelab;

namespace {

constexpr double kPi = std::numbers::pi;

// pinned tolerances
constexpr double kIdentityTol = 1e-8;
constexpr double kI2Tol = 1e-8;
constexpr double kMomentPrimeFactor = 1.1;
constexpr double kMomentLowerFactor = 0.9;
constexpr double kMeisselTol = 0.01;
constexpr double kOracleTol = 0.02;
constexpr double kFidelityTol = 1e-6;
constexpr double kSuccessRate = 0.95;
constexpr double kSigmaBand = 3.0;
constexpr double kGoldenRelTol = 1e-6;

int g_jobs = 1;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Result window_identity() {
  double worst = 0.0;
  for (int n : {4, 8, 16, 32, 64}) {
    auto f = windows::make_default_frame(n);
    for (double k : {1.0, 2.0, 10.0, 1000.0}) worst = std::max(worst, std::fabs(curvelet::window_identity(f, k) - 1.0));
  }
  return {worst <= kIdentityTol, fmt("max |identity - 1| = %.3g (tol %.0e)", worst, kIdentityTol)};
}

Result normalization_sandwich() {
  int bad = 0, total = 0;
  double lo = INFINITY, hi = 0.0;
  std::vector<std::vector<double>> ratios(127);
  parallel_for(127, g_jobs, [&](size_t i) {
    auto f = windows::make_default_frame(static_cast<int>(i) + 2);
    for (int j = 1; j <= 12; ++j) ratios[i].push_back(f.angular_ratios(std::ldexp(1.0, -j)).d_over_m);
  });
  for (auto& row : ratios)
    for (double r : row) {
      ++total;
      bad += !(r >= 1.0 && r <= std::sqrt(2.0));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  return {bad == 0, fmt("%d of %d grid points outside [1, sqrt 2]; range [%.6f, %.6f]", bad, total, lo, hi)};
}

Result i2_exact() {
  double worst = 0.0;
  for (int n = 3; n <= 64; ++n) {
    double exact = specfun::sphere_surface(n).s0_prime / (n - 1.0);
    worst = std::max(worst, std::fabs(curvelet::i2_quadrature(n) - exact) / exact);
  }
  double at3 = curvelet::i2_quadrature(3);
  bool pi_ok = std::fabs(at3 - kPi) <= kI2Tol * kPi;
  return {worst <= kI2Tol && pi_ok, fmt("max relative error %.3g; I2(3) - pi = %.3g", worst, at3 - kPi)};
}

Result uncertainty_sandwich() {
  struct Job {
    int n;
    std::string spec;
  };
  std::vector<Job> jobs;
  for (int n : {3, 4, 8, 16, 32, 64, 128})
    for (auto& s : obstruction::default_profile_matrix(n)) jobs.push_back({n, s});
  std::vector<int> bins(jobs.size()), sand(jobs.size()), lem(jobs.size());
  std::map<int, windows::FrameConstants> frames;
  for (int n : {3, 4, 8, 16, 32, 64, 128}) frames.emplace(n, windows::make_default_frame(n));
  parallel_for(jobs.size(), g_jobs, [&](size_t i) {
    auto& f = frames.at(jobs[i].n);
    auto p = radial::make_profile(jobs[i].spec, jobs[i].n, 1.0);
    auto dec = curvelet::scale_weights(p, f);
    for (auto& r : curvelet::scan_uncertainty(dec, f, 1e-9, 1)) {
      if (!r) continue;
      ++bins[i];
      sand[i] += !r->sandwich_holds();
      lem[i] += !r->lemmas_hold();
    }
  });
  int b = 0, s = 0, l = 0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    b += bins[i];
    s += sand[i];
    l += lem[i];
  }
  return {s == 0 && l == 0 && b > 0,
          fmt("%zu profiles, %d bins: %d sandwich violations, %d lemma violations", jobs.size(), b, s, l)};
}

Result moment_asymptotics() {
  auto v = windows::AngularWindow::default_window();
  std::vector<int> prime_bad, lower_bad;
  double worst_prime = 0.0, worst_lower = INFINITY;
  for (int n = 50; n <= 200; ++n) {
    double m = windows::scaled_moment(v, n - 2), mp = windows::scaled_moment_prime(v, n - 2);
    double rp = (mp / m) / (kMomentPrimeFactor * 2.0 * n * n / 3.0);
    double rl = m * std::pow(static_cast<double>(n), 5) / (kMomentLowerFactor * 96.0);
    worst_prime = std::max(worst_prime, rp);
    worst_lower = std::min(worst_lower, rl);
    if (rp > 1.0) prime_bad.push_back(n);
    if (rl < 1.0) lower_bad.push_back(n);
  }
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (int n : v) s += (s.empty() ? "" : ",") + std::to_string(n);
    return s.empty() ? std::string("none") : s;
  };
  return {prime_bad.empty() && lower_bad.empty(),
          fmt("M' ratio / bound max %.4f (violations at n = %s); lower / bound min %.4f (violations at n = %s)",
              worst_prime, list(prime_bad).c_str(), worst_lower, list(lower_bad).c_str())};
}

double meissel_error(double nu, double x) {
  auto m = specfun::bessel_j_meissel(nu, x);
  auto j = specfun::bessel_j_scaled(nu, std::sqrt(nu) * x);
  return std::fabs(std::expm1(m.log_abs - j.log_abs()));
}

Result meissel() {
  const int points = 200;
  double worst = 0.0, worst_nu = 0.0, worst_x = 0.0;
  for (double nu : {50.0, 100.0, 200.0}) {
    double xmax = std::pow(nu, 0.4);
    for (int i = 1; i <= points; ++i) {
      double x = xmax * i / points;
      double e = meissel_error(nu, x);
      if (e > worst) {
        worst = e;
        worst_nu = nu;
        worst_x = x;
      }
    }
  }
  // fixed x shared by all three windows
  int not_decreasing = 0;
  double xmax = std::pow(50.0, 0.4);
  for (int i = 1; i <= points; ++i) {
    double x = xmax * i / points;
    double e50 = meissel_error(50, x), e100 = meissel_error(100, x), e200 = meissel_error(200, x);
    not_decreasing += !(e100 < e50 && e200 < e100);
  }
  return {worst <= kMeisselTol && not_decreasing == 0,
          fmt("max relative error %.4g at nu = %g, x = %.4g (tol %.2g); %d of %d fixed-x points not decreasing in nu",
              worst, worst_nu, worst_x, kMeisselTol, not_decreasing, points)};
}

Result mixture_trend() {
  std::string out;
  bool ok = true;
  for (const char* spec : {"gaussian:sigma=0.02", "gaussian:sigma=0.04", "gaussian:sigma=0.06"}) {
    double prev = INFINITY;
    out += std::string(out.empty() ? "" : "; ") + spec + ":";
    for (int n : {16, 32, 64}) {
      auto f = windows::make_default_frame(n);
      auto p = radial::make_profile(spec, n, 1.0);
      auto dec = curvelet::scale_weights(p, f, ScaleGrid{}, 1.0 / (n * n));
      double rov = obstruction::r_overlap(*p, dec, 1.0 / (n * n)).value;
      std::vector<double> s(64);
      for (size_t i = 0; i < s.size(); ++i) s[i] = rov * (i + 1) / s.size();
      double gap = 0.0;
      bool valid = true;
      for (auto& pt : radial::autocorrelation_curve(dec, s)) gap = std::max(gap, std::fabs(pt.gap));
      for (double si : s) valid = valid && radial::autocorrelation_gaussian_mixture(dec, si).valid;
      ok = ok && valid && gap < prev;
      out += fmt(" n=%d %.4g%s", n, gap, valid ? "" : " (invalid)");
      prev = gap;
    }
  }
  return {ok, out};
}

double golden_gaussian_fit() {
  std::ifstream in(std::string(CURVELAB_GOLDEN_DIR) + "/bound_constant.json");
  if (!in) return NAN;
  auto j = nlohmann::json::parse(in);
  return j.at("gaussian_fit").get<double>();
}

std::vector<obstruction::ObstructionReport> obstruction_matrix() {
  struct Job {
    int n;
    std::string spec;
  };
  std::vector<Job> jobs;
  for (int n : {16, 32, 64, 128})
    for (auto& s : obstruction::default_profile_matrix(n)) jobs.push_back({n, s});
  std::map<int, windows::FrameConstants> frames;
  for (int n : {16, 32, 64, 128}) frames.emplace(n, windows::make_default_frame(n));
  std::vector<obstruction::ObstructionReport> reps(jobs.size());
  parallel_for(jobs.size(), g_jobs, [&](size_t i) {
    reps[i] = obstruction::obstruction_ratio(radial::make_profile(jobs[i].spec, jobs[i].n, 1.0), frames.at(jobs[i].n));
  });
  return reps;
}

double gaussian_fit(const std::vector<obstruction::ObstructionReport>& reps) {
  std::vector<obstruction::ObstructionReport> g;
  for (auto& r : reps)
    if (r.profile_id.rfind("gaussian", 0) == 0) g.push_back(r);
  return obstruction::fit_bound_constant(g);
}

Result main_obstruction() {
  auto reps = obstruction_matrix();
  double golden = golden_gaussian_fit();
  if (!std::isfinite(golden)) return {false, "golden bound constant missing; run with --freeze-golden"};
  double fit = gaussian_fit(reps);
  const double cstar = 2.0 * golden;
  int over = 0, thresh = 0;
  double worst = 0.0;
  for (auto& r : reps) {
    over += r.normalized_ratio > cstar;
    thresh += r.passes_threshold;
    worst = std::max(worst, r.normalized_ratio);
  }
  bool reproduced = std::fabs(fit - golden) <= kGoldenRelTol * golden;
  return {over == 0 && thresh == 0 && reproduced,
          fmt("%zu entries; C* = %.6g; max ratio sqrt(n/ln n) = %.6g; %d above C*; %d pass the threshold; "
              "Gaussian fit %.10g vs frozen %.10g",
              reps.size(), cstar, worst, over, thresh, fit, golden)};
}

Result oracle_equivalence() {
  const int side = 256;
  const double cell = 3.0 / side;
  auto p = radial::make_profile("shell:r1=5,r2=20", 2, 1.0);
  auto frame = windows::make_default_frame(2);
  auto df = discrete::DiscreteFrame::standard();
  df.direction_oversample = 4;
  auto state = discrete::make_radial_state(*p, side, cell);
  auto m = discrete::scale_moments(state, df);
  double worst_mass = 0.0, worst_t = 0.0, cont_total = 0.0;
  int checked = 0;
  for (size_t j = 0; j < m.a.size(); ++j) {
    double cm = df.bin_width * curvelet::single_scale_mass(*p, frame, m.a[j]);
    cont_total += cm;
    if (m.mass[j] < 1e-3) continue;
    ++checked;
    auto r = curvelet::uncertainty_T(*p, frame, m.a[j]);
    worst_mass = std::max(worst_mass, std::fabs(m.mass[j] / cm - 1.0));
    worst_t = std::max(worst_t, std::fabs(m.sq_dist[j] / (df.bin_width * r.T) - 1.0));
  }
  double planch = std::max(std::fabs(m.total_mass / state.norm_sq() - 1.0), std::fabs(cont_total - 1.0));
  auto back = discrete::roundtrip_streaming(state, df);
  double fid = discrete::fidelity(state, back);
  bool ok = worst_mass <= kOracleTol && worst_t <= kOracleTol && planch <= kOracleTol && fid >= 1 - kFidelityTol;
  return {ok, fmt("%d scales: max mass error %.3g, max T error %.3g, Plancherel %.3g; fidelity 1 - %.3g", checked,
                  worst_mass, worst_t, planch, 1 - fid)};
}

Result lattice_pipeline() {
  const int n = 3;
  const size_t instances = 200, samples = 2000;
  const std::uint64_t seed = 1;
  auto p = radial::make_profile("gaussian:sigma=0.1", n, 1.0);
  auto frame = windows::make_default_frame(n);
  obstruction::ObstructionConfig cfg;
  cfg.weight_floor = 0.01;
  auto rep = obstruction::obstruction_ratio(p, frame, cfg);
  const double dist = 0.5 * rep.r_overlap;
  std::vector<char> verified(instances), success(instances);
  parallel_for(instances, g_jobs, [&](size_t i) {
    auto lat = lattice::normalize_lambda1(lattice::random_lattice(n, seed * 1000003ULL + i));
    std::mt19937_64 rng(seed * 7919ULL + i);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> coef(-2, 2);
    lattice::Vec u(n), t(n);
    double nn = 0;
    for (auto& x : u) {
      x = gauss(rng);
      nn += x * x;
    }
    lattice::Coeffs want(n);
    for (auto& x : want) x = coef(rng);
    auto v = lat.point(want);
    for (int k = 0; k < n; ++k) t[k] = v[k] + dist * u[k] / std::sqrt(nn);
    auto cv = lattice::closest_vector(lat, t);
    verified[i] = cv.coeffs == want && std::fabs(cv.distance - dist) <= 1e-9 * std::max(1.0, dist);
    obstruction::DualSampleEstimator est(lat, *p, samples, seed + i);
    auto res = obstruction::gradient_ascent_bdd(lat, [&](const lattice::Vec& x) { return est.estimate(x).value; }, t);
    success[i] = res.point.coeffs == want;
  });
  size_t ver = 0, succ = 0;
  for (size_t i = 0; i < instances; ++i) {
    ver += verified[i];
    succ += success[i];
  }
  double rate = static_cast<double>(succ) / instances;

  bool floor_ok = true;
  for (int kappa : {1, 2, 5, 20}) {
    auto q = lattice::make_qspec(n, kappa, 1);
    auto s = lattice::q_overlap_sandwich(q, 1.0, 1.0);
    double want = 1.0 - std::ldexp(1.0, -kappa - 1);
    floor_ok = floor_ok && q.overlap_floor == want && s.lower == want;
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  size_t net_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    lattice::Vec b(n), th(n), perp(n), x(n);
    double nn = 0, pd = 0, pn = 0;
    for (auto& z : th) {
      z = gauss(rng);
      nn += z * z;
    }
    for (auto& z : th) z /= std::sqrt(nn);
    for (auto& z : b) z = unif(rng);
    double tau = 0.05 + std::fabs(unif(rng)), eps = 0.005 + 0.1 * std::fabs(unif(rng));
    double along = tau * unif(rng);
    for (auto& z : perp) z = gauss(rng);
    for (int k = 0; k < n; ++k) pd += perp[k] * th[k];
    for (int k = 0; k < n; ++k) {
      perp[k] -= pd * th[k];
      pn += perp[k] * perp[k];
    }
    double rad = eps * std::fabs(unif(rng)) / std::sqrt(pn);
    for (int k = 0; k < n; ++k) x[k] = b[k] + along * th[k] + rad * perp[k];
    double best = INFINITY;
    for (auto& q : obstruction::epsilon_net_line({b, th, 0.1, tau}, eps)) {
      double d2 = 0;
      for (int k = 0; k < n; ++k) d2 += (q[k] - x[k]) * (q[k] - x[k]);
      best = std::min(best, std::sqrt(d2));
    }
    net_fail += best > std::sqrt(2.0) * eps;
  }
  return {ver == instances && rate >= kSuccessRate && floor_ok && net_fail == 0,
          fmt("targets verified %zu/%zu at distance %.4g; ascent success %.3f (need %.2f); Q floor %s; "
              "epsilon-net failures %zu in 10000",
              ver, instances, dist, rate, kSuccessRate, floor_ok ? "exact" : "WRONG", net_fail)};
}

Result index_erasure() {
  const std::uint64_t seed = 1;
  auto p = radial::make_profile("gaussian:sigma=0.03", 2, 1.0);
  auto frame = windows::make_default_frame(2);
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(2, seed));
  std::vector<double> radii;
  for (double r = 0.005; r < 0.6; r *= 1.25) radii.push_back(r);
  obstruction::ErasureConfig cfg;
  cfg.seed = seed;
  auto run = obstruction::simulate_index_erasure(lat, *p, discrete::DiscreteFrame::standard(), radii, cfg);

  // the n = 2 curvature bound vanishes identically, so use the uncertainty sandwich at a_max
  auto dec = curvelet::scale_weights(p, frame, ScaleGrid{}, 0.01);
  auto u = curvelet::uncertainty_T(*p, frame, dec.a_max);
  const double bound = std::sqrt(u.lower_bound / u.gamma_mass);
  int drops = 0;
  double r50 = NAN;
  for (size_t i = 0; i < run.points.size(); ++i) {
    auto& q = run.points[i];
    if (std::isnan(r50) && q.probability >= 0.5) r50 = q.r;
    if (i > 0) {
      double se = std::hypot(run.points[i - 1].stderr_, q.stderr_);
      drops += q.probability < run.points[i - 1].probability - kSigmaBand * se;
    }
  }
  return {drops == 0 && !std::isnan(r50) && r50 >= bound,
          fmt("%zu radii, %zu trials: %d drops beyond 3 sigma; r50 = %.4g, curvature lower bound %.4g", radii.size(),
              cfg.trials, drops, r50, bound)};
}

int freeze_golden() {
  auto reps = obstruction_matrix();
  double fit = gaussian_fit(reps);
  nlohmann::json j;
  j["gaussian_fit"] = fit;
  j["bound_constant"] = 2.0 * fit;
  j["dimensions"] = {16, 32, 64, 128};
  j["profiles"] = {"gaussian:sigma=0.02", "gaussian:sigma=0.04", "gaussian:sigma=0.06"};
  std::ofstream(std::string(CURVELAB_GOLDEN_DIR) + "/bound_constant.json") << j.dump(2) << "\n";
  std::printf("gaussian fit %.17g, C* %.17g\n", fit, 2.0 * fit);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvelab acceptance checks"};
  std::vector<int> only;
  bool freeze = false;
  app.add_option("--criterion", only, "criteria to run (default: all)")->check(CLI::Range(1, 11));
  app.add_option("--jobs", g_jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--freeze-golden", freeze, "recompute and write the frozen Gaussian-fit constant");
  CLI11_PARSE(app, argc, argv);
  if (freeze) return freeze_golden();

  const std::vector<std::pair<const char*, std::function<Result()>>> checks = {
      {"window identity", window_identity},
      {"normalization sandwich", normalization_sandwich},
      {"I2 exact value", i2_exact},
      {"uncertainty sandwich", uncertainty_sandwich},
      {"moment asymptotics", moment_asymptotics},
      {"Meissel approximation", meissel},
      {"Gaussian mixture overlap", mixture_trend},
      {"main obstruction", main_obstruction},
      {"discrete oracle equivalence", oracle_equivalence},
      {"lattice toy pipeline", lattice_pipeline},
      {"index erasure", index_erasure},
  };
  if (only.empty())
    for (int i = 1; i <= 11; ++i) only.push_back(i);
  bool all = true;
  for (int c : only) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = checks[c - 1].second();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c, checks[c - 1].first, r.pass ? "PASS" : "FAIL", secs,
                r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
