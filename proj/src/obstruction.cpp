#include "curvelab/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "curvelab/errors.hpp"

namespace curvelab::obstruction {

namespace {
constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

double norm(const lattice::Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const lattice::Vec& a, const lattice::Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace

OverlapRadius r_overlap(const radial::RadialProfile& profile, const ScaleDecomposition& decomp, double eps,
                        double scan_limit) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::domain, "r_overlap: threshold must lie in (0, 1)");
  if (std::fabs(profile.l2_norm_sq() - 1.0) > 1e-6) fail(ErrorCode::precondition, "r_overlap: profile is not normalised");
  const int n = profile.n();
  OverlapRadius out;
  out.upper_bound = kE * decomp.lambda * decomp.a_max * std::sqrt(std::max(0, n - 2) * std::log(1.0 / eps)) /
                    (kPi * std::sqrt(2.0));
  double smax = scan_limit > 0.0 ? scan_limit : 4.0 * std::max(out.upper_bound, 1.0 / profile.r_hi());
  auto zeta = [&](double s) { return radial::autocorrelation_exact(profile, s); };
  for (int grow = 0; grow < 8 && zeta(smax) >= eps; ++grow) smax *= 2.0;
  out.scan_limit = smax;
  const int count = 512;
  const double smin = smax * 1e-4;
  std::vector<double> s(count), z(count);
  int last = -1;
  for (int i = 0; i < count; ++i) {
    s[i] = smin * std::pow(smax / smin, static_cast<double>(i) / (count - 1));
    z[i] = zeta(s[i]);
    if (z[i] >= eps) last = i;
  }
  if (last == count - 1) {
    out.value = smax;
    out.reached = true;
    return out;
  }
  double lo = last >= 0 ? s[last] : 0.0;
  double hi = s[last + 1];
  for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
    double m = 0.5 * (lo + hi);
    (zeta(m) >= eps ? lo : hi) = m;
  }
  out.value = lo;
  return out;
}

CurvatureRadius r_curv(const ScaleDecomposition& decomp, const curvelet::UncertaintyReport& rep) {
  if (decomp.a_max_index < 0) fail(ErrorCode::degenerate, "r_curv: decomposition has no admissible scale");
  if (!(rep.gamma_mass > 0.0)) fail(ErrorCode::degenerate, "r_curv: no mass at a_max");
  const int n = decomp.n;
  CurvatureRadius c;
  c.value = std::sqrt(rep.expected_sq_distance());
  c.lower_bound = decomp.lambda * decomp.a_max * std::sqrt(static_cast<double>(n - 1) * (n - 2)) / (4.0 * kPi);
  c.holds = c.value >= c.lower_bound * (1.0 - 1e-12);
  return c;
}

CurvatureRadius r_curv(const ScaleDecomposition& decomp,
                       const std::vector<std::optional<curvelet::UncertaintyReport>>& reports) {
  if (decomp.a_max_index < 0 || decomp.a_max_index >= static_cast<int>(reports.size()) ||
      !reports[decomp.a_max_index])
    fail(ErrorCode::degenerate, "r_curv: no report at a_max");
  return r_curv(decomp, *reports[decomp.a_max_index]);
}

ObstructionReport obstruction_ratio(const std::shared_ptr<const radial::RadialProfile>& profile,
                                    const windows::FrameConstants& frame, const ObstructionConfig& config) {
  const int n = profile->n();
  if (n != frame.n()) fail(ErrorCode::domain, "obstruction: profile and frame dimensions differ");
  ObstructionReport rep;
  rep.n = n;
  rep.profile_id = profile->spec().to_string();
  rep.lambda = frame.lambda();
  rep.epsilon_ov = config.epsilon_ov > 0.0 ? config.epsilon_ov : 1.0 / (static_cast<double>(n) * n);
  rep.delta = config.delta;
  double floor = config.weight_floor > 0.0 ? config.weight_floor : 1.0 / (static_cast<double>(n) * n);
  auto decomp = curvelet::scale_weights(profile, frame, config.grid, floor);
  if (decomp.a_max_index < 0) fail(ErrorCode::degenerate, "obstruction: no scale bin reaches the weight floor");
  rep.a_max = decomp.a_max;
  rep.a_max_weight = decomp.weights.at(decomp.a_max_index);
  auto at = curvelet::uncertainty_T(*profile, frame, decomp.a_max);
  rep.quadrature_error = at.quadrature_error + decomp.quadrature_error;
  auto rc = r_curv(decomp, at);
  rep.r_curv = rc.value;
  rep.r_curv_lower = rc.lower_bound;
  rep.curv_above_bound = rc.holds;
  rep.r_all = radial::support_radius(*profile, config.delta);
  rep.assumption_violated = !(rep.r_all < 0.25);
  double ub = kE * decomp.lambda * decomp.a_max * std::sqrt(std::max(0, n - 2) * std::log(1.0 / rep.epsilon_ov)) /
              (kPi * std::sqrt(2.0));
  auto ov = r_overlap(*profile, decomp, rep.epsilon_ov, 4.0 * std::max(ub, rep.r_all));
  rep.r_overlap = ov.value;
  rep.r_overlap_reached = ov.reached;
  rep.r_overlap_upper = ov.upper_bound;
  rep.overlap_within_bound = ov.value <= ov.upper_bound;
  rep.ratio = rep.r_overlap / rep.r_curv;
  rep.normalized_ratio = rep.ratio * std::sqrt(n / std::log(static_cast<double>(n)));
  rep.bound_constant = config.bound_constant;
  rep.bound_rhs = config.bound_constant * std::sqrt(std::log(static_cast<double>(n)) / n);
  rep.passes_threshold = rep.ratio >= 1.0 + 1.0 / n;
  return rep;
}

std::vector<std::string> default_profile_matrix(int n) {
  if (n < 3) fail(ErrorCode::domain, "profile matrix: n must be >= 3");
  auto fmt = [](const char* f, double x, double y) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, x, y);
    return std::string(buf);
  };
  const double a0 = 0.08 / std::sqrt(static_cast<double>(n));
  return {"gaussian:sigma=0.02",
          "gaussian:sigma=0.04",
          "gaussian:sigma=0.06",
          fmt("shell:r1=%.17g,r2=%.17g", 1.0 / (kE * a0), 1.0 / a0),
          fmt("two_scale:a1=%.17g,a2=%.17g", 0.32 / n, 0.8 / n),
          "ball:R=0.2"};
}

double fit_bound_constant(const std::vector<ObstructionReport>& reports) {
  double c = 0.0;
  for (auto& r : reports) c = std::max(c, r.normalized_ratio);
  return c;
}

std::vector<lattice::Vec> epsilon_net_line(const LineHypothesis& hyp, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::domain, "epsilon_net_line: epsilon must be positive");
  if (!(hyp.tau > 0.0)) fail(ErrorCode::domain, "epsilon_net_line: tau must be positive");
  if (hyp.b.size() != hyp.theta.size() || hyp.b.empty()) fail(ErrorCode::domain, "epsilon_net_line: dimension mismatch");
  if (std::fabs(norm(hyp.theta) - 1.0) > 1e-12) fail(ErrorCode::domain, "epsilon_net_line: theta must be a unit vector");
  long long m = static_cast<long long>(std::ceil(hyp.tau / epsilon - 1e-12));
  std::vector<lattice::Vec> pts;
  pts.reserve(static_cast<size_t>(2 * m + 1));
  for (long long j = -m; j <= m; ++j) {
    lattice::Vec p = hyp.b;
    for (size_t d = 0; d < p.size(); ++d) p[d] += static_cast<double>(j) * epsilon * hyp.theta[d];
    pts.push_back(std::move(p));
  }
  return pts;
}

DualSampleEstimator::DualSampleEstimator(const lattice::Lattice& lat, const radial::RadialProfile& profile,
                                         size_t num_samples, std::uint64_t seed) {
  if (lat.n != profile.n()) fail(ErrorCode::domain, "dual samples: lattice and profile dimensions differ");
  if (lat.n > 3) fail(ErrorCode::capability, "dual samples: enumeration is limited to n <= 3");
  if (num_samples == 0) fail(ErrorCode::domain, "dual samples: need at least one sample");
  auto d = lattice::dual(lat);
  // without a cutoff F_0 is continuous at the origin and the zero vector takes the limit value;
  // with one the origin lies below the support
  const double r0 = profile.r_hi() * 1e-12;
  lattice::Vec zero(lat.n, 0.0);
  lattice::enumerate_ball(d, zero, profile.r_hi(), [&](const lattice::Coeffs& x, double d2) {
    double r = std::sqrt(d2);
    double f = r > 0.0 ? profile.f0(r) : (profile.r_lo() > 0.0 ? 0.0 : profile.f0(r0));
    if (f != 0.0) {
      support_.push_back(d.point(x));
      weight_.push_back(f * f);
    }
    return profile.r_hi() * profile.r_hi();
  });
  if (support_.empty()) fail(ErrorCode::degenerate, "dual samples: no dual vector inside the frequency support");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<size_t> pick(weight_.begin(), weight_.end());
  samples_.reserve(num_samples);
  for (size_t i = 0; i < num_samples; ++i) samples_.push_back(support_[pick(rng)]);
}

OverlapEstimate DualSampleEstimator::estimate(const lattice::Vec& t) const {
  double s = 0.0, s2 = 0.0;
  for (auto& w : samples_) {
    double c = std::cos(2.0 * kPi * dot(w, t));
    s += c;
    s2 += c * c;
  }
  const double N = static_cast<double>(samples_.size());
  OverlapEstimate e;
  e.value = s / N;
  double var = N > 1 ? std::max(0.0, (s2 - N * e.value * e.value) / (N - 1)) : 0.0;
  e.stderr_ = std::sqrt(var / N);
  return e;
}

double DualSampleEstimator::exact(const lattice::Vec& t) const {
  double s = 0.0, z = 0.0;
  for (size_t i = 0; i < support_.size(); ++i) {
    s += weight_[i] * std::cos(2.0 * kPi * dot(support_[i], t));
    z += weight_[i];
  }
  return s / z;
}

OverlapEstimate estimate_overlap_dual_samples(const lattice::Lattice& lat, const radial::RadialProfile& profile,
                                              const lattice::Vec& t, size_t num_samples, std::uint64_t seed) {
  return DualSampleEstimator(lat, profile, num_samples, seed).estimate(t);
}

AscentResult gradient_ascent_bdd(const lattice::Lattice& lat, const std::function<double(const lattice::Vec&)>& overlap,
                                 const lattice::Vec& t, const AscentSchedule& sch) {
  if (lat.n > 4) fail(ErrorCode::capability, "gradient_ascent_bdd: limited to n <= 4");
  if (static_cast<int>(t.size()) != lat.n) fail(ErrorCode::domain, "gradient_ascent_bdd: target has wrong dimension");
  AscentResult res;
  lattice::Vec x = t;
  double f = overlap(x);
  res.trace.push_back(f);
  double step = sch.initial_step;
  const int n = lat.n;
  lattice::Vec g(n), y(n);
  for (res.iterations = 0; res.iterations < sch.max_iterations; ++res.iterations) {
    for (int d = 0; d < n; ++d) {
      y = x;
      y[d] += sch.fd_step;
      double fp = overlap(y);
      y[d] = x[d] - sch.fd_step;
      double fm = overlap(y);
      g[d] = (fp - fm) / (2.0 * sch.fd_step);
    }
    double gn = norm(g);
    if (gn == 0.0) {
      res.converged = true;
      break;
    }
    for (int d = 0; d < n; ++d) y[d] = x[d] + step * g[d] / gn;
    double fy = overlap(y);
    if (fy > f) {
      x = y;
      f = fy;
      res.trace.push_back(f);
      step *= 1.5;
    } else {
      step *= 0.5;
    }
    if (step < sch.min_step) {
      res.converged = true;
      break;
    }
  }
  res.final_position = x;
  res.point = lattice::closest_vector(lat, x);
  return res;
}

ErasureRun simulate_index_erasure(const lattice::Lattice& lat, const radial::RadialProfile& profile,
                                  const discrete::DiscreteFrame& frame, const std::vector<double>& radii,
                                  const ErasureConfig& cfg) {
  if (lat.n != 2 || profile.n() != 2) fail(ErrorCode::domain, "simulate_index_erasure: n must be 2");
  if (!lat.lambda1_exact) fail(ErrorCode::precondition, "simulate_index_erasure: lambda1 must be known");
  if (std::fabs(frame.lambda - profile.lambda()) > 1e-12 * profile.lambda())
    fail(ErrorCode::domain, "simulate_index_erasure: frame and profile use different lambda");
  const double l1 = lat.lambda1;
  double cell = cfg.cell > 0.0 ? cfg.cell : 0.7 * l1 / cfg.side;
  double box = cell * cfg.side;
  // the whole torus must sit inside the Voronoi cell of x = 0
  if (box / std::sqrt(2.0) >= 0.5 * l1)
    fail(ErrorCode::precondition, "simulate_index_erasure: grid box leaves the Voronoi cell of x");
  for (double r : radii)
    if (!(r > 0.0)) fail(ErrorCode::domain, "simulate_index_erasure: radii must be positive");

  auto state = discrete::make_radial_state(profile, cfg.side, cell);
  double r_all = cfg.r_all > 0.0 ? cfg.r_all : radial::support_radius(profile, 0.01);
  ErasureRun run;
  run.tau = cfg.tau > 0.0 ? cfg.tau : 10.0 * r_all;
  run.column_defect = discrete::Transform(2, cfg.side, cell, frame).column_defect();
  auto samples = discrete::sample_streaming(state, frame, cfg.trials, cfg.seed);

  double d2sum = 0.0;
  for (auto& s : samples) {
    run.b_distance.push_back(std::hypot(s.b[0], s.b[1]));
    d2sum += s.sq_dist();
  }
  run.mean_sq_distance = d2sum / static_cast<double>(samples.size());

  for (double r : radii) {
    ErasurePoint p;
    p.r = r;
    p.trials = samples.size();
    const double eps = r / std::sqrt(2.0);
    for (auto& s : samples) {
      LineHypothesis hyp{{s.b[0], s.b[1]}, {s.theta[0], s.theta[1]}, s.a, run.tau};
      bool ok = false;
      for (auto& q : epsilon_net_line(hyp, eps)) {
        // the oracle can only return x = 0 if the probe lies within r of it
        if (norm(q) > r) continue;
        auto c = lattice::closest_vector(lat, q);
        bool is_x = std::all_of(c.coeffs.begin(), c.coeffs.end(), [](long long v) { return v == 0; });
        if (is_x && c.distance <= r) {
          ok = true;
          break;
        }
      }
      if (ok) ++p.successes;
    }
    const double N = static_cast<double>(p.trials);
    p.probability = p.successes / N;
    p.stderr_ = std::sqrt(std::max(p.probability * (1.0 - p.probability), 1.0 / N) / N);
    run.points.push_back(p);
  }
  return run;
}

}  // namespace curvelab::obstruction
