#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "curvelab/curvelet.hpp"
#include "curvelab/errors.hpp"
#include "curvelab/obstruction.hpp"

using namespace curvelab;
using namespace curvelab::obstruction;

namespace {
constexpr double kPi = std::numbers::pi;

double norm(const lattice::Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

TEST(OverlapRadius, ThresholdCrossing) {
  const int n = 16;
  auto frame = windows::make_default_frame(n);
  auto p = radial::make_profile("gaussian:sigma=0.04", n, 1.0);
  auto dec = curvelet::scale_weights(p, frame);
  const double eps = 1.0 / (n * n);
  auto ov = r_overlap(*p, dec, eps);
  ASSERT_TRUE(ov.reached);
  EXPECT_NEAR(radial::autocorrelation_exact(*p, ov.value), eps, 1e-6);
  // nothing beyond the crossing climbs back above the threshold
  for (int i = 1; i <= 200; ++i) {
    double s = ov.value * (1 + 1e-6) + (ov.scan_limit - ov.value) * i / 200.0;
    EXPECT_LT(radial::autocorrelation_exact(*p, s), eps) << s;
  }
  EXPECT_LE(ov.value, ov.upper_bound);
  EXPECT_THROW(r_overlap(*p, dec, 0.0), Error);
  EXPECT_THROW(r_overlap(*p, dec, 1.0), Error);
}

TEST(OverlapRadius, ShrinksAsThresholdApproachesOne) {
  const int n = 8;
  auto frame = windows::make_default_frame(n);
  auto p = radial::make_profile("gaussian:sigma=0.04", n, 1.0);
  auto dec = curvelet::scale_weights(p, frame);
  double prev = INFINITY;
  for (double eps : {0.01, 0.1, 0.5, 0.9, 0.999, 1 - 1e-8}) {
    double v = r_overlap(*p, dec, eps).value;
    EXPECT_LT(v, prev) << eps;
    prev = v;
  }
  EXPECT_LT(prev, 1e-3 * r_overlap(*p, dec, 0.5).value);
}

// A single-scale shell at n = 64 has its overlap radius within a factor 2 of the analytic upper bound.
TEST(OverlapRadius, SingleScaleNearUpperBound) {
  const int n = 64;
  auto frame = windows::make_default_frame(n);
  auto p = radial::make_profile("single_scale:a0=0.0067379469990854670", n, 1.0);  // e^{-5}, on grid
  auto dec = curvelet::scale_weights(p, frame);
  auto ov = r_overlap(*p, dec, 1.0 / (n * n));
  EXPECT_LE(ov.value, ov.upper_bound);
  EXPECT_GE(ov.value, 0.5 * ov.upper_bound);
}

TEST(CurvatureRadius, AboveLowerBoundAcrossMatrix) {
  for (int n : {4, 16}) {
    auto frame = windows::make_default_frame(n);
    for (auto& spec : default_profile_matrix(n)) {
      auto p = radial::make_profile(spec, n, 1.0);
      auto dec = curvelet::scale_weights(p, frame, ScaleGrid{}, 1.0 / (n * n));
      auto rep = curvelet::uncertainty_T(*p, frame, dec.a_max);
      auto rc = r_curv(dec, rep);
      EXPECT_TRUE(rc.holds) << spec << " " << n;
      EXPECT_GE(rc.value, rc.lower_bound) << spec << " " << n;
      EXPECT_NEAR(rc.lower_bound, dec.a_max * std::sqrt((n - 1.0) * (n - 2.0)) / (4 * kPi), 1e-15);
      EXPECT_NEAR(rc.value * rc.value, rep.T / rep.gamma_mass, 1e-12 * rc.value * rc.value);
    }
  }
}

TEST(CurvatureRadius, MissingReportIsDegenerate) {
  auto frame = windows::make_default_frame(8);
  auto p = radial::make_profile("gaussian:sigma=0.04", 8, 1.0);
  auto dec = curvelet::scale_weights(p, frame);
  std::vector<std::optional<curvelet::UncertaintyReport>> none(dec.scales.size());
  EXPECT_THROW(r_curv(dec, none), Error);
}

TEST(Ratio, ReportFieldsAreConsistent) {
  const int n = 16;
  auto frame = windows::make_default_frame(n);
  ObstructionConfig cfg;
  cfg.bound_constant = 2.0;
  auto p = radial::make_profile("gaussian:sigma=0.04", n, 1.0);
  auto r = obstruction_ratio(p, frame, cfg);
  EXPECT_DOUBLE_EQ(r.epsilon_ov, 1.0 / 256);
  EXPECT_NEAR(r.ratio, r.r_overlap / r.r_curv, 1e-15 * r.ratio);
  EXPECT_NEAR(r.normalized_ratio, r.ratio * std::sqrt(n / std::log(n)), 1e-12);
  EXPECT_NEAR(r.bound_rhs, 2.0 * std::sqrt(std::log(n) / n), 1e-15);
  EXPECT_EQ(r.passes_threshold, r.ratio >= 1 + 1.0 / n);
  EXPECT_EQ(r.assumption_violated, r.r_all >= 0.25);
  EXPECT_NEAR(r.r_all, radial::support_radius(*p, 0.01), 1e-15);
  EXPECT_TRUE(r.curv_above_bound);
  EXPECT_EQ(r.profile_id, p->spec().to_string());
  EXPECT_THROW(obstruction_ratio(p, windows::make_default_frame(8)), Error);
}

TEST(Ratio, FitBoundConstantIsMaximum) {
  std::vector<ObstructionReport> rs(3);
  rs[0].normalized_ratio = 0.2;
  rs[1].normalized_ratio = 0.7;
  rs[2].normalized_ratio = 0.4;
  EXPECT_DOUBLE_EQ(fit_bound_constant(rs), 0.7);
  EXPECT_EQ(default_profile_matrix(9).size(), 6u);
  EXPECT_THROW(default_profile_matrix(2), Error);
}

// Spatial dilation by beta scales both radii by beta, leaving their ratio fixed.
TEST(Ratio, DilationScalesSupportRadii) {
  const int n = 8;
  const double beta = std::exp(0.25);
  auto frame = windows::make_default_frame(n);
  auto p = radial::make_profile("shell:r1=5,r2=40", n, 1.0);
  auto q = radial::dilate(p, beta, 1.0);
  auto rp = obstruction_ratio(p, frame);
  auto rq = obstruction_ratio(q, frame);
  EXPECT_NEAR(rq.a_max / rp.a_max, beta, 1e-12);
  EXPECT_NEAR(rq.r_overlap / rp.r_overlap, beta, 1e-4 * beta);
  EXPECT_NEAR(rq.r_all / rp.r_all, beta, 1e-4 * beta);
}

TEST(Ratio, DilationInvariance) {
  const int n = 8;
  const double beta = std::exp(0.25);
  auto frame = windows::make_default_frame(n);
  auto p = radial::make_profile("shell:r1=5,r2=40", n, 1.0);
  auto q = radial::dilate(p, beta, 1.0);
  auto rp = obstruction_ratio(p, frame);
  auto rq = obstruction_ratio(q, frame);
  EXPECT_NEAR(rq.r_curv / rp.r_curv, beta, 1e-4 * beta);
  EXPECT_NEAR(rq.ratio, rp.ratio, 1e-3 * rp.ratio);
}

TEST(EpsilonNet, CountAndSpacing) {
  LineHypothesis h{{0.5, -1.0}, {0.6, 0.8}, 0.1, 10.0};
  auto pts = epsilon_net_line(h, 1.0);
  ASSERT_EQ(pts.size(), 21u);
  EXPECT_NEAR(pts.front()[0], 0.5 - 6.0, 1e-12);
  EXPECT_NEAR(pts.back()[1], -1.0 + 8.0, 1e-12);
  for (size_t i = 1; i < pts.size(); ++i) {
    lattice::Vec d = {pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]};
    EXPECT_NEAR(norm(d), 1.0, 1e-12);
  }
  EXPECT_EQ(epsilon_net_line({{0, 0}, {1, 0}, 0.1, 1.0}, 0.3).size(), 9u);
  EXPECT_THROW(epsilon_net_line({{0, 0}, {1, 1}, 0.1, 1.0}, 0.1), Error);
  EXPECT_THROW(epsilon_net_line(h, 0.0), Error);
  EXPECT_THROW(epsilon_net_line({{0, 0}, {1, 0}, 0.1, 0.0}, 0.1), Error);
}

// Every point within eps of the segment has a net point within sqrt(2) eps.
TEST(EpsilonNet, CoversTube) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + trial % 3;
    lattice::Vec b(n), th(n), perp(n), x(n);
    double s = 0;
    for (auto& z : th) {
      z = g(rng);
      s += z * z;
    }
    for (auto& z : th) z /= std::sqrt(s);
    for (auto& z : b) z = u(rng);
    double tau = 0.05 + std::fabs(u(rng)), eps = 0.005 + 0.1 * std::fabs(u(rng));
    double along = tau * u(rng), pd = 0, pn = 0;
    for (auto& z : perp) z = g(rng);
    for (int k = 0; k < n; ++k) pd += perp[k] * th[k];
    for (int k = 0; k < n; ++k) {
      perp[k] -= pd * th[k];
      pn += perp[k] * perp[k];
    }
    double rad = eps * std::fabs(u(rng)) / std::sqrt(pn);
    for (int k = 0; k < n; ++k) x[k] = b[k] + along * th[k] + rad * perp[k];
    double best = INFINITY;
    for (auto& q : epsilon_net_line({b, th, 0.1, tau}, eps)) {
      lattice::Vec d(n);
      for (int k = 0; k < n; ++k) d[k] = q[k] - x[k];
      best = std::min(best, norm(d));
    }
    ASSERT_LE(best, std::sqrt(2.0) * eps) << trial;
  }
}

TEST(DualSamples, LatticePointsHaveFullOverlap) {
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(3, 4));
  auto p = radial::make_profile("gaussian:sigma=0.1", 3, 1.0);
  DualSampleEstimator est(lat, *p, 2000, 9);
  auto v = lat.point(lattice::Coeffs{1, -2, 1});
  EXPECT_NEAR(est.estimate(v).value, 1.0, 1e-9);
  EXPECT_NEAR(est.exact(v), 1.0, 1e-9);
  EXPECT_NEAR(est.estimate(v).stderr_, 0.0, 1e-6);
}

TEST(DualSamples, StandardErrorHalvesWithFourTimesTheSamples) {
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(2, 7));
  auto p = radial::make_profile("gaussian:sigma=0.1", 2, 1.0);
  lattice::Vec t = {0.17, -0.11};
  double e1 = 0, e4 = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    e1 += estimate_overlap_dual_samples(lat, *p, t, 2000, seed).stderr_;
    e4 += estimate_overlap_dual_samples(lat, *p, t, 8000, seed).stderr_;
  }
  EXPECT_NEAR(e1 / e4, 2.0, 0.15);
}

// On Z^2 the target sum is rebuilt by scanning a box of integer frequencies.
TEST(DualSamples, IntegerLatticeAgainstBoxSum) {
  auto lat = lattice::from_basis({{1, 0}, {0, 1}});
  auto p = radial::make_profile("gaussian:sigma=0.3", 2, 1.0);
  DualSampleEstimator est(lat, *p, 40000, 3);
  const int R = static_cast<int>(std::ceil(p->r_hi())) + 1;
  for (lattice::Vec t : {lattice::Vec{0.1, 0.0}, lattice::Vec{0.25, 0.3}, lattice::Vec{0.5, 0.5}}) {
    double s = 0, z = 0;
    for (int i = -R; i <= R; ++i)
      for (int j = -R; j <= R; ++j) {
        double r = std::hypot(i, j);
        if (r > p->r_hi() || r < p->r_lo()) continue;
        double f = r == 0 ? p->f0(p->r_hi() * 1e-12) : p->f0(r);
        s += f * f * std::cos(2 * kPi * (i * t[0] + j * t[1]));
        z += f * f;
      }
    EXPECT_NEAR(est.exact(t), s / z, 1e-12);
    auto e = est.estimate(t);
    EXPECT_NEAR(e.value, s / z, 4 * e.stderr_ + 1e-12);
    lattice::Vec shifted = {t[0] + 3, t[1] - 2};
    EXPECT_NEAR(est.exact(shifted), est.exact(t), 1e-9);
    EXPECT_NEAR(est.exact({-t[0], -t[1]}), est.exact(t), 1e-12);
  }
}

TEST(DualSamples, Limits) {
  auto p4 = radial::make_profile("gaussian:sigma=0.1", 4, 1.0);
  EXPECT_THROW(DualSampleEstimator(lattice::random_lattice(4, 1), *p4, 10, 1), Error);
  auto p2 = radial::make_profile("gaussian:sigma=0.1", 2, 1.0);
  EXPECT_THROW(DualSampleEstimator(lattice::random_lattice(3, 1), *p2, 10, 1), Error);
  EXPECT_THROW(DualSampleEstimator(lattice::random_lattice(2, 1), *p2, 0, 1), Error);
}

TEST(Ascent, StartsAtLatticePoint) {
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(2, 5));
  auto p = radial::make_profile("gaussian:sigma=0.1", 2, 1.0);
  DualSampleEstimator est(lat, *p, 2000, 1);
  auto v = lat.point(lattice::Coeffs{2, -1});
  auto res = gradient_ascent_bdd(lat, [&](const lattice::Vec& x) { return est.estimate(x).value; }, v);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.point.coeffs, (lattice::Coeffs{2, -1}));
  EXPECT_LE(norm({res.final_position[0] - v[0], res.final_position[1] - v[1]}), 1e-4);
}

TEST(Ascent, ClimbsAQuadraticToItsPeak) {
  auto lat = lattice::from_basis({{1, 0}, {0, 1}});
  lattice::Vec peak = {3.0, -2.0};
  auto f = [&](const lattice::Vec& x) { return -std::pow(x[0] - peak[0], 2) - std::pow(x[1] - peak[1], 2); };
  auto res = gradient_ascent_bdd(lat, f, {2.7, -2.2});
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.point.coeffs, (lattice::Coeffs{3, -2}));
  EXPECT_NEAR(res.final_position[0], 3.0, 1e-5);
  for (size_t i = 1; i < res.trace.size(); ++i) EXPECT_GT(res.trace[i], res.trace[i - 1]);
  EXPECT_THROW(gradient_ascent_bdd(lattice::random_lattice(5, 1), f, lattice::Vec(5, 0.0)), Error);
}

// The net point nearest the projection of x = 0 lies within sqrt(d^2 + r^2/8) of it, so every trial whose b
// is within sqrt(7/8) r of x must succeed while r < lambda_1 / 2.
TEST(Erasure, SuccessBoundedBelowByLineDistance) {
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(2, 12));
  auto p = radial::make_profile("gaussian:sigma=0.03", 2, 1.0);
  std::vector<double> radii = {0.01, 0.02, 0.05, 0.1, 0.2, 0.45};
  ErasureConfig cfg;
  cfg.side = 128;
  cfg.trials = 400;
  cfg.seed = 3;
  auto run = simulate_index_erasure(lat, *p, discrete::DiscreteFrame::standard(), radii, cfg);
  ASSERT_EQ(run.points.size(), radii.size());
  ASSERT_EQ(run.b_distance.size(), 400u);
  for (auto& pt : run.points) {
    size_t near = 0;
    for (double d : run.b_distance) near += d <= std::sqrt(7.0 / 8.0) * pt.r && d <= run.tau;
    EXPECT_GE(pt.successes, near) << pt.r;
    EXPECT_DOUBLE_EQ(pt.probability, pt.successes / 400.0);
  }
  for (size_t i = 1; i < run.points.size(); ++i) {
    double se = std::hypot(run.points[i].stderr_, run.points[i - 1].stderr_);
    EXPECT_GE(run.points[i].probability, run.points[i - 1].probability - 3 * se);
  }
  EXPECT_GE(run.points.back().probability, 0.95);
  EXPECT_GT(run.mean_sq_distance, 0.0);
}

TEST(Erasure, Preconditions) {
  auto lat = lattice::normalize_lambda1(lattice::random_lattice(2, 12));
  auto p = radial::make_profile("gaussian:sigma=0.03", 2, 1.0);
  ErasureConfig cfg;
  cfg.side = 64;
  cfg.trials = 10;
  cfg.cell = 1.0 / 64;  // box of width 1 does not fit in the Voronoi cell
  EXPECT_THROW(simulate_index_erasure(lat, *p, discrete::DiscreteFrame::standard(), {0.1}, cfg), Error);
  cfg.cell = 0;
  EXPECT_THROW(simulate_index_erasure(lat, *p, discrete::DiscreteFrame::standard(), {-0.1}, cfg), Error);
  auto p3 = radial::make_profile("gaussian:sigma=0.03", 3, 1.0);
  EXPECT_THROW(simulate_index_erasure(lat, *p3, discrete::DiscreteFrame::standard(), {0.1}, cfg), Error);
}
