#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "curvelab/curvelet.hpp"
#include "curvelab/errors.hpp"
#include "curvelab/radialfn.hpp"
#include "curvelab/windows.hpp"

using namespace curvelab;
using namespace curvelab::radial;

namespace {
constexpr double kPi = std::numbers::pi;

template <class F>
double simpson(F&& f, double lo, double hi, int panels) {
  double h = (hi - lo) / panels, s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

// normalised radial density of the shell profile, sin^4 bump on [r1, r2]
double shell_density(double r, double r1, double r2) {
  if (r < r1 || r > r2) return 0.0;
  double s = std::sin(kPi * (r - r1) / (r2 - r1));
  return s * s * s * s / (0.375 * (r2 - r1));
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }
}  // namespace

TEST(ProfileSpec, ParseAndPrint) {
  auto s = ProfileSpec::parse("gaussian:sigma=0.04,cutoff=1.5");
  EXPECT_EQ(s.kind, "gaussian");
  EXPECT_DOUBLE_EQ(s.get("sigma", 0), 0.04);
  EXPECT_DOUBLE_EQ(s.get("missing", 7), 7.0);
  auto again = ProfileSpec::parse(s.to_string());
  EXPECT_EQ(again.params, s.params);
  EXPECT_THROW(ProfileSpec::parse("gaussian:sigma"), Error);
  EXPECT_THROW(ProfileSpec::parse("gaussian:sigma=abc"), Error);
  EXPECT_THROW(make_profile("nosuch:x=1", 4, 1.0), Error);
  EXPECT_THROW(make_profile("gaussian:sigma=-1", 4, 1.0), Error);
  EXPECT_THROW(make_profile("shell:r1=3,r2=2", 4, 1.0), Error);
  EXPECT_THROW(make_profile("shell:r1=0.1,r2=0.5", 4, 1.0), Error);  // nothing above the cutoff
}

TEST(RadialProfile, NormalisedWithCutoffEnforced) {
  for (const char* d : {"gaussian:sigma=0.04", "shell:r1=2,r2=5", "single_scale:a0=0.1", "two_scale:a1=0.02,a2=0.05",
                        "ball:R=0.2"}) {
    auto p = make_profile(d, 16, 1.0);
    EXPECT_NEAR(p->l2_norm_sq(), 1.0, 1e-10) << d;
    EXPECT_GE(p->r_lo(), 1.0 - 1e-15) << d;
    EXPECT_EQ(p->f0(0.5 * p->cutoff()), 0.0) << d;
    double direct = 0.0;
    const auto& k = p->knots();
    for (size_t i = 0; i + 1 < k.size(); ++i)
      direct += simpson([&](double r) { return p->density(r); }, k[i], k[i + 1], 20000);
    EXPECT_NEAR(direct + p->tail_mass(), 1.0, 1e-6) << d;
  }
  auto g = make_profile("gaussian:sigma=0.5", 4, 1.0);
  EXPECT_GT(g->truncated_mass(), 0.1);  // a wide Gaussian loses its low frequencies
}

// Plancherel: the frequency-side norm of the bare indicator equals the ball volume.
TEST(RadialProfile, BallNormMatchesVolume) {
  for (int n : {2, 3, 4}) {
    double R = 0.25;
    auto p = make_profile("ball:R=0.25,taper=0,cutoff=0", n, 1.0);
    double vol = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1) * std::pow(R, n);
    EXPECT_NEAR(p->raw_norm_sq(), vol, 1e-6 * vol) << n;
  }
}

TEST(RadialProfile, F0MatchesGaussianFormula) {
  auto p = make_profile("gaussian:sigma=0.1", 3, 1.0);
  double r1 = 3.0, r2 = 7.0;
  EXPECT_NEAR(p->f0(r2) / p->f0(r1), std::exp(-kPi * 0.01 * (r2 * r2 - r1 * r1)), 1e-12);
}

TEST(RadialProfile, TableRoundTrip) {
  auto g = make_profile("gaussian:sigma=0.1", 3, 1.0);
  auto path = std::filesystem::temp_directory_path() / "curvelab_profile_table.txt";
  {
    std::ofstream out(path);
    out << "# r F0\n";
    for (int i = 0; i <= 2000; ++i) {
      double r = g->r_lo() + (g->r_hi() - g->r_lo()) * i / 2000.0;
      char line[80];
      std::snprintf(line, sizeof line, "%.17g %.17g\n", r, g->f0(r));
      out << line;
    }
  }
  auto t = make_profile("table:file=" + path.string(), 3, 1.0);
  for (double r : {2.0, 5.0, 9.0}) EXPECT_NEAR(t->amp(r), g->amp(r), 1e-6) << r;
  EXPECT_THROW(make_profile("table:file=/nonexistent/table.txt", 3, 1.0), Error);
  std::filesystem::remove(path);
}

TEST(SupportRadius, GaussianMatchesChiQuantile) {
  for (int n : {2, 5, 8}) {
    double sigma = 0.1;
    auto p = make_profile("gaussian:sigma=0.1,cutoff=0", n, 1.0);
    // |f(x)|^2 is Gaussian with per-axis variance sigma^2 / (4 pi)
    boost::math::chi_squared chi(n);
    double want = sigma / std::sqrt(4 * kPi) * std::sqrt(quantile(chi, 0.99));
    EXPECT_NEAR(support_radius(*p, 0.01), want, 0.02 * want) << n;
  }
}

TEST(SupportRadius, LimitsAndBall) {
  auto g = make_profile("gaussian:sigma=0.1,cutoff=0", 3, 1.0);
  double mid = support_radius(*g, 0.5);
  EXPECT_LT(support_radius(*g, 1 - 1e-6), 0.02 * mid);
  EXPECT_LT(support_radius(*g, 0.9), mid);
  EXPECT_THROW(support_radius(*g, 0.0), Error);
  EXPECT_THROW(support_radius(*g, 1.0), Error);

  auto ball = make_profile("ball:R=0.25,taper=0,cutoff=0", 3, 1.0);
  for (double delta : {0.3, 0.05, 0.01}) EXPECT_LE(support_radius(*ball, delta), 0.25) << delta;
  EXPECT_NEAR(support_radius(*ball, 0.5), 0.25 * std::cbrt(0.5), 2e-3);
}

TEST(Autocorrelation, OriginIsPlancherelNorm) {
  for (const char* d : {"gaussian:sigma=0.04", "shell:r1=2,r2=5", "ball:R=0.2"}) {
    auto p = make_profile(d, 8, 1.0);
    EXPECT_NEAR(autocorrelation_exact(*p, 0.0), 1.0, 1e-10) << d;
    EXPECT_NEAR(autocorrelation_exact(*p, 1e-9), 1.0, 1e-8) << d;
  }
  EXPECT_THROW(autocorrelation_exact(*make_profile("gaussian:sigma=0.04", 8, 1.0), -1.0), Error);
}

TEST(Autocorrelation, ShellAtNThreeIsSincAverage) {
  double r1 = 10.0, r2 = 10.2;
  auto p = make_profile("shell:r1=10,r2=10.2", 3, 1.0);
  for (double s : {0.01, 0.1, 0.37, 1.0, 3.0}) {
    double want = simpson([&](double r) { return shell_density(r, r1, r2) * sinc(2 * kPi * s * r); }, r1, r2, 20000);
    EXPECT_NEAR(autocorrelation_exact(*p, s), want, 1e-8) << s;
  }
  auto thin = make_profile("shell:r1=10,r2=10.001", 3, 1.0);
  for (double s : {0.05, 0.2, 0.5}) EXPECT_NEAR(autocorrelation_exact(*thin, s), sinc(2 * kPi * s * 10.0005), 1e-4) << s;
}

TEST(Autocorrelation, BoundedByOne) {
  for (const char* d : {"gaussian:sigma=0.02", "shell:r1=3,r2=4", "two_scale:a1=0.05,a2=0.2", "ball:R=0.2"}) {
    auto p = make_profile(d, 6, 1.0);
    for (int i = 0; i < 60; ++i) {
      double s = 0.01 * std::pow(1.1, i);
      double z = autocorrelation_exact(*p, s);
      EXPECT_LE(std::fabs(z), 1.0 + 1e-8) << d << " " << s;
    }
  }
}

// Normalised intersection volume of two 4-balls by Monte Carlo.
TEST(Autocorrelation, BallMatchesIntersectionVolume) {
  const double R = 0.25;
  auto p = make_profile("ball:R=0.25,taper=0,cutoff=0", 4, 1.0);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  const int N = 1000000;
  for (double s : {0.1, 0.25, 0.4}) {
    int inside = 0;
    for (int i = 0; i < N; ++i) {
      double x[4], norm = 0;
      for (double& c : x) {
        c = gauss(rng);
        norm += c * c;
      }
      double rad = R * std::pow(unif(rng), 0.25) / std::sqrt(norm);
      double d2 = 0;
      for (int k = 0; k < 4; ++k) {
        double c = x[k] * rad - (k == 0 ? s : 0.0);
        d2 += c * c;
      }
      inside += d2 <= R * R;
    }
    double phat = static_cast<double>(inside) / N;
    double sd = std::sqrt(phat * (1 - phat) / N);
    EXPECT_NEAR(autocorrelation_exact(*p, s), phat, 3 * sd) << s;
  }
}

TEST(Autocorrelation, BallSupportDoubles) {
  auto p = make_profile("ball:R=0.25,taper=0,cutoff=0,zmax=20000", 3, 1.0);
  for (double s : {0.55, 0.7, 1.0, 1.6}) EXPECT_NEAR(autocorrelation_exact(*p, s), 0.0, 1e-6) << s;
}

TEST(Mixture, OriginAndSingleScaleReduction) {
  auto frame = windows::make_default_frame(12);
  auto p = make_profile("single_scale:a0=0.05", 12, 1.0);
  auto d = curvelet::scale_weights(p, frame);
  EXPECT_NEAR(autocorrelation_gaussian_mixture(d, 0.0).value, 1.0, 1e-9);
  for (double s : {0.1, 0.4, 1.0}) {
    double c = 2 * kPi * kPi * s * s / 10.0;
    double want = simpson([&](double r) { return p->density(r) * std::exp(-c * r * r); }, p->r_lo(), p->r_hi(), 20000);
    auto m = autocorrelation_gaussian_mixture(d, s);
    EXPECT_NEAR(m.value, want, 1e-9) << s;
    EXPECT_EQ(m.valid, s * p->r_hi() < 12);
  }
}

// The mixture gap at small shifts shrinks as n grows for a matched Gaussian family.
TEST(Mixture, GapShrinksWithDimension) {
  auto gap = [](int n) {
    auto frame = windows::make_default_frame(n);
    auto p = make_profile("gaussian:sigma=0.04", n, 1.0);
    auto d = curvelet::scale_weights(p, frame);
    double worst = 0.0;
    for (double s : {0.02, 0.05, 0.1}) {
      double exact = autocorrelation_exact(*p, s);
      worst = std::max(worst, std::fabs(exact - autocorrelation_gaussian_mixture(d, s).value));
    }
    return worst;
  };
  EXPECT_LT(gap(64), gap(16));
}

TEST(Dilation, SpatialRadiusScales) {
  auto p = make_profile("gaussian:sigma=0.1,cutoff=0", 4, 1.0);
  auto q = dilate(p, 2.0, 1.0);
  EXPECT_NEAR(q->l2_norm_sq(), 1.0, 1e-10);
  EXPECT_NEAR(support_radius(*q, 0.05), 2.0 * support_radius(*p, 0.05), 1e-4);
  EXPECT_NEAR(autocorrelation_exact(*q, 0.3), autocorrelation_exact(*p, 0.15), 1e-8);
}
