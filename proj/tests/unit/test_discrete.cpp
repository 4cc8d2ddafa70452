#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "curvelab/curvelet.hpp"
#include "curvelab/discrete_oracle.hpp"
#include "curvelab/errors.hpp"

using namespace curvelab;
using namespace curvelab::discrete;

namespace {
constexpr double kPi = std::numbers::pi;

double diff_norm_sq(const GridState& a, const GridState& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += std::norm(a.amplitudes[k] - b.amplitudes[k]);
  return s;
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }
}  // namespace

TEST(Grid, GeometryAndValidation) {
  auto s = zero_state(2, 8, 0.5);
  EXPECT_EQ(s.size(), 64u);
  EXPECT_DOUBLE_EQ(s.coord(7), -0.5);
  EXPECT_DOUBLE_EQ(s.coord(3), 1.5);
  EXPECT_DOUBLE_EQ(s.freq(5), -3.0 / 4.0);
  EXPECT_THROW(zero_state(3, 8, 1.0), Error);
  EXPECT_THROW(zero_state(2, 7, 1.0), Error);
  EXPECT_THROW(zero_state(2, 8, 0.0), Error);
  EXPECT_THROW(s.normalize(), Error);
}

TEST(Transform, OneDimensionalPlancherel) {
  auto s = random_band_limited(1, 256, 1.0 / 64, 1.0, 25.0, 3);
  EXPECT_NEAR(s.norm_sq(), 1.0, 1e-12);
  auto c = discrete_curvelet(s, DiscreteFrame::standard());
  EXPECT_NEAR(c.norm_sq(), 1.0, 1e-8);
  for (auto& sl : c.slices) EXPECT_EQ(sl.info.direction_count, 2);
  EXPECT_GE(fidelity(s, inverse_discrete_curvelet(c)), 1 - 1e-10);
}

TEST(Transform, TwoDimensionalIsometryAndReconstruction) {
  auto s = random_band_limited(2, 64, 1.0 / 64, 1.0, 20.0, 11);
  auto c = discrete_curvelet(s, DiscreteFrame::standard());
  EXPECT_NEAR(c.norm_sq(), 1.0, 1e-8);
  EXPECT_GE(c.column_defect, 0.0);
  auto back = inverse_discrete_curvelet(c);
  EXPECT_GE(fidelity(s, back), 1 - 1e-6);
  EXPECT_LE(diff_norm_sq(s, back), 1e-12);
  auto streamed = roundtrip_streaming(s, DiscreteFrame::standard());
  EXPECT_LE(diff_norm_sq(back, streamed), 1e-20);
}

TEST(Transform, SubCutoffEnergyIsLost) {
  const double eps = 0.01;
  auto band = random_band_limited(2, 64, 1.0 / 64, 2.0, 20.0, 5);
  // the only frequencies below |k| = 1 on this grid are k = 0 and its neighbours
  auto low = make_spectral_state(2, 64, 1.0 / 64, [](double kx, double ky) {
    return std::hypot(kx, ky) < 1.0 ? std::complex<double>(1.0, 0.0) : std::complex<double>(0.0, 0.0);
  });
  GridState mix = band;
  for (size_t k = 0; k < mix.size(); ++k)
    mix.amplitudes[k] = std::sqrt(1 - eps) * band.amplitudes[k] + std::sqrt(eps) * low.amplitudes[k];
  auto back = roundtrip_streaming(mix, DiscreteFrame::standard());
  EXPECT_NEAR(diff_norm_sq(mix, back), eps, 1e-9);
}

TEST(Transform, ZeroStateMapsToZero) {
  auto z = zero_state(2, 32, 1.0 / 32);
  auto c = discrete_curvelet(z, DiscreteFrame::standard());
  EXPECT_TRUE(c.slices.empty());
  auto back = inverse_discrete_curvelet(c);
  EXPECT_EQ(back.norm_sq(), 0.0);
  EXPECT_EQ(back.size(), z.size());
}

// scale stage then direction stage equals the fused transform coefficient by coefficient
TEST(Transform, FactorisesIntoScaleAndDirection) {
  auto s = random_band_limited(2, 32, 1.0 / 32, 1.0, 12.0, 2);
  Transform t(2, 32, 1.0 / 32, DiscreteFrame::standard());
  std::vector<std::vector<cplx>> fused, staged;
  t.for_each_slice(s, [&](const SliceInfo&, const std::vector<cplx>& c) { fused.push_back(c); }, true);
  t.for_each_slice(s, [&](const SliceInfo&, const std::vector<cplx>& c) { staged.push_back(c); }, false);
  ASSERT_EQ(fused.size(), staged.size());
  double worst = 0.0;
  for (size_t i = 0; i < fused.size(); ++i)
    for (size_t k = 0; k < fused[i].size(); ++k) worst = std::max(worst, std::abs(fused[i][k] - staged[i][k]));
  EXPECT_LE(worst, 1e-10);
}

TEST(Transform, DirectionCountFollowsScale) {
  Transform t(2, 64, 1.0 / 64, DiscreteFrame::standard());
  for (int j = 0; j < t.scale_count(); ++j)
    EXPECT_EQ(t.direction_count(j), static_cast<int>(std::ceil(2 * kPi / std::sqrt(t.scale(j)))));
}

TEST(RadialState, AliasingIsReported) {
  auto p = radial::make_profile("gaussian:sigma=0.01", 2, 1.0);
  EXPECT_THROW(make_radial_state(*p, 64, 1.0 / 64), Error);
  try {
    make_radial_state(*p, 64, 1.0 / 64);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::aliasing);
  }
  auto p3 = radial::make_profile("gaussian:sigma=0.1", 3, 1.0);
  EXPECT_THROW(make_radial_state(*p3, 64, 1.0 / 64), Error);
}

// Per-scale mass of a radial state against the continuous single-scale mass. The shell keeps its spectrum
// away from the cutoff, where a coarse frequency grid resolves thin annuli poorly.
TEST(RadialState, ScaleMassMatchesContinuous) {
  const int side = 128;
  const double cell = 3.0 / side;
  auto p = radial::make_profile("shell:r1=4,r2=15", 2, 1.0);
  auto frame = windows::make_default_frame(2);
  auto s = make_radial_state(*p, side, cell);
  auto m = scale_moments(s, DiscreteFrame::standard());
  EXPECT_NEAR(m.total_mass, 1.0, 1e-6);
  int checked = 0;
  for (size_t j = 0; j < m.a.size(); ++j) {
    double cont = 0.125 * curvelet::single_scale_mass(*p, frame, m.a[j]);
    if (m.mass[j] < 1e-3) {
      EXPECT_LT(cont, 2e-3) << m.a[j];
      continue;
    }
    ++checked;
    EXPECT_NEAR(m.mass[j], cont, 0.02 * cont) << m.a[j];
  }
  EXPECT_GT(checked, 10);
}

TEST(Sampling, SingleCoefficientIsCertain) {
  CurveletCoefficients c;
  c.n = 2;
  c.side = 8;
  c.cell = 0.25;
  Slice sl;
  sl.info.scale_index = 3;
  sl.info.a = 0.5;
  sl.info.direction_index = 2;
  sl.info.theta = {0.0, 1.0};
  sl.data.assign(64, cplx(0.0, 0.0));
  sl.data[2 * 8 + 5] = cplx(0.6, 0.8);
  c.slices.push_back(sl);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    auto x = sample_abtheta(c, seed);
    EXPECT_EQ(x.scale_index, 3);
    EXPECT_EQ(x.direction_index, 2);
    EXPECT_DOUBLE_EQ(x.b[0], 0.5);
    EXPECT_DOUBLE_EQ(x.b[1], -0.75);
    EXPECT_DOUBLE_EQ(x.sq_dist(), 0.25);
  }
  EXPECT_THROW(sample_abtheta(CurveletCoefficients{}, 1), Error);
}

TEST(Sampling, SeedRepeatability) {
  auto s = random_band_limited(2, 32, 1.0 / 32, 1.0, 12.0, 8);
  auto c = discrete_curvelet(s, DiscreteFrame::standard());
  auto a = sample_many(c, 500, 42), b = sample_many(c, 500, 42), d = sample_many(c, 500, 43);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].scale_index, b[i].scale_index);
    EXPECT_EQ(a[i].direction_index, b[i].direction_index);
    EXPECT_EQ(a[i].b, b[i].b);
    differs = differs || a[i].b != d[i].b || a[i].scale_index != d[i].scale_index;
  }
  EXPECT_TRUE(differs);
  auto st = sample_streaming(s, DiscreteFrame::standard(), 500, 42);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].scale_index, st[i].scale_index);
    EXPECT_EQ(a[i].b, st[i].b);
  }
}

// Empirical mean of b^T (I - theta theta^T) b over 10^5 draws against exhaustive summation.
TEST(Sampling, EmpiricalDistanceWithinThreeSigma) {
  const int side = 64;
  auto p = radial::make_profile("gaussian:sigma=0.05", 2, 1.0);
  auto s = make_radial_state(*p, side, 1.0 / side);
  auto m = scale_moments(s, DiscreteFrame::standard());
  double exact = 0.0;
  for (double v : m.sq_dist) exact += v;
  exact /= m.total_mass;
  auto draws = sample_streaming(s, DiscreteFrame::standard(), 100000, 7);
  double sum = 0.0, sum2 = 0.0;
  for (auto& d : draws) {
    double v = d.sq_dist();
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / draws.size();
  double sd = std::sqrt((sum2 / draws.size() - mean * mean) / draws.size());
  EXPECT_NEAR(mean, exact, 3 * sd);
}

TEST(BinaryIO, RoundTripAndLayout) {
  auto s = random_band_limited(2, 16, 0.125, 1.0, 3.0, 4);
  auto path = temp_file("curvelab_grid.bin");
  write_state(s, path.string());
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 16u * 16u * 16u);
  auto r = read_state(path.string());
  EXPECT_EQ(r.n, 2);
  EXPECT_EQ(r.side, 16);
  EXPECT_EQ(r.cell, 0.125);
  EXPECT_EQ(r.amplitudes, s.amplitudes);

  std::ifstream in(path, std::ios::binary);
  unsigned char head[16];
  in.read(reinterpret_cast<char*>(head), 16);
  EXPECT_EQ(head[0], 2);
  EXPECT_EQ(head[1] | head[2] | head[3], 0);
  EXPECT_EQ(head[4], 16);
  // 0.125 = 0x3FC0000000000000, little-endian
  EXPECT_EQ(head[15], 0x3F);
  EXPECT_EQ(head[14], 0xC0);
  in.close();

  std::filesystem::resize_file(path, 100);
  EXPECT_THROW(read_state(path.string()), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(read_state("/nonexistent/grid.bin"), Error);
}
