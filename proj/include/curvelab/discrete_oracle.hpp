#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "curvelab/radialfn.hpp"
#include "curvelab/windows.hpp"

namespace curvelab::discrete {

using cplx = std::complex<double>;

struct GridState {
  int n = 2;
  int side = 0;
  double cell = 1.0;
  std::vector<cplx> amplitudes;  // row-major, index 0 is the origin of the torus

  size_t size() const { return amplitudes.size(); }
  double norm_sq() const;
  void normalize();
  // minimal-image coordinate of grid index i along one axis
  double coord(int i) const { return ((i + side / 2) % side - side / 2) * cell; }
  double freq(int m) const { return ((m + side / 2) % side - side / 2) / (side * cell); }
};

GridState zero_state(int n, int side, double cell);

// Radial profile centred at the origin, sampled in frequency; fails if more than 1e-6 of the
// profile's mass lies beyond the grid Nyquist radius.
GridState make_radial_state(const radial::RadialProfile& profile, int side, double cell);

// Spectrum given as a function of the frequency vector (ky = 0 at n = 1); normalised afterwards.
GridState make_spectral_state(int n, int side, double cell, const std::function<cplx(double, double)>& spectrum);

// Random complex spectrum supported on kmin <= |k| <= kmax.
GridState random_band_limited(int n, int side, double cell, double kmin, double kmax, std::uint64_t seed);

double fidelity(const GridState& a, const GridState& b);  // |<a|b>|

void write_state(const GridState& s, const std::string& path);
GridState read_state(const std::string& path);

struct DiscreteFrame {
  double lambda = 1.0;
  std::shared_ptr<const windows::RadialWindow> radial;
  std::shared_ptr<const windows::AngularWindow> angular;
  double bin_width = 0.125;
  int scale_count = 0;           // 0: cover the grid's frequency range
  int direction_oversample = 1;  // multiplies ceil(2 pi / sqrt(a)) at n = 2

  static DiscreteFrame from(const windows::FrameConstants& frame);
  static DiscreteFrame standard(double lambda = 1.0);
};

struct SliceInfo {
  int scale_index = 0;
  double a = 0.0;
  int direction_index = 0;
  int direction_count = 1;
  std::array<double, 2> theta{1.0, 0.0};
};

struct Slice {
  SliceInfo info;
  std::vector<cplx> data;
};

struct CurveletCoefficients {
  int n = 2, side = 0;
  double cell = 1.0;
  DiscreteFrame frame;
  std::vector<Slice> slices;
  double column_defect = 0.0;  // max |sum_a W_{k,a}^2 - 1| before renormalisation
  double norm_sq() const;
};

// Precomputed windows for one state geometry.
class Transform {
 public:
  Transform(int n, int side, double cell, DiscreteFrame frame);

  int n() const { return n_; }
  int side() const { return side_; }
  double cell() const { return cell_; }
  int scale_count() const { return static_cast<int>(scales_.size()); }
  double scale(int j) const { return scales_[j]; }
  int direction_count(int j) const;
  SliceInfo slice_info(int j, int l) const;
  double column_defect() const { return column_defect_; }
  bool admitted(size_t k) const { return admitted_[k]; }

  // windowed spectrum of one slice, W~ V~ times the input spectrum
  void slice_spectrum(const std::vector<cplx>& spectrum, int j, int l, std::vector<cplx>& out) const;
  // scale stage only: W~_{k,a_j} times the spectrum
  void scale_stage(const std::vector<cplx>& spectrum, int j, std::vector<cplx>& out) const;
  // direction stage applied to a scale-stage output
  void direction_stage(const std::vector<cplx>& scaled, int j, int l, std::vector<cplx>& out) const;

  void forward_fft(std::vector<cplx>& data) const;
  void inverse_fft(std::vector<cplx>& data) const;

  // visits every slice with nonzero spectral energy; fn receives the spatial coefficient array
  void for_each_slice(const GridState& state, const std::function<void(const SliceInfo&, const std::vector<cplx>&)>& fn,
                      bool fused = true) const;

 private:
  double angular_weight(size_t k, int j, int l) const;
  int n_, side_;
  double cell_;
  DiscreteFrame frame_;
  std::vector<double> scales_;
  std::vector<int> dir_counts_;
  std::vector<double> psi_;  // polar angle of each frequency (n = 2)
  std::vector<std::vector<double>> wcol_;   // per scale: normalised W over k
  std::vector<std::vector<double>> vnorm_;  // per scale: 1/sqrt(sum_theta V^2) over k (n = 2)
  std::vector<double> kx_, ky_, kabs_;
  std::vector<char> admitted_;
  double column_defect_ = 0.0;
  struct Plans;
  std::shared_ptr<Plans> plans_;
};

CurveletCoefficients discrete_curvelet(const GridState& state, const DiscreteFrame& frame);
GridState inverse_discrete_curvelet(const CurveletCoefficients& coeffs);

// Forward transform slice by slice, then the adjoint, accumulated without storing all slices.
GridState roundtrip_streaming(const GridState& state, const DiscreteFrame& frame);

struct ScaleMoments {
  std::vector<double> a;
  std::vector<double> mass;       // sum over theta, b of |c|^2
  std::vector<double> sq_dist;    // sum of |c|^2 b^T (I - theta theta^T) b
  std::vector<double> x_second;   // sum of |c|^2 |b|^2
  double total_mass = 0.0;
  double column_defect = 0.0;
};

ScaleMoments scale_moments(const GridState& state, const DiscreteFrame& frame);

struct Sample {
  int scale_index = 0;
  double a = 0.0;
  int direction_index = 0;
  std::array<double, 2> theta{1.0, 0.0};
  std::array<double, 2> b{0.0, 0.0};
  double sq_dist() const;
};

Sample sample_abtheta(const CurveletCoefficients& coeffs, std::uint64_t seed);
std::vector<Sample> sample_many(const CurveletCoefficients& coeffs, size_t count, std::uint64_t seed);
// Two passes over the slices; never holds more than one coefficient array.
std::vector<Sample> sample_streaming(const GridState& state, const DiscreteFrame& frame, size_t count,
                                     std::uint64_t seed);

}  // namespace curvelab::discrete
