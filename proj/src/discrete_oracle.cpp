#include "curvelab/discrete_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "curvelab/errors.hpp"

namespace curvelab::discrete {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_geometry(int n, int side, double cell) {
  if (n != 1 && n != 2) fail(ErrorCode::domain, "discrete grids support n = 1 or 2 only");
  if (side < 2 || side % 2 != 0) fail(ErrorCode::domain, "grid side must be even and >= 2");
  if (!(cell > 0.0) || !std::isfinite(cell)) fail(ErrorCode::domain, "grid cell must be positive");
}

size_t grid_size(int n, int side) { return n == 1 ? static_cast<size_t>(side) : static_cast<size_t>(side) * side; }

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2 * kPi);
  if (x < 0) x += 2 * kPi;
  return x - kPi;
}

void put_u32(std::ostream& o, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  o.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& o, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  o.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) fail(ErrorCode::io, "grid file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) fail(ErrorCode::io, "grid file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

double GridState::norm_sq() const {
  double s = 0.0;
  for (auto& c : amplitudes) s += std::norm(c);
  return s;
}

void GridState::normalize() {
  double s = norm_sq();
  if (!(s > 0.0)) fail(ErrorCode::degenerate, "cannot normalise the zero state");
  double f = 1.0 / std::sqrt(s);
  for (auto& c : amplitudes) c *= f;
}

GridState zero_state(int n, int side, double cell) {
  check_geometry(n, side, cell);
  GridState s;
  s.n = n;
  s.side = side;
  s.cell = cell;
  s.amplitudes.assign(grid_size(n, side), cplx(0.0, 0.0));
  return s;
}

double fidelity(const GridState& a, const GridState& b) {
  if (a.size() != b.size()) fail(ErrorCode::domain, "fidelity: grid sizes differ");
  cplx s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return std::abs(s);
}

// ---------------------------------------------------------------------------

struct Transform::Plans {
  fftw_plan fwd = nullptr, inv = nullptr;
  size_t size = 0;
  ~Plans() {
    std::lock_guard<std::mutex> g(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

Transform::Transform(int n, int side, double cell, DiscreteFrame frame)
    : n_(n), side_(side), cell_(cell), frame_(std::move(frame)) {
  check_geometry(n, side, cell);
  if (!frame_.radial || !frame_.angular) fail(ErrorCode::construction, "discrete frame needs both windows");
  if (!(frame_.lambda > 0.0)) fail(ErrorCode::domain, "discrete frame: lambda must be positive");
  if (!(frame_.bin_width > 0.0)) fail(ErrorCode::domain, "discrete frame: bin width must be positive");
  if (frame_.direction_oversample < 1) fail(ErrorCode::domain, "direction oversampling must be >= 1");

  const size_t N = grid_size(n, side);
  kx_.resize(N);
  ky_.assign(N, 0.0);
  kabs_.resize(N);
  psi_.assign(N, 0.0);
  double kmax = 0.0;
  GridState geo;
  geo.side = side;
  geo.cell = cell;
  for (size_t k = 0; k < N; ++k) {
    int ix = n == 1 ? static_cast<int>(k) : static_cast<int>(k / side);
    int iy = n == 1 ? 0 : static_cast<int>(k % side);
    kx_[k] = geo.freq(ix);
    if (n == 2) ky_[k] = geo.freq(iy);
    kabs_[k] = std::hypot(kx_[k], ky_[k]);
    psi_[k] = std::atan2(ky_[k], kx_[k]);
    kmax = std::max(kmax, kabs_[k]);
  }

  int J = frame_.scale_count;
  const double dlt = frame_.bin_width;
  if (J <= 0) {
    double need = std::log(frame_.lambda * kmax / frame_.radial->support_lo());
    J = std::max(2, static_cast<int>(std::ceil(need / dlt)) + 2);
  }
  for (int j = 0; j < J; ++j) scales_.push_back(std::exp(-j * dlt));

  // scale columns
  wcol_.assign(J, std::vector<double>(N, 0.0));
  admitted_.assign(N, 0);
  std::vector<double> col(N, 0.0);
  for (int j = 0; j < J; ++j)
    for (size_t k = 0; k < N; ++k) {
      double w = (*frame_.radial)(frame_.lambda * scales_[j] * kabs_[k]);
      wcol_[j][k] = w;
      col[k] += w * w;
    }
  for (size_t k = 0; k < N; ++k) {
    if (kabs_[k] * frame_.lambda < 1.0 || !(col[k] > 0.0)) {
      for (int j = 0; j < J; ++j) wcol_[j][k] = 0.0;
      continue;
    }
    admitted_[k] = 1;
    column_defect_ = std::max(column_defect_, std::fabs(dlt * col[k] - 1.0));
    double f = 1.0 / std::sqrt(col[k]);
    for (int j = 0; j < J; ++j) wcol_[j][k] *= f;
  }

  // direction grids and per-(k, a) angular normalisation
  dir_counts_.resize(J);
  vnorm_.assign(J, std::vector<double>(N, 0.0));
  for (int j = 0; j < J; ++j) {
    const double a = scales_[j];
    const double sa = std::sqrt(a);
    if (n == 1) {
      dir_counts_[j] = 2;
    } else {
      dir_counts_[j] = frame_.direction_oversample * static_cast<int>(std::ceil(2 * kPi / sa));
    }
    const int L = dir_counts_[j];
    for (size_t k = 0; k < N; ++k) {
      if (wcol_[j][k] == 0.0) continue;
      double s = 0.0;
      if (n == 1) {
        double v = (*frame_.angular)(0.0);
        double vb = a < 1.0 ? 0.0 : (*frame_.angular)(1.0 / sa);
        s = v * v + vb * vb;
      } else {
        double half = std::asin(std::min(1.0, windows::kAlpha * sa));
        int l0 = static_cast<int>(std::floor((psi_[k] - half) * L / (2 * kPi))) - 1;
        int l1 = static_cast<int>(std::ceil((psi_[k] + half) * L / (2 * kPi))) + 1;
        for (int l = l0; l <= l1; ++l) {
          double phi = wrap_angle(psi_[k] - 2 * kPi * l / L);
          if (std::fabs(phi) >= kPi / 2) continue;
          double v = (*frame_.angular)(std::fabs(std::sin(phi)) / sa);
          s += v * v;
        }
      }
      if (!(s > 0.0)) fail(ErrorCode::numerical, "direction grid leaves a frequency without angular weight");
      vnorm_[j][k] = 1.0 / std::sqrt(s);
    }
  }

  plans_ = std::make_shared<Plans>();
  plans_->size = N;
  std::vector<cplx> tmp(N);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  std::lock_guard<std::mutex> g(planner_mutex());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (n == 1) {
    plans_->fwd = fftw_plan_dft_1d(side, p, p, FFTW_FORWARD, flags);
    plans_->inv = fftw_plan_dft_1d(side, p, p, FFTW_BACKWARD, flags);
  } else {
    plans_->fwd = fftw_plan_dft_2d(side, side, p, p, FFTW_FORWARD, flags);
    plans_->inv = fftw_plan_dft_2d(side, side, p, p, FFTW_BACKWARD, flags);
  }
  if (!plans_->fwd || !plans_->inv) fail(ErrorCode::construction, "FFT planning failed");
}

int Transform::direction_count(int j) const { return dir_counts_.at(j); }

SliceInfo Transform::slice_info(int j, int l) const {
  SliceInfo s;
  s.scale_index = j;
  s.a = scales_.at(j);
  s.direction_index = l;
  s.direction_count = dir_counts_[j];
  if (n_ == 1) {
    s.theta = {l == 0 ? 1.0 : -1.0, 0.0};
  } else {
    double t = 2 * kPi * l / dir_counts_[j];
    s.theta = {std::cos(t), std::sin(t)};
  }
  return s;
}

double Transform::angular_weight(size_t k, int j, int l) const {
  const double sa = std::sqrt(scales_[j]);
  double phi;
  if (n_ == 1) {
    bool pos = kx_[k] > 0.0;
    phi = (pos == (l == 0)) ? 0.0 : kPi;
    double y = phi == 0.0 ? 0.0 : (scales_[j] < 1.0 ? 2.0 : 1.0 / sa);
    return (*frame_.angular)(y) * vnorm_[j][k];
  }
  phi = wrap_angle(psi_[k] - 2 * kPi * l / dir_counts_[j]);
  if (std::fabs(phi) >= kPi / 2) return 0.0;
  return (*frame_.angular)(std::fabs(std::sin(phi)) / sa) * vnorm_[j][k];
}

void Transform::scale_stage(const std::vector<cplx>& spectrum, int j, std::vector<cplx>& out) const {
  out.resize(spectrum.size());
  const auto& w = wcol_.at(j);
  for (size_t k = 0; k < spectrum.size(); ++k) out[k] = spectrum[k] * w[k];
}

void Transform::direction_stage(const std::vector<cplx>& scaled, int j, int l, std::vector<cplx>& out) const {
  out.assign(scaled.size(), cplx(0.0, 0.0));
  const auto& w = wcol_.at(j);
  for (size_t k = 0; k < scaled.size(); ++k) {
    if (w[k] == 0.0) continue;
    double v = angular_weight(k, j, l);
    if (v != 0.0) out[k] = scaled[k] * v;
  }
}

void Transform::slice_spectrum(const std::vector<cplx>& spectrum, int j, int l, std::vector<cplx>& out) const {
  out.assign(spectrum.size(), cplx(0.0, 0.0));
  const auto& w = wcol_.at(j);
  for (size_t k = 0; k < spectrum.size(); ++k) {
    if (w[k] == 0.0) continue;
    double v = angular_weight(k, j, l);
    if (v != 0.0) out[k] = spectrum[k] * (w[k] * v);
  }
}

void Transform::forward_fft(std::vector<cplx>& data) const {
  if (data.size() != plans_->size) fail(ErrorCode::domain, "fft: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->fwd, p, p);
  double f = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& c : data) c *= f;
}

void Transform::inverse_fft(std::vector<cplx>& data) const {
  if (data.size() != plans_->size) fail(ErrorCode::domain, "fft: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->inv, p, p);
  double f = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& c : data) c *= f;
}

void Transform::for_each_slice(const GridState& state,
                               const std::function<void(const SliceInfo&, const std::vector<cplx>&)>& fn,
                               bool fused) const {
  if (state.n != n_ || state.side != side_) fail(ErrorCode::domain, "transform geometry does not match the state");
  std::vector<cplx> spec = state.amplitudes;
  forward_fft(spec);
  std::vector<cplx> scaled, out;
  for (int j = 0; j < scale_count(); ++j) {
    if (!fused) scale_stage(spec, j, scaled);
    for (int l = 0; l < dir_counts_[j]; ++l) {
      if (fused)
        slice_spectrum(spec, j, l, out);
      else
        direction_stage(scaled, j, l, out);
      double e = 0.0;
      for (auto& c : out) e += std::norm(c);
      if (!(e > 0.0)) continue;
      inverse_fft(out);
      fn(slice_info(j, l), out);
    }
  }
}

// ---------------------------------------------------------------------------

DiscreteFrame DiscreteFrame::from(const windows::FrameConstants& frame) {
  DiscreteFrame f;
  f.lambda = frame.lambda();
  f.radial = frame.radial_ptr();
  f.angular = frame.angular_ptr();
  return f;
}

DiscreteFrame DiscreteFrame::standard(double lambda) {
  DiscreteFrame f;
  f.lambda = lambda;
  f.radial = std::make_shared<windows::RadialWindow>(windows::RadialWindow::default_window());
  f.angular = std::make_shared<windows::AngularWindow>(windows::AngularWindow::default_window());
  return f;
}

GridState make_spectral_state(int n, int side, double cell, const std::function<cplx(double, double)>& spectrum) {
  GridState s = zero_state(n, side, cell);
  const size_t N = s.size();
  for (size_t k = 0; k < N; ++k) {
    int ix = n == 1 ? static_cast<int>(k) : static_cast<int>(k / side);
    int iy = n == 1 ? 0 : static_cast<int>(k % side);
    s.amplitudes[k] = spectrum(s.freq(ix), n == 1 ? 0.0 : s.freq(iy));
  }
  Transform t(n, side, cell, DiscreteFrame::standard());
  t.inverse_fft(s.amplitudes);
  s.normalize();
  return s;
}

GridState random_band_limited(int n, int side, double cell, double kmin, double kmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  return make_spectral_state(n, side, cell, [&](double kx, double ky) {
    double r = std::hypot(kx, ky);
    double re = g(rng), im = g(rng);
    return (r >= kmin && r <= kmax) ? cplx(re, im) : cplx(0.0, 0.0);
  });
}

GridState make_radial_state(const radial::RadialProfile& profile, int side, double cell) {
  if (profile.n() != 2) fail(ErrorCode::domain, "radial grid states are built at n = 2");
  const double nyq = 0.5 / cell;
  if (profile.r_hi() > nyq) {
    double lo = std::max(nyq, profile.r_lo());
    double leak = profile.integrate([&](double r) { return profile.density(r); }, lo, profile.r_hi());
    leak += profile.tail_mass();
    if (leak > 1e-6)
      fail(ErrorCode::aliasing, "profile mass beyond the grid Nyquist radius: " + std::to_string(leak));
  }
  return make_spectral_state(2, side, cell, [&](double kx, double ky) {
    double r = std::hypot(kx, ky);
    return cplx(profile.f0(r), 0.0);
  });
}

// ---------------------------------------------------------------------------

double CurveletCoefficients::norm_sq() const {
  double s = 0.0;
  for (auto& sl : slices)
    for (auto& c : sl.data) s += std::norm(c);
  return s;
}

CurveletCoefficients discrete_curvelet(const GridState& state, const DiscreteFrame& frame) {
  Transform t(state.n, state.side, state.cell, frame);
  CurveletCoefficients out;
  out.n = state.n;
  out.side = state.side;
  out.cell = state.cell;
  out.frame = frame;
  out.column_defect = t.column_defect();
  t.for_each_slice(state, [&](const SliceInfo& info, const std::vector<cplx>& c) { out.slices.push_back({info, c}); });
  return out;
}

GridState inverse_discrete_curvelet(const CurveletCoefficients& coeffs) {
  GridState res = zero_state(coeffs.n, coeffs.side, coeffs.cell);
  if (coeffs.slices.empty()) return res;
  Transform t(coeffs.n, coeffs.side, coeffs.cell, coeffs.frame);
  std::vector<cplx> acc(res.size(), cplx(0.0, 0.0)), buf, unit(res.size(), cplx(1.0, 0.0)), w;
  for (auto& sl : coeffs.slices) {
    buf = sl.data;
    t.forward_fft(buf);
    t.slice_spectrum(unit, sl.info.scale_index, sl.info.direction_index, w);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] += buf[k] * w[k].real();
  }
  t.inverse_fft(acc);
  res.amplitudes = std::move(acc);
  return res;
}

GridState roundtrip_streaming(const GridState& state, const DiscreteFrame& frame) {
  Transform t(state.n, state.side, state.cell, frame);
  GridState res = zero_state(state.n, state.side, state.cell);
  std::vector<cplx> acc(res.size(), cplx(0.0, 0.0)), buf, unit(res.size(), cplx(1.0, 0.0)), w;
  t.for_each_slice(state, [&](const SliceInfo& info, const std::vector<cplx>& c) {
    buf = c;
    t.forward_fft(buf);
    t.slice_spectrum(unit, info.scale_index, info.direction_index, w);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] += buf[k] * w[k].real();
  });
  t.inverse_fft(acc);
  res.amplitudes = std::move(acc);
  return res;
}

ScaleMoments scale_moments(const GridState& state, const DiscreteFrame& frame) {
  Transform t(state.n, state.side, state.cell, frame);
  ScaleMoments m;
  const int J = t.scale_count();
  for (int j = 0; j < J; ++j) m.a.push_back(t.scale(j));
  m.mass.assign(J, 0.0);
  m.sq_dist.assign(J, 0.0);
  m.x_second.assign(J, 0.0);
  m.column_defect = t.column_defect();
  const int side = state.side;
  std::vector<double> coord(side);
  for (int i = 0; i < side; ++i) coord[i] = state.coord(i);
  t.for_each_slice(state, [&](const SliceInfo& info, const std::vector<cplx>& c) {
    double mass = 0.0, d2 = 0.0, x2 = 0.0;
    for (size_t k = 0; k < c.size(); ++k) {
      double p = std::norm(c[k]);
      if (p == 0.0) continue;
      double bx = coord[state.n == 1 ? k : k / side];
      double by = state.n == 1 ? 0.0 : coord[k % side];
      double bb = bx * bx + by * by;
      double tb = info.theta[0] * bx + info.theta[1] * by;
      mass += p;
      x2 += p * bb;
      d2 += p * (bb - tb * tb);
    }
    m.mass[info.scale_index] += mass;
    m.sq_dist[info.scale_index] += d2;
    m.x_second[info.scale_index] += x2;
  });
  for (double v : m.mass) m.total_mass += v;
  return m;
}

// ---------------------------------------------------------------------------

double Sample::sq_dist() const {
  double bb = b[0] * b[0] + b[1] * b[1];
  double tb = theta[0] * b[0] + theta[1] * b[1];
  return bb - tb * tb;
}

namespace {

Sample make_sample(const SliceInfo& info, size_t idx, int n, int side, const GridState& geo) {
  Sample s;
  s.scale_index = info.scale_index;
  s.a = info.a;
  s.direction_index = info.direction_index;
  s.theta = info.theta;
  if (n == 1) {
    s.b = {geo.coord(static_cast<int>(idx)), 0.0};
  } else {
    s.b = {geo.coord(static_cast<int>(idx / side)), geo.coord(static_cast<int>(idx % side))};
  }
  return s;
}

std::vector<double> cumulative(const std::vector<cplx>& c) {
  std::vector<double> cum(c.size());
  double run = 0.0;
  for (size_t k = 0; k < c.size(); ++k) {
    run += std::norm(c[k]);
    cum[k] = run;
  }
  return cum;
}

size_t pick_cum(const std::vector<double>& cum, double u) {
  double target = u * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) --it;
  size_t k = static_cast<size_t>(it - cum.begin());
  while (k > 0 && cum[k] == cum[k - 1]) --k;  // never land on a zero-probability cell
  return k;
}

}  // namespace

std::vector<Sample> sample_many(const CurveletCoefficients& coeffs, size_t count, std::uint64_t seed) {
  if (coeffs.slices.empty()) fail(ErrorCode::degenerate, "sample: no coefficients");
  std::vector<double> masses;
  for (auto& sl : coeffs.slices) {
    double m = 0.0;
    for (auto& c : sl.data) m += std::norm(c);
    masses.push_back(m);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<size_t> choose(masses.begin(), masses.end());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::map<size_t, std::vector<double>> cums;
  GridState geo;
  geo.side = coeffs.side;
  geo.cell = coeffs.cell;
  std::vector<Sample> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    size_t s = choose(rng);
    double u = uni(rng);
    auto it = cums.find(s);
    if (it == cums.end()) it = cums.emplace(s, cumulative(coeffs.slices[s].data)).first;
    out.push_back(make_sample(coeffs.slices[s].info, pick_cum(it->second, u), coeffs.n, coeffs.side, geo));
  }
  return out;
}

Sample sample_abtheta(const CurveletCoefficients& coeffs, std::uint64_t seed) {
  return sample_many(coeffs, 1, seed).front();
}

std::vector<Sample> sample_streaming(const GridState& state, const DiscreteFrame& frame, size_t count,
                                     std::uint64_t seed) {
  Transform t(state.n, state.side, state.cell, frame);
  std::vector<double> masses;
  std::vector<SliceInfo> infos;
  t.for_each_slice(state, [&](const SliceInfo& info, const std::vector<cplx>& c) {
    double m = 0.0;
    for (auto& x : c) m += std::norm(x);
    masses.push_back(m);
    infos.push_back(info);
  });
  if (masses.empty()) fail(ErrorCode::degenerate, "sample: state has no admitted frequency content");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<size_t> choose(masses.begin(), masses.end());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<size_t> slice_of(count);
  std::vector<double> u(count);
  std::map<size_t, std::vector<size_t>> wanted;
  for (size_t i = 0; i < count; ++i) {
    slice_of[i] = choose(rng);
    u[i] = uni(rng);
    wanted[slice_of[i]].push_back(i);
  }
  std::vector<Sample> out(count);
  size_t idx = 0;
  t.for_each_slice(state, [&](const SliceInfo& info, const std::vector<cplx>& c) {
    auto it = wanted.find(idx++);
    if (it == wanted.end()) return;
    auto cum = cumulative(c);
    for (size_t i : it->second) out[i] = make_sample(info, pick_cum(cum, u[i]), state.n, state.side, state);
  });
  return out;
}

// ---------------------------------------------------------------------------

void write_state(const GridState& s, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) fail(ErrorCode::io, "cannot write " + tmp);
    put_u32(o, static_cast<std::uint32_t>(s.n));
    put_u32(o, static_cast<std::uint32_t>(s.side));
    put_f64(o, s.cell);
    for (auto& c : s.amplitudes) {
      put_f64(o, c.real());
      put_f64(o, c.imag());
    }
    if (!o) fail(ErrorCode::io, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(ErrorCode::io, "cannot rename onto " + path);
}

GridState read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  int n = static_cast<int>(get_u32(in));
  int side = static_cast<int>(get_u32(in));
  double cell = get_f64(in);
  if (n != 1 && n != 2) fail(ErrorCode::io, "grid file: bad dimension");
  if (side < 2 || side > (1 << 14)) fail(ErrorCode::io, "grid file: bad side");
  GridState s = zero_state(n, side, cell);
  for (auto& c : s.amplitudes) {
    double re = get_f64(in);
    double im = get_f64(in);
    c = cplx(re, im);
  }
  return s;
}

}  // namespace curvelab::discrete
