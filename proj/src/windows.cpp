#include "curvelab/windows.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvelab/pchip.hpp"

#include "curvelab/errors.hpp"
#include "curvelab/quadrature.hpp"

namespace curvelab::windows {

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvE = std::exp(-1.0);

}  // namespace

struct RadialWindow::Table {
  Pchip spline;
  std::vector<double> r;
  std::vector<double> phi_at_knot;
};

// ---------------------------------------------------------------- radial

RadialWindow RadialWindow::default_window() {
  RadialWindow w;
  w.lo_ = kInvE;
  w.hi_ = 1.0;
  w.knots_ = {kInvE, 1.0};
  return w;
}

double table_admissibility_defect(const std::vector<double>& r, const std::vector<double>& w) {
  Pchip s{std::vector<double>(r), std::vector<double>(w)};
  double total = 0.0;
  for (size_t i = 0; i + 1 < r.size(); ++i) {
    auto f = [&](double x) {
      double v = s(x);
      return v * v / x;
    };
    total += quad::adaptive(f, r[i], r[i + 1], 1e-14).value;
  }
  return total - 1.0;
}

RadialWindow RadialWindow::from_table(std::vector<double> r, std::vector<double> w) {
  if (r.size() != w.size() || r.size() < 4) fail(ErrorCode::construction, "window table: need >= 4 (r, W) pairs");
  for (size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(w[i])) fail(ErrorCode::construction, "window table: non-finite entry");
    if (w[i] < 0.0) fail(ErrorCode::construction, "window table: negative W value");
    if (i > 0 && !(r[i] > r[i - 1])) fail(ErrorCode::construction, "window table: r must increase strictly");
  }
  if (r.front() < kInvE - 1e-12 || r.back() > 1.0 + 1e-12)
    fail(ErrorCode::construction, "window table: support must lie within [1/e, 1]");
  double defect = table_admissibility_defect(r, w);
  if (std::fabs(defect) > 1e-10)
    fail(ErrorCode::construction,
         "window table: admissibility defect " + std::to_string(defect) + " exceeds 1e-10 (not renormalised)");

  auto t = std::make_shared<Table>(Table{Pchip(std::vector<double>(r), std::vector<double>(w)), r, {}});
  t->phi_at_knot.assign(r.size(), 0.0);
  for (size_t i = 0; i + 1 < r.size(); ++i) {
    auto f = [&](double x) {
      double v = t->spline(x);
      return v * v / x;
    };
    t->phi_at_knot[i + 1] = t->phi_at_knot[i] + quad::adaptive(f, r[i], r[i + 1], 1e-14).value;
  }
  RadialWindow out;
  out.table_ = t;
  out.lo_ = r.front();
  out.hi_ = r.back();
  out.knots_ = r;
  return out;
}

double RadialWindow::operator()(double r) const {
  if (r < lo_ || r > hi_) return 0.0;
  if (!table_) {
    return std::max(0.0, std::sqrt(2.0) * std::cos(kPi * (std::log(r) + 0.5)));
  }
  return std::max(0.0, table_->spline(r));
}

double RadialWindow::deriv(double r) const {
  if (r < lo_ || r > hi_) return 0.0;
  if (!table_) return -std::sqrt(2.0) * kPi * std::sin(kPi * (std::log(r) + 0.5)) / r;
  return table_->spline.prime(r);
}

double RadialWindow::cumulative(double x) const {
  if (x <= lo_) return 0.0;
  if (!table_) {
    if (x >= 1.0) return 1.0;
    double t = std::log(x);
    return (t + 1.0) + std::sin(2.0 * kPi * (t + 0.5)) / (2.0 * kPi);
  }
  const auto& r = table_->r;
  if (x >= hi_) return table_->phi_at_knot.back();
  size_t i = static_cast<size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
  auto f = [&](double u) {
    double v = table_->spline(u);
    return v * v / u;
  };
  return table_->phi_at_knot[i] + quad::adaptive(f, r[i], x, 1e-14).value;
}

double RadialWindow::admissibility() const {
  auto f = [&](double u) {
    double v = (*this)(u);
    return v * v / u;
  };
  return quad::adaptive_pieces(f, knots_, 1e-15).value;
}

// ---------------------------------------------------------------- angular

double q_window(double x) {
  if (x <= 0.0) return 0.0;
  if (x <= 1.0) return 0.5 * x * x;
  if (x <= 2.0) return 1.0 - 0.5 * (2.0 - x) * (2.0 - x);
  return 1.0;
}

double q_window_deriv(double x) {
  if (x <= 0.0 || x >= 2.0) return 0.0;
  return x <= 1.0 ? x : 2.0 - x;
}

AngularWindow::AngularWindow(std::string name, Fn v, Fn dv, std::vector<double> knots)
    : name_(std::move(name)), v_(std::move(v)), dv_(std::move(dv)), knots_(std::move(knots)) {
  const int grid = 10000;
  double prev = v_(0.0);
  for (int i = 0; i <= grid; ++i) {
    double y = kAlpha * i / grid;
    double val = v_(y);
    if (!(val >= 0.0)) fail(ErrorCode::construction, "angular window: negative or NaN value");
    if (val > prev + 1e-12) fail(ErrorCode::construction, "angular window: not monotone non-increasing");
    if (val > 0.0 && dv_(y) > 1e-12) fail(ErrorCode::construction, "angular window: positive derivative");
    prev = val;
  }
}

AngularWindow::AngularWindow(std::string name, Fn v, Fn dv, std::vector<double> knots, Fn v_gap, Fn dv_gap)
    : AngularWindow(std::move(name), std::move(v), std::move(dv), std::move(knots)) {
  v_gap_ = std::move(v_gap);
  dv_gap_ = std::move(dv_gap);
}

AngularWindow AngularWindow::default_window() {
  const double s = 2.0 / kAlpha;
  return AngularWindow(
      "piecewise_quadratic", [s](double y) { return q_window(s * (kAlpha - y)); },
      [s](double y) { return -s * q_window_deriv(s * (kAlpha - y)); }, {0.5 * kAlpha},
      [s](double d) { return q_window(s * d); }, [s](double d) { return -s * q_window_deriv(s * d); });
}

AngularWindow AngularWindow::constant_window() {
  return AngularWindow("constant", [](double) { return 1.0; }, [](double) { return 0.0; }, {});
}

double sin_plus(double phi) {
  if (!(phi >= 0.0 && phi <= kPi)) fail(ErrorCode::domain, "sin_plus: phi must lie in [0, pi]");
  return phi <= 0.5 * kPi ? std::sin(phi) : 1.0;
}

double scaled_angular_integral(const std::function<double(double, double)>& g, int power,
                               const std::vector<double>& knots) {
  std::vector<double> u_knots;
  for (double y : knots) u_knots.push_back(1.0 - y / kAlpha);
  if (power > 4) {
    for (double c : {1.0, 4.0, 16.0, 64.0})
      if (c / power < 1.0) u_knots.push_back(c / power);
  }
  auto k = quad::clip_knots(0.0, 1.0, u_knots);
  auto f = [&](double u) {
    return g(kAlpha * (1.0 - u), kAlpha * u) * std::pow(1.0 - u, power);
  };
  return quad::adaptive_pieces(f, k, 1e-14).value;
}

double scaled_moment(const AngularWindow& v, int k) {
  if (k < 0) fail(ErrorCode::domain, "moment: k must be >= 0");
  return scaled_angular_integral([&](double, double d) { double x = v.at_gap(d); return x * x; }, k, v.knots());
}

double scaled_moment_prime(const AngularWindow& v, int k) {
  if (k < 0) fail(ErrorCode::domain, "moment_prime: k must be >= 0");
  return scaled_angular_integral([&](double, double d) { double x = v.deriv_at_gap(d); return x * x; }, k,
                                 v.knots());
}

double moment(const AngularWindow& v, int k) { return scaled_moment(v, k) * std::pow(kAlpha, k + 1); }
double moment_prime(const AngularWindow& v, int k) { return scaled_moment_prime(v, k) * std::pow(kAlpha, k + 1); }

// ---------------------------------------------------------------- frame

FrameConstants::FrameConstants(int n, double lambda, std::shared_ptr<const RadialWindow> w,
                               std::shared_ptr<const AngularWindow> v, const std::vector<double>& tabulated_scales)
    : n_(n), lambda_(lambda), w_(std::move(w)), v_(std::move(v)) {
  if (n < 2) fail(ErrorCode::domain, "frame: n must be >= 2");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::domain, "frame: lambda must be positive");
  sphere_ = specfun::sphere_surface(n);
  m_.resize(n + 1);
  mp_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    m_[k] = moment(*v_, k);
    mp_[k] = moment_prime(*v_, k);
  }
  scaled_m_nm2_ = scaled_moment(*v_, n - 2);
  double scaled_mp = scaled_moment_prime(*v_, n - 2);
  mprime_over_m_ = scaled_mp / scaled_m_nm2_;
  min_ratio_ = std::min(m_[2] / m_[0], moment(*v_, 3) / m_[1]);
  for (double a : tabulated_scales) table_[a] = compute(a);
}

AngularRatios FrameConstants::compute(double a) const {
  if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::domain, "normalization: scale a must lie in (0, 1]");
  const AngularWindow& v = *v_;
  const int n = n_;
  auto d = scaled_angular_integral(
      [&](double y, double g) { double x = v.at_gap(g); return x * x / std::sqrt(1.0 - a * y * y); }, n - 2, v.knots());
  auto a1 = scaled_angular_integral(
      [&](double y, double g) { double x = v.at_gap(g); return x * x / std::sqrt(1.0 - a * y * y); }, n, v.knots());
  auto b1 = scaled_angular_integral(
      [&](double y, double g) { return v.at_gap(g) * v.deriv_at_gap(g) * std::sqrt(1.0 - a * y * y); }, n - 1, v.knots());
  auto c1 = scaled_angular_integral(
      [&](double y, double g) {
        double x = v.deriv_at_gap(g);
        double c = 1.0 - a * y * y;
        return x * x * c * std::sqrt(c);
      },
      n - 2, v.knots());
  AngularRatios r;
  r.a = a;
  r.d_over_m = d / scaled_m_nm2_;
  r.log_c_inv2 = sphere_.log_s0_prime + 0.5 * (n - 1) * std::log(a) + (n - 1) * std::log(kAlpha) + std::log(d);
  r.a1_over_d = kAlpha * kAlpha * a1 / d;
  r.b1_over_d = kAlpha * b1 / d;
  r.c1_over_d = c1 / d;
  return r;
}

AngularRatios FrameConstants::angular_ratios(double a) const {
  auto it = table_.find(a);
  if (it != table_.end()) return it->second;
  return compute(a);
}

double FrameConstants::log_c_inv2(double a) const {
  auto it = table_.find(a);
  if (it != table_.end()) return it->second.log_c_inv2;
  if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::domain, "normalization: scale a must lie in (0, 1]");
  const AngularWindow& v = *v_;
  double d = scaled_angular_integral(
      [&](double y, double g) { double x = v.at_gap(g); return x * x / std::sqrt(1.0 - a * y * y); }, n_ - 2, v.knots());
  return sphere_.log_s0_prime + 0.5 * (n_ - 1) * std::log(a) + (n_ - 1) * std::log(kAlpha) + std::log(d);
}

FrameConstants make_default_frame(int n, double lambda, const std::vector<double>& tabulated_scales) {
  return FrameConstants(n, lambda, std::make_shared<RadialWindow>(RadialWindow::default_window()),
                        std::make_shared<AngularWindow>(AngularWindow::default_window()), tabulated_scales);
}

double normalization_c(const FrameConstants& frame, double a) { return std::exp(-0.5 * frame.log_c_inv2(a)); }

double log_c_inv2_polar(const FrameConstants& frame, double a) {
  if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::domain, "normalization: scale a must lie in (0, 1]");
  const int n = frame.n();
  const double sa = std::sqrt(a);
  const double top = std::asin(kAlpha * sa);
  const AngularWindow& v = frame.angular();
  // psi = top - phi; the gap alpha - sin(phi)/sqrt(a) is written as a sine difference
  auto f = [&](double psi) {
    double s = std::sin(top - psi);
    double gap = 2.0 * std::cos(top - 0.5 * psi) * std::sin(0.5 * psi) / sa;
    double x = v.at_gap(gap);
    return x * x * std::pow(s / (kAlpha * sa), n - 2);
  };
  std::vector<double> inner;
  for (double y : v.knots()) inner.push_back(top - std::asin(std::min(1.0, y * sa)));
  if (n > 6)
    for (double c : {1.0, 4.0, 16.0})
      if (c / n < 1.0) inner.push_back(top * c / n);
  auto k = quad::clip_knots(0.0, top, inner);
  double integral = quad::adaptive_pieces(f, k, 1e-14).value;
  return frame.sphere().log_s0_prime + (n - 2) * std::log(kAlpha * sa) + std::log(integral);
}

}  // namespace curvelab::windows
