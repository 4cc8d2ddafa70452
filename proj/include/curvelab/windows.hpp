#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "curvelab/specfun.hpp"

namespace curvelab::windows {

inline constexpr double kAlpha = 0.70710678118654752440;  // 1/sqrt(2), edge of the angular support

class RadialWindow {
 public:
  static RadialWindow default_window();
  // Monotone cubic through (r, W(r)); rejected unless support and admissibility hold.
  static RadialWindow from_table(std::vector<double> r, std::vector<double> w);

  double operator()(double r) const;
  double deriv(double r) const;
  // Phi(x) = int_0^x W(u)^2 du/u
  double cumulative(double x) const;
  double admissibility() const;
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  bool is_default() const { return table_ == nullptr; }
  const std::vector<double>& knots() const { return knots_; }

 private:
  struct Table;
  RadialWindow() = default;
  std::shared_ptr<const Table> table_;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> knots_;
};

// Squared-norm defect of a sampled window, int W^2 dr/r - 1, for callers preparing tables.
double table_admissibility_defect(const std::vector<double>& r, const std::vector<double>& w);

class AngularWindow {
 public:
  using Fn = std::function<double(double)>;
  AngularWindow(std::string name, Fn v, Fn dv, std::vector<double> knots);
  // optional forms in the gap d = alpha - y, exact near the cap where alpha - y cancels
  AngularWindow(std::string name, Fn v, Fn dv, std::vector<double> knots, Fn v_gap, Fn dv_gap);

  static AngularWindow default_window();
  static AngularWindow constant_window();  // V = 1 on [0, 1/sqrt(2)]

  double operator()(double y) const { return y > kAlpha || y < 0.0 ? 0.0 : v_(y); }
  double deriv(double y) const { return y > kAlpha || y < 0.0 ? 0.0 : dv_(y); }
  double at_gap(double d) const {
    if (d < 0.0 || d > kAlpha) return 0.0;
    return v_gap_ ? v_gap_(d) : v_(kAlpha - d);
  }
  double deriv_at_gap(double d) const {
    if (d < 0.0 || d > kAlpha) return 0.0;
    return dv_gap_ ? dv_gap_(d) : dv_(kAlpha - d);
  }
  const std::vector<double>& knots() const { return knots_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn v_, dv_;
  std::vector<double> knots_;
  Fn v_gap_, dv_gap_;
};

// q of the piecewise-quadratic angular window and its derivative
double q_window(double x);
double q_window_deriv(double x);

double sin_plus(double phi);

// Integrals over [0, 1/sqrt(2)] of g(y, alpha - y) y^power, returned divided by alpha^(power+1).
double scaled_angular_integral(const std::function<double(double, double)>& g, int power,
                               const std::vector<double>& knots);

double moment(const AngularWindow& v, int k);
double moment_prime(const AngularWindow& v, int k);
double scaled_moment(const AngularWindow& v, int k);        // M_k / alpha^(k+1)
double scaled_moment_prime(const AngularWindow& v, int k);  // M'_k / alpha^(k+1)

struct AngularRatios {
  double a = 0.0;
  double d_over_m = 0.0;    // C^{-2} / (M_{n-2} a^{(n-1)/2} S'_0)
  double log_c_inv2 = 0.0;  // ln C_{a,n}^{-2}
  double a1_over_d = 0.0;
  double b1_over_d = 0.0;
  double c1_over_d = 0.0;
};

class FrameConstants {
 public:
  FrameConstants(int n, double lambda, std::shared_ptr<const RadialWindow> w,
                 std::shared_ptr<const AngularWindow> v, const std::vector<double>& tabulated_scales = {});

  int n() const { return n_; }
  double lambda() const { return lambda_; }
  const specfun::SphereConstants& sphere() const { return sphere_; }
  const RadialWindow& radial() const { return *w_; }
  const AngularWindow& angular() const { return *v_; }
  std::shared_ptr<const RadialWindow> radial_ptr() const { return w_; }
  std::shared_ptr<const AngularWindow> angular_ptr() const { return v_; }

  double m(int k) const { return m_.at(k); }
  double mprime(int k) const { return mp_.at(k); }
  const std::vector<double>& m_table() const { return m_; }
  const std::vector<double>& mprime_table() const { return mp_; }
  double mprime_over_m() const { return mprime_over_m_; }  // M'_{n-2}/M_{n-2}
  double min_moment_ratio() const { return min_ratio_; }   // min{M2/M0, M3/M1}

  // Computed on demand; tabulated scales are served from the cache.
  AngularRatios angular_ratios(double a) const;
  double log_c_inv2(double a) const;
  const std::map<double, AngularRatios>& tabulated() const { return table_; }

 private:
  AngularRatios compute(double a) const;
  int n_;
  double lambda_;
  specfun::SphereConstants sphere_;
  std::shared_ptr<const RadialWindow> w_;
  std::shared_ptr<const AngularWindow> v_;
  std::vector<double> m_, mp_;
  double scaled_m_nm2_ = 0.0;
  double mprime_over_m_ = 0.0, min_ratio_ = 0.0;
  std::map<double, AngularRatios> table_;
};

FrameConstants make_default_frame(int n, double lambda = 1.0, const std::vector<double>& tabulated_scales = {});

// C_{a,n} itself; may be very large, computed from the logarithm.
double normalization_c(const FrameConstants& frame, double a);

// Same constant by quadrature over the polar angle, as ln C^{-2}; independent of the y-substitution.
double log_c_inv2_polar(const FrameConstants& frame, double a);

}  // namespace curvelab::windows
