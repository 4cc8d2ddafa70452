#pragma once

#include <cmath>

namespace curvelab::specfun {

double log_gamma(double x);

struct SphereConstants {
  int n = 0;
  double s0 = 0.0;        // area of S^{n-1}
  double s0_prime = 0.0;  // area of S^{n-2}
  double log_s0 = 0.0;
  double log_s0_prime = 0.0;
};

SphereConstants sphere_surface(int n);

// mantissa * exp(log_scale); keeps Bessel values finite far below the double range.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;
  double value() const { return mantissa == 0.0 ? 0.0 : mantissa * std::exp(log_scale); }
  double log_abs() const { return std::log(std::fabs(mantissa)) + log_scale; }
  int sign() const { return mantissa > 0 ? 1 : (mantissa < 0 ? -1 : 0); }
};

Scaled bessel_j_scaled(double nu, double z);
double bessel_j(double nu, double z);

// Poisson integral, evaluated by adaptive quadrature. Slow reference path.
double bessel_j_integral(double nu, double z);

// Gamma(nu+1) (2/z)^nu J_nu(z): the radial Fourier kernel of S^{2nu+1}, equal to 1 at z = 0.
class BesselOmega {
 public:
  explicit BesselOmega(double nu);
  double operator()(double z) const;
  double nu() const { return nu_; }

 private:
  double nu_;
  double log_gamma_nu1_;
};

struct MeisselResult {
  double value = 0.0;
  double log_abs = 0.0;
  bool in_validity_window = true;
};

// (sqrt(nu) x / 2)^nu / Gamma(nu+1) * exp(-x^2/4), approximating J_nu(sqrt(nu) x).
MeisselResult bessel_j_meissel(double nu, double x);

}  // namespace curvelab::specfun
