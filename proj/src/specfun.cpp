#include "curvelab/specfun.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "curvelab/errors.hpp"
#include "curvelab/quadrature.hpp"

namespace curvelab::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

bool series_region(double nu, double z) { return z * z <= std::max(64.0, 8.0 * (nu + 1.0)); }

// Sum_k (-z^2/4)^k / (k! (nu+1)_k)
double series_sum(double nu, double z) {
  const double q = -0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<double>(k) * (nu + k));
    sum += term;
    if (std::fabs(term) <= 1e-17 * std::fabs(sum) && k * (nu + k) > -q) break;
  }
  return sum;
}

// Hankel large-argument expansion, z >= 25, small order.
double hankel_j(double mu, double z) {
  const double m4 = 4.0 * mu * mu;
  double p = 1.0, q = 0.0, term = 1.0, prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= (m4 - odd * odd) / (k * 8.0 * z);
    double at = std::fabs(term);
    if (at > prev) break;
    prev = at;
    int phase = k % 4;  // k odd -> Q, k even -> P, alternating signs
    if (phase == 1) q += term;
    else if (phase == 2) p -= term;
    else if (phase == 3) q -= term;
    else p += term;
    if (at < 1e-18) break;
  }
  double chi = z - (0.5 * mu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

Scaled forward_recurrence(double nu, double z) {
  double whole = std::floor(nu);
  double nu0 = nu - whole;
  int m = static_cast<int>(whole);
  double jm1 = hankel_j(nu0, z);
  if (m == 0) return {jm1, 0.0};
  double j = hankel_j(nu0 + 1.0, z);
  for (int i = 1; i < m; ++i) {
    double next = (2.0 * (nu0 + i) / z) * j - jm1;
    jm1 = j;
    j = next;
  }
  return {j, 0.0};
}

Scaled miller(double nu, double z) {
  double whole = std::floor(nu);
  double nu0 = nu - whole;
  int m = static_cast<int>(whole);
  double big = std::max(nu, z);
  int top = static_cast<int>(std::ceil(big + 40.0 + 4.0 * std::sqrt(big))) + 2;
  if (top % 2 == 1) ++top;

  const bool use_sum = z < 25.0;
  double f_up = 0.0, f = 1.0;  // f_{i+1}, f_i
  double target = 0.0, target_log = 0.0;
  bool recorded = (top == m);
  if (recorded) target = f;
  double sum = 0.0;
  auto sum_coeff = [&](int i) {
    int k = i / 2;
    if (k == 0) return nu0 == 0.0 ? 1.0 : std::exp(std::lgamma(nu0 + 1.0));
    return std::exp(std::log(nu0 + 2.0 * k) + std::lgamma(nu0 + k) - std::lgamma(k + 1.0));
  };
  if (use_sum && top % 2 == 0) sum += sum_coeff(top) * f;
  double f1 = 0.0;
  for (int i = top; i >= 1; --i) {
    double next = (2.0 * (nu0 + i) / z) * f - f_up;
    f_up = f;
    f = next;  // f_{i-1}
    if (i - 1 == m) {
      target = f;
      recorded = true;
    }
    if (i - 1 == 1) f1 = f;
    if (use_sum && (i - 1) % 2 == 0) sum += sum_coeff(i - 1) * f;
    if (std::fabs(f) > 1e250) {
      const double c = 1e-250;
      f *= c;
      f_up *= c;
      f1 *= c;
      sum *= c;
      if (recorded) target_log += std::log(1e250);
      else target = 0.0;
    }
  }
  (void)recorded;
  double f0 = f;
  double scale;
  if (use_sum) {
    scale = std::pow(0.5 * z, nu0) / sum;
  } else {
    double h0 = hankel_j(nu0, z);
    double h1 = hankel_j(nu0 + 1.0, z);
    double mx = std::max(std::fabs(f0), std::fabs(f1));
    double g0 = f0 / mx, g1 = f1 / mx;
    scale = (h0 * g0 + h1 * g1) / (g0 * g0 + g1 * g1) / mx;
  }
  if (target == 0.0) return {0.0, 0.0};
  // target_log counts rescalings after recording, which shrank the normalisation instead of target
  double lg = std::log(std::fabs(scale)) - target_log;
  double sgn = scale < 0 ? -1.0 : 1.0;
  return {target * sgn, lg};
}

void check_args(double nu, double z) {
  if (!std::isfinite(nu) || !std::isfinite(z)) fail(ErrorCode::domain, "bessel_j: non-finite input");
  if (nu < 0.0 || z < 0.0) fail(ErrorCode::domain, "bessel_j: requires nu >= 0 and z >= 0");
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    fail(ErrorCode::domain, "log_gamma: argument must be positive and finite, got " + std::to_string(x));
  return std::lgamma(x);
}

SphereConstants sphere_surface(int n) {
  if (n < 2) fail(ErrorCode::domain, "sphere_surface: n must be >= 2");
  SphereConstants c;
  c.n = n;
  c.log_s0 = std::log(2.0) + 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n);
  c.log_s0_prime = std::log(2.0) + 0.5 * (n - 1) * std::log(kPi) - std::lgamma(0.5 * (n - 1));
  c.s0 = std::exp(c.log_s0);
  c.s0_prime = std::exp(c.log_s0_prime);
  return c;
}

Scaled bessel_j_scaled(double nu, double z) {
  check_args(nu, z);
  if (z == 0.0) return {nu == 0.0 ? 1.0 : 0.0, 0.0};
  if (series_region(nu, z)) {
    double s = series_sum(nu, z);
    return {s, nu * std::log(0.5 * z) - std::lgamma(nu + 1.0)};
  }
  if (z >= 25.0 && nu <= z) return forward_recurrence(nu, z);
  return miller(nu, z);
}

double bessel_j(double nu, double z) { return bessel_j_scaled(nu, z).value(); }

double bessel_j_integral(double nu, double z) {
  check_args(nu, z);
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  auto g = [&](double t) {
    double s = std::sin(t);
    double w = (nu == 0.0) ? 1.0 : std::pow(s, 2.0 * nu);
    return std::cos(z * std::cos(t)) * w;
  };
  double width = kPi / (1.0 + 0.5 * z);
  auto r = quad::panels(g, 0.0, kPi, width, 1e-14);
  double lp = nu * std::log(0.5 * z) - std::lgamma(nu + 0.5) - 0.5 * std::log(kPi);
  return r.value * std::exp(lp);
}

BesselOmega::BesselOmega(double nu) : nu_(nu), log_gamma_nu1_(std::lgamma(nu + 1.0)) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) fail(ErrorCode::domain, "BesselOmega: nu must be >= 0");
}

double BesselOmega::operator()(double z) const {
  z = std::fabs(z);
  if (z == 0.0) return 1.0;
  if (series_region(nu_, z)) return series_sum(nu_, z);
  Scaled j = bessel_j_scaled(nu_, z);
  if (j.mantissa == 0.0) return 0.0;
  return j.mantissa * std::exp(j.log_scale + log_gamma_nu1_ + nu_ * std::log(2.0 / z));
}

MeisselResult bessel_j_meissel(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) fail(ErrorCode::domain, "bessel_j_meissel: non-finite input");
  if (nu <= 0.0 || x < 0.0) fail(ErrorCode::domain, "bessel_j_meissel: requires nu > 0 and x >= 0");
  MeisselResult r;
  r.in_validity_window = nu >= 10.0 && x > 0.0 && x < std::pow(nu, 0.49);
  if (x == 0.0) {
    r.value = 0.0;
    r.log_abs = -INFINITY;
    return r;
  }
  r.log_abs = nu * std::log(0.5 * std::sqrt(nu) * x) - std::lgamma(nu + 1.0) - 0.25 * x * x;
  r.value = std::exp(r.log_abs);
  return r;
}

}  // namespace curvelab::specfun
