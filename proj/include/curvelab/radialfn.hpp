#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "curvelab/scales.hpp"

namespace curvelab::radial {

struct ProfileSpec {
  std::string kind;  // gaussian, shell, single_scale, two_scale, ball, table
  std::map<std::string, double> params;
  std::string table_path;

  // "gaussian:sigma=0.05" style descriptors
  static ProfileSpec parse(const std::string& text);
  std::string to_string() const;
  double get(const std::string& key, double fallback) const;
};

// Un-normalised radial amplitude in units sqrt(S0) r^{(n-1)/2} F_0(r).
struct Shape {
  virtual ~Shape() = default;
  virtual double value(double r) const = 0;
  virtual double deriv(double r) const = 0;
  virtual bool analytic_deriv() const { return true; }
  double lo = 0.0, hi = 0.0;      // natural support before the cutoff
  std::vector<double> knots;      // interior kinks
  double oscillation = 0.0;       // period in r of sign changes, 0 if none
  double tail_norm_sq = 0.0;      // squared mass beyond hi, known analytically
};

class RadialProfile {
 public:
  RadialProfile(ProfileSpec spec, int n, double lambda, std::unique_ptr<Shape> shape, double cutoff);

  int n() const { return n_; }
  double lambda() const { return lambda_; }
  double cutoff() const { return cutoff_; }
  const ProfileSpec& spec() const { return spec_; }

  // A(r) = sqrt(S0) r^{(n-1)/2} F_0(r), normalised so that int A^2 dr = 1.
  double amp(double r) const;
  double amp_deriv(double r) const;
  // sqrt(S0) r^{(n-1)/2} F_0'(r)
  double b(double r) const;
  double density(double r) const {
    double a = amp(r);
    return a * a;
  }
  double f0(double r) const;

  double r_lo() const { return lo_; }
  double r_hi() const { return hi_; }
  const std::vector<double>& knots() const { return knots_; }  // lo, interior kinks, hi
  double oscillation() const { return shape_->oscillation; }
  bool analytic_derivative() const { return shape_->analytic_deriv(); }

  double l2_norm_sq() const { return l2_; }          // S0 int F0^2 r^{n-1} dr after normalisation
  double raw_norm_sq() const { return raw_norm_; }   // before normalisation and truncation
  double truncated_mass() const { return truncated_; }
  double tail_mass() const { return tail_mass_; }     // normalised mass beyond r_hi (analytic)

  // int g(r) dr over [lo, hi] within the support, split at kinks. Oscillatory kernels pass their period.
  double integrate(const std::function<double(double)>& g, double lo, double hi, double kernel_period = 0.0,
                   double rel_tol = 1e-12, double* error = nullptr) const;

  // Unitary radial transform a(x) = 2 pi int A(r) sqrt(r x) J_{(n-2)/2}(2 pi r x) dr; int a^2 dx = 1.
  double spatial_amp(double x) const;
  // Spatial mass within radius x, from the cached 4096-point grid.
  double spatial_mass_within(double x) const;
  double spatial_grid_hi() const;

 private:
  void build_spatial_cache() const;

  ProfileSpec spec_;
  int n_;
  double lambda_;
  std::unique_ptr<Shape> shape_;
  double cutoff_;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> knots_;
  double scale_ = 1.0;  // 1/sqrt(norm)
  double l2_ = 0.0, raw_norm_ = 0.0, truncated_ = 0.0, tail_mass_ = 0.0;

  mutable std::once_flag spatial_once_;
  mutable std::vector<double> sx_, scum_;
  mutable double sx_hi_ = 0.0;
};

std::shared_ptr<const RadialProfile> make_profile(const ProfileSpec& spec, int n, double lambda);
inline std::shared_ptr<const RadialProfile> make_profile(const std::string& spec, int n, double lambda) {
  return make_profile(ProfileSpec::parse(spec), n, lambda);
}

// Dilation by beta in space: F_0(r) -> beta^{n/2} F_0(beta r). lambda is carried along by the caller.
std::shared_ptr<const RadialProfile> dilate(const std::shared_ptr<const RadialProfile>& p, double beta,
                                            double new_lambda);

double support_radius(const RadialProfile& profile, double delta);

double autocorrelation_exact(const RadialProfile& profile, double s_norm);

struct MixtureValue {
  double value = 0.0;
  bool valid = true;  // s * r_max < n
};

MixtureValue autocorrelation_gaussian_mixture(const ScaleDecomposition& decomp, double s_norm);

struct AutocorrelationSample {
  double s = 0.0, exact = 0.0, mixture = 0.0, gap = 0.0;
};

std::vector<AutocorrelationSample> autocorrelation_curve(const ScaleDecomposition& decomp,
                                                         const std::vector<double>& s_values);

}  // namespace curvelab::radial
