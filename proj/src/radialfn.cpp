#include "curvelab/radialfn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "curvelab/pchip.hpp"
#include <boost/math/quadrature/gauss.hpp>

#include "curvelab/errors.hpp"
#include "curvelab/quadrature.hpp"
#include "curvelab/specfun.hpp"
#include "curvelab/windows.hpp"

namespace curvelab::radial {

namespace {

constexpr double kPi = std::numbers::pi;


// ---------------------------------------------------------------- shapes

struct GaussianShape : Shape {
  int n;
  double sigma, peak, log_peak;
  GaussianShape(int n_, double sigma_, double cutoff) : n(n_), sigma(sigma_) {
    double rstar = std::sqrt((n - 1) / (4.0 * kPi * sigma * sigma));
    peak = std::max(rstar, cutoff);
    if (peak <= 0.0) peak = 1.0 / sigma;
    log_peak = 0.0;
    log_peak = logv(peak);
    // density drops by e^{-90} at the ends
    auto drop = [&](double r) { return 2.0 * logv(r) + 90.0; };
    double a = peak, b = peak;
    while (drop(b) > 0.0) b *= 1.5;
    double l = peak, h = b;
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (l + h);
      (drop(m) > 0.0 ? l : h) = m;
    }
    hi = h;
    if (n == 1) {
      lo = 0.0;
    } else {
      double lo_r = 0.0;
      a = peak;
      while (a > 1e-300 && drop(a) > 0.0) a *= 0.5;
      if (a > 1e-300) {
        l = a;
        h = peak;
        for (int i = 0; i < 200; ++i) {
          double m = 0.5 * (l + h);
          (drop(m) > 0.0 ? h : l) = m;
        }
        lo_r = l;
      }
      lo = lo_r;
    }
  }
  double logv(double r) const {
    return 0.5 * (n - 1) * std::log(r) - kPi * sigma * sigma * r * r - log_peak;
  }
  double value(double r) const override {
    if (r <= 0.0) return n == 1 ? std::exp(-log_peak) : 0.0;
    return std::exp(logv(r));
  }
  double deriv(double r) const override {
    if (r <= 0.0) return 0.0;
    return value(r) * (0.5 * (n - 1) / r - 2.0 * kPi * sigma * sigma * r);
  }
};

struct ShellShape : Shape {
  double r1, r2;
  ShellShape(double a, double b) : r1(a), r2(b) {
    lo = a;
    hi = b;
  }
  double value(double r) const override {
    if (r < r1 || r > r2) return 0.0;
    double s = std::sin(kPi * (r - r1) / (r2 - r1));
    return s * s;
  }
  double deriv(double r) const override {
    if (r < r1 || r > r2) return 0.0;
    return kPi / (r2 - r1) * std::sin(2.0 * kPi * (r - r1) / (r2 - r1));
  }
};

struct SingleScaleShape : Shape {
  windows::RadialWindow w;
  double c;  // lambda * a0
  SingleScaleShape(double lambda, double a0) : w(windows::RadialWindow::default_window()), c(lambda * a0) {
    lo = w.support_lo() / c;
    hi = w.support_hi() / c;
  }
  double value(double r) const override { return w(c * r); }
  double deriv(double r) const override { return c * w.deriv(c * r); }
};

struct TwoScaleShape : Shape {
  SingleScaleShape s1, s2;
  double w1, w2;  // weights divided by each component's squared norm
  TwoScaleShape(double lambda, double a1, double a2, double weight) : s1(lambda, a1), s2(lambda, a2) {
    // int W(c r)^2 dr = (1/c) int W(u)^2 du, the latter equals 1 for the admissible default window
    double z1 = quad::adaptive([&](double u) { double v = s1.w(u); return v * v; }, s1.w.support_lo(),
                               s1.w.support_hi()).value / s1.c;
    double z2 = quad::adaptive([&](double u) { double v = s2.w(u); return v * v; }, s2.w.support_lo(),
                               s2.w.support_hi()).value / s2.c;
    w1 = weight / z1;
    w2 = (1.0 - weight) / z2;
    lo = std::min(s1.lo, s2.lo);
    hi = std::max(s1.hi, s2.hi);
    knots = {s1.lo, s1.hi, s2.lo, s2.hi};
  }
  double value(double r) const override {
    double a = s1.value(r), b = s2.value(r);
    return std::sqrt(w1 * a * a + w2 * b * b);
  }
  double deriv(double r) const override {
    double v = value(r);
    if (v == 0.0) return 0.0;
    return (w1 * s1.value(r) * s1.deriv(r) + w2 * s2.value(r) * s2.deriv(r)) / v;
  }
};

struct BallShape : Shape {
  int n;
  double R, nu, log_c, rt = 0.0, re = 0.0;
  bool taper;
  BallShape(int n_, double radius, bool tapered, double zt, double zmax) : n(n_), R(radius), nu(0.5 * n_), taper(tapered) {
    auto sc = specfun::sphere_surface(std::max(n, 2));
    log_c = 0.5 * sc.log_s0 + 0.5 * n * std::log(R);
    lo = 0.0;
    oscillation = 1.0 / (2.0 * R);
    if (taper) {
      rt = zt / (2.0 * kPi * R);
      re = rt * std::exp(1.0);
      hi = re;
      knots = {rt};
    } else {
      hi = zmax / (2.0 * kPi * R);
      tail_norm_sq = std::exp(2.0 * log_c) / (2.0 * kPi * kPi * R * hi);
    }
  }
  double taper_value(double r) const {
    if (!taper || r <= rt) return 1.0;
    if (r >= re) return 0.0;
    double c = std::cos(0.5 * kPi * std::log(r / rt));
    return c * c;
  }
  double taper_deriv(double r) const {
    if (!taper || r <= rt || r >= re) return 0.0;
    return -std::sin(kPi * std::log(r / rt)) * kPi / (2.0 * r);
  }
  double bare(double r) const {
    if (r <= 0.0) return 0.0;
    auto j = specfun::bessel_j_scaled(nu, 2.0 * kPi * R * r);
    if (j.mantissa == 0.0) return 0.0;
    return j.mantissa * std::exp(j.log_scale + log_c - 0.5 * std::log(r));
  }
  double bare_deriv(double r) const {
    if (r <= 0.0) return 0.0;
    double z = 2.0 * kPi * R * r;
    auto jm = specfun::bessel_j_scaled(nu - 1.0, z);
    auto j = specfun::bessel_j_scaled(nu, z);
    auto ev = [&](const specfun::Scaled& s) {
      return s.mantissa == 0.0 ? 0.0 : s.mantissa * std::exp(s.log_scale + log_c - 0.5 * std::log(r));
    };
    double jv = ev(j), jmv = ev(jm);
    // d/dr [J_nu(z) r^{-1/2}] with J' = J_{nu-1} - (nu/z) J_nu
    return 2.0 * kPi * R * (jmv - nu / z * jv) - 0.5 * jv / r;
  }
  double value(double r) const override { return bare(r) * taper_value(r); }
  double deriv(double r) const override { return bare_deriv(r) * taper_value(r) + bare(r) * taper_deriv(r); }
};

struct TableShape : Shape {
  std::shared_ptr<Pchip> spline;
  TableShape(int n, const std::vector<double>& r, const std::vector<double>& f0) {
    auto sc = specfun::sphere_surface(std::max(n, 2));
    std::vector<double> x(r), a(r.size());
    for (size_t i = 0; i < r.size(); ++i)
      a[i] = std::exp(0.5 * sc.log_s0 + 0.5 * (n - 1) * std::log(r[i])) * f0[i];
    lo = r.front();
    hi = r.back();
    spline = std::make_shared<Pchip>(std::move(x), std::move(a));
  }
  bool analytic_deriv() const override { return false; }
  double value(double r) const override { return (r < lo || r > hi) ? 0.0 : (*spline)(r); }
  // Richardson-extrapolated central differences
  double deriv(double r) const override {
    if (r < lo || r > hi) return 0.0;
    double h = 1e-3 * (hi - lo);
    h = std::min({h, 0.5 * (r - lo) + 1e-300, 0.5 * (hi - r) + 1e-300});
    if (h < 1e-12 * (hi - lo)) return spline->prime(r);
    auto d = [&](double s) { return ((*spline)(r + s) - (*spline)(r - s)) / (2.0 * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
  }
};

struct DilatedShape : Shape {
  std::shared_ptr<const RadialProfile> base;
  double beta;
  DilatedShape(std::shared_ptr<const RadialProfile> p, double b) : base(std::move(p)), beta(b) {
    lo = base->r_lo() / beta;
    hi = base->r_hi() / beta;
    for (double k : base->knots()) knots.push_back(k / beta);
    oscillation = base->oscillation() / beta;
    tail_norm_sq = base->tail_mass();
  }
  bool analytic_deriv() const override { return base->analytic_derivative(); }
  double value(double r) const override { return std::sqrt(beta) * base->amp(beta * r); }
  double deriv(double r) const override { return beta * std::sqrt(beta) * base->amp_deriv(beta * r); }
};

double require(const ProfileSpec& s, const std::string& key) {
  auto it = s.params.find(key);
  if (it == s.params.end()) fail(ErrorCode::config, "profile '" + s.kind + "' needs parameter " + key);
  return it->second;
}

std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open profile table " + path);
  std::vector<double> r, f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      r.push_back(a);
      f.push_back(b);
    }
  }
  if (r.size() < 4) fail(ErrorCode::construction, "profile table needs >= 4 rows: " + path);
  return {r, f};
}

}  // namespace

// ---------------------------------------------------------------- spec

ProfileSpec ProfileSpec::parse(const std::string& text) {
  ProfileSpec s;
  auto colon = text.find(':');
  s.kind = text.substr(0, colon);
  if (colon == std::string::npos) return s;
  std::string rest = text.substr(colon + 1);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::config, "profile parameter without '=': " + item);
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "file") {
      s.table_path = val;
      continue;
    }
    try {
      size_t used = 0;
      double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      s.params[key] = v;
    } catch (const std::exception&) {
      fail(ErrorCode::config, "profile parameter " + key + " is not a number: " + val);
    }
  }
  return s;
}

std::string ProfileSpec::to_string() const {
  std::ostringstream o;
  o.precision(17);
  o << kind;
  char sep = ':';
  if (!table_path.empty()) {
    o << sep << "file=" << table_path;
    sep = ',';
  }
  for (const auto& [k, v] : params) {
    o << sep << k << '=' << v;
    sep = ',';
  }
  return o.str();
}

double ProfileSpec::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// ---------------------------------------------------------------- profile

RadialProfile::RadialProfile(ProfileSpec spec, int n, double lambda, std::unique_ptr<Shape> shape, double cutoff)
    : spec_(std::move(spec)), n_(n), lambda_(lambda), shape_(std::move(shape)), cutoff_(cutoff) {
  lo_ = std::max(shape_->lo, cutoff_);
  hi_ = shape_->hi;
  if (!(hi_ > lo_)) fail(ErrorCode::construction, "profile has no support above the cutoff");
  knots_ = quad::clip_knots(lo_, hi_, shape_->knots);

  auto sq = [&](double r) {
    double v = shape_->value(r);
    return v * v;
  };
  auto integrate_raw = [&](double a, double b) {
    auto k = quad::clip_knots(a, b, shape_->knots);
    double total = 0.0;
    for (size_t i = 0; i + 1 < k.size(); ++i) {
      if (shape_->oscillation > 0.0)
        total += quad::panels(sq, k[i], k[i + 1], 0.5 * shape_->oscillation, 1e-13).value;
      else
        total += quad::adaptive(sq, k[i], k[i + 1], 1e-14).value;
    }
    return total;
  };
  double kept = integrate_raw(lo_, hi_) + shape_->tail_norm_sq;
  double below = lo_ > shape_->lo ? integrate_raw(shape_->lo, lo_) : 0.0;
  raw_norm_ = kept + below;
  if (!(kept > 0.0) || !std::isfinite(kept)) fail(ErrorCode::construction, "profile has zero norm above the cutoff");
  truncated_ = below / raw_norm_;
  scale_ = 1.0 / std::sqrt(kept);
  tail_mass_ = shape_->tail_norm_sq / kept;
  l2_ = integrate([&](double r) { return density(r); }, lo_, hi_, 0.0, 1e-14) + tail_mass_;
}

double RadialProfile::amp(double r) const {
  if (r < lo_ || r > hi_) return 0.0;
  return scale_ * shape_->value(r);
}

double RadialProfile::amp_deriv(double r) const {
  if (r < lo_ || r > hi_) return 0.0;
  return scale_ * shape_->deriv(r);
}

double RadialProfile::b(double r) const {
  if (r < lo_ || r > hi_ || r <= 0.0) return 0.0;
  return amp_deriv(r) - 0.5 * (n_ - 1) / r * amp(r);
}

double RadialProfile::f0(double r) const {
  double a = amp(r);
  if (a == 0.0 || r <= 0.0) return 0.0;
  auto sc = specfun::sphere_surface(std::max(n_, 2));
  double l = std::log(std::fabs(a)) - 0.5 * sc.log_s0 - 0.5 * (n_ - 1) * std::log(r);
  return std::copysign(std::exp(l), a);
}

double RadialProfile::integrate(const std::function<double(double)>& g, double lo, double hi, double kernel_period,
                                double rel_tol, double* error) const {
  double a = std::max(lo, lo_), b = std::min(hi, hi_);
  if (error) *error = 0.0;
  if (!(b > a)) return 0.0;
  auto k = quad::clip_knots(a, b, knots_);
  double period = shape_->oscillation;
  if (kernel_period > 0.0) period = period > 0.0 ? std::min(period, kernel_period) : kernel_period;
  double total = 0.0, err = 0.0;
  for (size_t i = 0; i + 1 < k.size(); ++i) {
    quad::Result r = period > 0.0 ? quad::panels(g, k[i], k[i + 1], 0.5 * period, rel_tol)
                                  : quad::adaptive(g, k[i], k[i + 1], rel_tol);
    total += r.value;
    err += r.error;
  }
  if (error) *error = err;
  return total;
}

double RadialProfile::spatial_amp(double x) const {
  if (x <= 0.0) return 0.0;
  const double nu = 0.5 * (n_ - 2);
  auto g = [&](double r) {
    double a = amp(r);
    if (a == 0.0) return 0.0;
    auto j = specfun::bessel_j_scaled(nu, 2.0 * kPi * r * x);
    if (j.mantissa == 0.0) return 0.0;
    return a * j.mantissa * std::exp(j.log_scale) * std::sqrt(r * x);
  };
  // fixed Gauss-Legendre panels: half a kernel period, and fine enough to resolve the profile
  double width = std::min(0.5 / x, (hi_ - lo_) / 48.0);
  if (shape_->oscillation > 0.0) width = std::min(width, 0.5 * shape_->oscillation);
  double total = 0.0;
  for (size_t i = 0; i + 1 < knots_.size(); ++i) {
    double a = knots_[i], b = knots_[i + 1];
    int count = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    double h = (b - a) / count;
    for (int p = 0; p < count; ++p)
      total += boost::math::quadrature::gauss<double, 20>::integrate(g, a + p * h, a + (p + 1) * h);
  }
  return 2.0 * kPi * total;
}

void RadialProfile::build_spatial_cache() const {
  double rc = integrate([&](double r) { return r * density(r); }, lo_, hi_, 0.0, 1e-10);
  rc = std::max(rc, 1e-300);
  double x_typ = std::max(1.0, static_cast<double>(n_)) / (4.0 * kPi * rc);
  double x_hi = 4.0 * std::max(x_typ, 10.0 / (hi_ - lo_));
  double x_lo = 1e-3 * std::min(x_typ, 1.0 / (hi_ + 1e-300));
  const int count = 4096;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<double> t(count), g(count);
    for (int i = 0; i < count; ++i) {
      t[i] = std::log(x_lo) + (std::log(x_hi) - std::log(x_lo)) * i / (count - 1);
      double x = std::exp(t[i]);
      double a = spatial_amp(x);
      g[i] = a * a * x;  // density in ln x
    }
    Pchip pc{std::vector<double>(t), std::vector<double>(g)};
    std::vector<double> cum(count);
    // below x_lo the amplitude behaves like x^{(n-1)/2}
    cum[0] = g[0] / std::max(1, n_);
    for (int i = 0; i + 1 < count; ++i) {
      double h = t[i + 1] - t[i];
      double seg = 0.5 * h * (g[i] + g[i + 1]) + h * h * (pc.prime(t[i]) - pc.prime(t[i + 1])) / 12.0;
      cum[i + 1] = cum[i] + std::max(0.0, seg);
    }
    double expected = l2_ - tail_mass_;
    if (cum.back() >= expected * (1.0 - 1e-8) || attempt == 4) {
      std::vector<double> xs(count);
      for (int i = 0; i < count; ++i) xs[i] = std::exp(t[i]);
      sx_ = std::move(xs);
      scum_ = std::move(cum);
      sx_hi_ = x_hi;
      return;
    }
    x_hi *= 2.0;
  }
}

double RadialProfile::spatial_mass_within(double x) const {
  std::call_once(spatial_once_, [this] { build_spatial_cache(); });
  if (x <= 0.0) return 0.0;
  if (x <= sx_.front()) return scum_.front() * std::pow(x / sx_.front(), std::max(1, n_));
  if (x >= sx_.back()) return scum_.back();
  size_t i = static_cast<size_t>(std::upper_bound(sx_.begin(), sx_.end(), x) - sx_.begin()) - 1;
  // monotone cubic through the cumulative values in ln x
  size_t a = i == 0 ? 0 : i - 1;
  size_t b = std::min(sx_.size() - 1, i + 2);
  std::vector<double> t, c;
  for (size_t k = a; k <= b; ++k) {
    t.push_back(std::log(sx_[k]));
    c.push_back(scum_[k]);
  }
  if (t.size() < 4) {
    double w = (std::log(x) - std::log(sx_[i])) / (std::log(sx_[i + 1]) - std::log(sx_[i]));
    return scum_[i] + w * (scum_[i + 1] - scum_[i]);
  }
  Pchip pc{std::move(t), std::move(c)};
  return pc(std::log(x));
}

double RadialProfile::spatial_grid_hi() const {
  std::call_once(spatial_once_, [this] { build_spatial_cache(); });
  return sx_hi_;
}

// ---------------------------------------------------------------- factories

std::shared_ptr<const RadialProfile> make_profile(const ProfileSpec& spec, int n, double lambda) {
  if (n < 2) fail(ErrorCode::domain, "profile: n must be >= 2");
  if (!(lambda > 0.0)) fail(ErrorCode::domain, "profile: lambda must be positive");
  double cutoff = spec.get("cutoff", 1.0 / lambda);
  if (cutoff < 0.0) fail(ErrorCode::config, "profile: cutoff must be >= 0");
  std::unique_ptr<Shape> shape;
  if (spec.kind == "gaussian") {
    double sigma = require(spec, "sigma");
    if (!(sigma > 0.0)) fail(ErrorCode::config, "gaussian: sigma must be positive");
    shape = std::make_unique<GaussianShape>(n, sigma, cutoff);
  } else if (spec.kind == "shell") {
    double r1 = require(spec, "r1"), r2 = require(spec, "r2");
    if (!(r2 > r1 && r1 >= 0.0)) fail(ErrorCode::config, "shell: need 0 <= r1 < r2");
    shape = std::make_unique<ShellShape>(r1, r2);
  } else if (spec.kind == "single_scale") {
    double a0 = require(spec, "a0");
    if (!(a0 > 0.0 && a0 <= 1.0)) fail(ErrorCode::config, "single_scale: a0 must lie in (0, 1]");
    shape = std::make_unique<SingleScaleShape>(lambda, a0);
  } else if (spec.kind == "two_scale") {
    double a1 = require(spec, "a1"), a2 = require(spec, "a2"), w = spec.get("w", 0.5);
    if (!(a1 > 0.0 && a1 <= 1.0 && a2 > 0.0 && a2 <= 1.0)) fail(ErrorCode::config, "two_scale: scales in (0, 1]");
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorCode::config, "two_scale: w must lie in [0, 1]");
    shape = std::make_unique<TwoScaleShape>(lambda, a1, a2, w);
  } else if (spec.kind == "ball") {
    double R = require(spec, "R");
    if (!(R > 0.0)) fail(ErrorCode::config, "ball: R must be positive");
    bool taper = spec.get("taper", 1.0) != 0.0;
    shape = std::make_unique<BallShape>(n, R, taper, spec.get("zt", 2.0 * n + 20.0), spec.get("zmax", 2000.0));
  } else if (spec.kind == "table") {
    if (spec.table_path.empty()) fail(ErrorCode::config, "table profile needs file=PATH");
    auto [r, f] = read_table(spec.table_path);
    shape = std::make_unique<TableShape>(n, r, f);
  } else {
    fail(ErrorCode::config, "unknown profile kind '" + spec.kind + "'");
  }
  return std::make_shared<const RadialProfile>(spec, n, lambda, std::move(shape), cutoff);
}

std::shared_ptr<const RadialProfile> dilate(const std::shared_ptr<const RadialProfile>& p, double beta,
                                            double new_lambda) {
  if (!(beta > 0.0)) fail(ErrorCode::domain, "dilate: beta must be positive");
  ProfileSpec s = p->spec();
  s.params["dilation"] = s.get("dilation", 1.0) * beta;
  return std::make_shared<const RadialProfile>(s, p->n(), new_lambda, std::make_unique<DilatedShape>(p, beta),
                                               p->cutoff() / beta);
}

// ---------------------------------------------------------------- functionals

double support_radius(const RadialProfile& profile, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::domain, "support_radius: delta must lie in (0, 1)");
  if (std::fabs(profile.l2_norm_sq() - 1.0) > 1e-6)
    fail(ErrorCode::precondition, "support_radius: profile is not normalised");
  const double target = 1.0 - delta;
  double hi = profile.spatial_grid_hi();
  if (profile.spatial_mass_within(hi) < target)
    fail(ErrorCode::numerical, "support_radius: spatial grid does not reach the requested mass");
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    double m = 0.5 * (lo + hi);
    (profile.spatial_mass_within(m) >= target ? hi : lo) = m;
  }
  return hi;
}

double autocorrelation_exact(const RadialProfile& profile, double s_norm) {
  if (!(s_norm >= 0.0) || !std::isfinite(s_norm)) fail(ErrorCode::domain, "autocorrelation: s must be >= 0");
  if (s_norm == 0.0) return profile.l2_norm_sq();
  specfun::BesselOmega omega(0.5 * (profile.n() - 2));
  const double k = 2.0 * kPi * s_norm;
  auto g = [&](double r) {
    double d = profile.density(r);
    return d == 0.0 ? 0.0 : d * omega(k * r);
  };
  return profile.integrate(g, profile.r_lo(), profile.r_hi(), 1.0 / s_norm, 1e-11);
}

MixtureValue autocorrelation_gaussian_mixture(const ScaleDecomposition& decomp, double s_norm) {
  if (!(s_norm >= 0.0)) fail(ErrorCode::domain, "autocorrelation: s must be >= 0");
  const auto& p = *decomp.profile;
  const auto& w = *decomp.window;
  if (p.n() <= 2) fail(ErrorCode::domain, "mixture approximation needs n > 2");
  const double c = 2.0 * kPi * kPi * s_norm * s_norm / (p.n() - 2);
  const double lam = decomp.lambda;
  MixtureValue out;
  for (size_t j = 0; j < decomp.scales.size(); ++j) {
    if (decomp.weights[j] <= 0.0) continue;
    double alo = decomp.grid.lo(static_cast<int>(j)), ahi = decomp.grid.hi(static_cast<int>(j));
    auto g = [&](double r) {
      double bin = w.cumulative(lam * r * ahi) - w.cumulative(lam * r * alo);
      return p.density(r) * bin * std::exp(-c * r * r);
    };
    double rlo = w.support_lo() / (lam * ahi), rhi = w.support_hi() / (lam * alo);
    out.value += p.integrate(g, rlo, rhi, 0.0, 1e-12);
  }
  out.valid = s_norm * p.r_hi() < p.n();
  return out;
}

std::vector<AutocorrelationSample> autocorrelation_curve(const ScaleDecomposition& decomp,
                                                         const std::vector<double>& s_values) {
  std::vector<AutocorrelationSample> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    AutocorrelationSample a;
    a.s = s;
    a.exact = autocorrelation_exact(*decomp.profile, s);
    a.mixture = autocorrelation_gaussian_mixture(decomp, s).value;
    a.gap = std::fabs(a.exact - a.mixture);
    out.push_back(a);
  }
  return out;
}

}  // namespace curvelab::radial
