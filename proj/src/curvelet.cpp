#include "curvelab/curvelet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "curvelab/errors.hpp"
#include "curvelab/parallel.hpp"
#include "curvelab/quadrature.hpp"

namespace curvelab {

double ScaleGrid::center(int j) const { return std::exp(-j * bin_width); }
double ScaleGrid::lo(int j) const { return std::exp(-(j + 0.5) * bin_width); }
double ScaleGrid::hi(int j) const { return std::min(1.0, std::exp(-(j - 0.5) * bin_width)); }

double ScaleDecomposition::h0_amp(int j, double r) const {
  return profile->amp(r) * (*window)(lambda * scales.at(j) * r);
}

namespace curvelet {

namespace {
constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);
const double kSqrt2 = std::sqrt(2.0);

LemmaSlack slack(const std::string& name, double value, double lo, double hi) {
  LemmaSlack s{name, value, lo, hi, false};
  double scale = std::max({std::fabs(lo), std::fabs(hi), std::fabs(value)});
  if (!std::isfinite(scale) || scale == 0.0) scale = 1e-300;
  double tol = 1e-9 * scale;
  s.holds = value >= lo - tol && value <= hi + tol;
  return s;
}
}  // namespace

bool UncertaintyReport::lemmas_hold() const {
  for (const auto& s : lemma_slacks)
    if (!s.holds) return false;
  return true;
}

ScaleDecomposition scale_weights(const std::shared_ptr<const radial::RadialProfile>& profile,
                                 const windows::FrameConstants& frame, ScaleGrid grid, double weight_floor) {
  const auto& p = *profile;
  const double lam = frame.lambda();
  const auto& w = frame.radial();
  if (!(grid.bin_width > 0.0)) fail(ErrorCode::domain, "scale grid: bin width must be positive");
  if (p.r_lo() < (1.0 - 1e-12) / lam) {
    std::ostringstream o;
    o << "scale grid: profile carries frequencies in [" << p.r_lo() << ", " << 1.0 / lam
      << ") below the cutoff 1/lambda (annulus not covered by any scale a <= 1)";
    fail(ErrorCode::coverage, o.str());
  }
  // smallest scale that still touches the top of the support
  double a_need = w.support_lo() / (lam * p.r_hi());
  if (grid.count <= 0) grid.count = static_cast<int>(std::ceil(-std::log(a_need) / grid.bin_width - 0.5)) + 1;
  double a_floor = grid.lo(grid.count - 1);
  if (a_floor > a_need * (1.0 + 1e-12) || p.tail_mass() > 1e-12) {
    std::ostringstream o;
    double r_cov = w.support_lo() / (lam * a_floor);
    o << "scale grid: frequency annulus (" << r_cov << ", " << (p.tail_mass() > 1e-12 ? INFINITY : p.r_hi())
      << "] is not covered by the " << grid.count << " bins";
    fail(ErrorCode::coverage, o.str());
  }

  ScaleDecomposition d;
  d.n = p.n();
  d.lambda = lam;
  d.grid = grid;
  d.profile = profile;
  d.window = frame.radial_ptr();
  d.weight_floor = weight_floor >= 0.0 ? weight_floor : 1.0 / (static_cast<double>(p.n()) * p.n());
  d.scales.resize(grid.count);
  d.weights.resize(grid.count);
  for (int j = 0; j < grid.count; ++j) {
    double alo = grid.lo(j), ahi = grid.hi(j);
    d.scales[j] = grid.center(j);
    // inner da/a integral in closed form through the window's cumulative
    auto g = [&](double r) {
      double rho = p.density(r);
      if (rho == 0.0) return 0.0;
      return rho * (w.cumulative(lam * r * ahi) - w.cumulative(lam * r * alo));
    };
    double err = 0.0;
    double rlo = w.support_lo() / (lam * ahi), rhi = w.support_hi() / (lam * alo);
    d.weights[j] = std::max(0.0, p.integrate(g, rlo, rhi, 0.0, 1e-13, &err));
    d.quadrature_error += err;
    d.weight_sum += d.weights[j];
  }
  for (int j = 0; j < grid.count; ++j) {
    if (d.weights[j] >= d.weight_floor) {
      d.a_max = d.scales[j];
      d.a_max_index = j;
      break;
    }
  }
  return d;
}

double window_identity(const windows::FrameConstants& frame, double k_norm) {
  if (!(k_norm > 0.0)) fail(ErrorCode::domain, "window_identity: k_norm must be positive");
  const double lam = frame.lambda();
  const auto& w = frame.radial();
  double alo = w.support_lo() / (lam * k_norm);
  double ahi = std::min(1.0, w.support_hi() / (lam * k_norm));
  if (!(ahi > alo)) return 0.0;
  // theta integral of chi^2: C^2 times the polar-angle quadrature of V^2, which is 1 by the choice of C
  auto g = [&](double t) {
    double a = std::exp(t);
    double wv = w(lam * a * k_norm);
    if (wv == 0.0) return 0.0;
    double angular = std::exp(windows::log_c_inv2_polar(frame, a) - frame.log_c_inv2(a));
    return wv * wv * angular;
  };
  std::vector<double> knots;
  for (double r : w.knots()) knots.push_back(std::log(r / (lam * k_norm)));
  auto k = quad::clip_knots(std::log(alo), std::log(ahi), knots);
  return quad::adaptive_pieces(g, k, 1e-13).value;
}

double i2_quadrature(int n) {
  if (n < 3) fail(ErrorCode::domain, "i2_quadrature: n must be >= 3");
  // area of S^{n-3} times the polar integral
  double outer = specfun::sphere_surface(n - 1).s0_prime;
  auto g = [&](double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    return c * c * std::pow(s, n - 3);
  };
  return outer * quad::adaptive_pieces(g, {0.0, 0.5 * kPi, kPi}, 1e-14).value;
}

double single_scale_mass(const radial::RadialProfile& profile, const windows::FrameConstants& frame, double a) {
  if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::domain, "single_scale_mass: a must lie in (0, 1]");
  const double lam = frame.lambda();
  const auto& w = frame.radial();
  auto g = [&](double r) {
    double v = w(lam * a * r);
    return v == 0.0 ? 0.0 : profile.density(r) * v * v;
  };
  return profile.integrate(g, w.support_lo() / (lam * a), w.support_hi() / (lam * a), 0.0, 1e-13);
}

double uncertainty_lower_bound(const UncertaintyReport& r, const windows::FrameConstants& frame) {
  const int n = frame.n();
  const double lam = frame.lambda();
  return frame.min_moment_ratio() * (r.a / kSqrt2) * r.x_second_moment +
         (n - 1.0) * (n - 2.0) * lam * lam * r.a * r.a * r.gamma_mass / (16.0 * kPi * kPi);
}

double uncertainty_upper_bound(const UncertaintyReport& r, const windows::FrameConstants& frame) {
  const int n = frame.n();
  const double lam = frame.lambda();
  const double e2l2 = kE * kE * lam * lam;
  return (r.a / kSqrt2) * r.x_second_moment +
         ((n - 1.0) * (n - 2.0) * e2l2 * r.a * r.a / (8.0 * kPi * kPi) +
          frame.mprime_over_m() * e2l2 * r.a / (4.0 * kPi * kPi)) *
             r.gamma_mass;
}

UncertaintyReport uncertainty_T(const radial::RadialProfile& profile, const windows::FrameConstants& frame, double a) {
  if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::domain, "uncertainty_T: a must lie in (0, 1]");
  const int n = frame.n();
  const double lam = frame.lambda();
  const auto& w = frame.radial();
  const auto& sph = frame.sphere();
  const double la = lam * a;
  const double rlo = w.support_lo() / la, rhi = w.support_hi() / la;

  UncertaintyReport rep;
  rep.n = n;
  rep.a = a;
  rep.lambda = lam;
  double err = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0;
  rep.gamma_mass = single_scale_mass(profile, frame, a);
  if (!(rep.gamma_mass > 0.0)) {
    std::ostringstream o;
    o << "uncertainty_T: zero mass at scale a = " << a;
    fail(ErrorCode::degenerate, o.str());
  }
  // H0 and its radial derivative in amplitude units
  auto h = [&](double r) { return profile.amp(r) * w(la * r); };
  auto hp = [&](double r) { return profile.b(r) * w(la * r) + la * profile.amp(r) * w.deriv(la * r); };
  rep.s0_i_ar = profile.integrate([&](double r) { double v = hp(r); return v * v; }, rlo, rhi, 0.0, 1e-12, &e1);
  rep.s0_i_br = profile.integrate([&](double r) { return h(r) * hp(r) / r; }, rlo, rhi, 0.0, 1e-12, &e2);
  rep.s0_i_cr = profile.integrate([&](double r) { double v = h(r); return v * v / (r * r); }, rlo, rhi, 0.0, 1e-12, &e3);
  err = e1 + e2 + e3;
  rep.s0_i_br_by_parts = -0.5 * (n - 2) * rep.s0_i_cr;
  rep.i_ar = rep.s0_i_ar / sph.s0;
  rep.i_br = rep.s0_i_br / sph.s0;
  rep.i_cr = rep.s0_i_cr / sph.s0;

  auto ang = frame.angular_ratios(a);
  const double sp = sph.s0_prime;
  rep.i_2 = sp / (n - 1);
  rep.i_a1 = a * ang.a1_over_d / sp;
  rep.i_b1 = ang.b1_over_d / sp;
  rep.i_c1 = ang.c1_over_d / (a * sp);
  rep.i_a = rep.i_ar * rep.i_a1 * rep.i_2;
  rep.i_b = rep.i_br * rep.i_b1 * rep.i_2;
  rep.i_c = rep.i_cr * rep.i_c1 * rep.i_2;
  rep.T = sph.s0 * (n - 1) / (4.0 * kPi * kPi) * (rep.i_a + 2.0 * rep.i_b + rep.i_c);
  rep.x_second_moment = rep.s0_i_ar / (4.0 * kPi * kPi);
  rep.quadrature_error = err / (4.0 * kPi * kPi);
  rep.lower_bound = uncertainty_lower_bound(rep, frame);
  rep.upper_bound = uncertainty_upper_bound(rep, frame);

  const double ee = kE * kE;
  const double g = rep.gamma_mass;
  const double mn = frame.min_moment_ratio();
  rep.lemma_slacks.push_back(slack("I_B1", rep.i_b1, -(n - 1.0) / (2.0 * sp), -(n - 1.0) / (4.0 * sp)));
  rep.lemma_slacks.push_back(slack("I_Br", rep.s0_i_br, -0.5 * (n - 2) * ee * la * la * g, -0.5 * (n - 2) * la * la * g));
  rep.lemma_slacks.push_back(slack("I_A1", rep.i_a1, mn * a / (kSqrt2 * sp), a / (kSqrt2 * sp)));
  rep.lemma_slacks.push_back(slack("I_C1", rep.i_c1, 0.0, frame.mprime_over_m() / (a * sp)));
  rep.lemma_slacks.push_back(slack("I_Cr", rep.s0_i_cr, la * la * g, ee * la * la * g));
  return rep;
}

std::vector<std::optional<UncertaintyReport>> scan_uncertainty(const ScaleDecomposition& decomp,
                                                               const windows::FrameConstants& frame, double min_weight,
                                                               int jobs) {
  std::vector<std::optional<UncertaintyReport>> out(decomp.scales.size());
  parallel_for(decomp.scales.size(), jobs, [&](size_t j) {
    if (!(decomp.weights[j] > min_weight)) return;
    // the bin weight integrates over the bin, T lives at its center, which can miss the support
    if (!(single_scale_mass(*decomp.profile, frame, decomp.scales[j]) > min_weight)) return;
    out[j] = uncertainty_T(*decomp.profile, frame, decomp.scales[j]);
  });
  return out;
}

ConditionalResult conditional_uncertainty(const ScaleDecomposition& decomp,
                                          const std::vector<std::optional<UncertaintyReport>>& reports,
                                          const windows::FrameConstants& frame, double eta, ConditionMode mode) {
  if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorCode::domain, "conditional_uncertainty: eta must lie in (0, 1]");
  if (reports.size() != decomp.scales.size()) fail(ErrorCode::precondition, "conditional_uncertainty: report count mismatch");
  ConditionalResult c;
  double d2 = 0.0, x2 = 0.0;
  for (size_t j = 0; j < reports.size(); ++j) {
    if (!reports[j]) continue;
    double a = decomp.scales[j];
    bool in = mode == ConditionMode::at_least ? a >= eta : a <= eta;
    if (!in) continue;
    const auto& r = *reports[j];
    double wgt = decomp.weights[j];
    c.mass += wgt;
    d2 += wgt * r.T / r.gamma_mass;
    x2 += wgt * r.x_second_moment / r.gamma_mass;
  }
  if (c.mass < 1e-9) fail(ErrorCode::conditioning, "conditional_uncertainty: conditioning event has no mass");
  c.expected_sq_distance = d2 / c.mass;
  c.expected_x_second_moment = x2 / c.mass;
  const int n = frame.n();
  const double lam = frame.lambda();
  if (mode == ConditionMode::at_least) {
    c.bound_rhs = frame.min_moment_ratio() * eta / kSqrt2 * c.expected_x_second_moment +
                  (n - 1.0) * (n - 2.0) * lam * lam * eta * eta / (16.0 * kPi * kPi);
    c.bound_holds = c.expected_sq_distance >= c.bound_rhs * (1.0 - 1e-12);
  } else {
    const double e2l2 = kE * kE * lam * lam;
    c.bound_rhs = eta / kSqrt2 * c.expected_x_second_moment + (n - 1.0) * (n - 2.0) * e2l2 * eta * eta / (8.0 * kPi * kPi) +
                  frame.mprime_over_m() * e2l2 * eta / (4.0 * kPi * kPi);
    c.bound_holds = c.expected_sq_distance <= c.bound_rhs * (1.0 + 1e-12);
  }
  return c;
}

}  // namespace curvelet
}  // namespace curvelab
