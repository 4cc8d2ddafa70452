#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvelab/radialfn.hpp"
#include "curvelab/scales.hpp"
#include "curvelab/windows.hpp"

namespace curvelab::curvelet {

ScaleDecomposition scale_weights(const std::shared_ptr<const radial::RadialProfile>& profile,
                                 const windows::FrameConstants& frame, ScaleGrid grid = {},
                                 double weight_floor = -1.0);

// int_0^1 int chi_{a,theta}(k)^2 dsigma(theta) da/a at |k| = k_norm
double window_identity(const windows::FrameConstants& frame, double k_norm);

// int_{S^{n-2}} cos^2 phi_2 dsigma by quadrature over phi_2; n >= 3
double i2_quadrature(int n);

// int |f^(k)|^2 W(lambda a |k|)^2 dk
double single_scale_mass(const radial::RadialProfile& profile, const windows::FrameConstants& frame, double a);

struct LemmaSlack {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool holds = false;
};

struct UncertaintyReport {
  int n = 0;
  double a = 0.0;
  double lambda = 1.0;
  double gamma_mass = 0.0;
  // radial integrals multiplied by S0 (finite at every n)
  double s0_i_ar = 0.0, s0_i_br = 0.0, s0_i_cr = 0.0;
  double i_ar = 0.0, i_br = 0.0, i_cr = 0.0;
  double i_a1 = 0.0, i_b1 = 0.0, i_c1 = 0.0, i_2 = 0.0;
  double i_a = 0.0, i_b = 0.0, i_c = 0.0;
  double T = 0.0;
  double x_second_moment = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double quadrature_error = 0.0;
  // integration by parts: I_Br = -(n-2)/2 I_Cr
  double s0_i_br_by_parts = 0.0;
  std::vector<LemmaSlack> lemma_slacks;

  double expected_sq_distance() const { return gamma_mass > 0 ? T / gamma_mass : 0.0; }
  bool sandwich_holds() const { return lower_bound <= T * (1 + 1e-12) && T <= upper_bound * (1 + 1e-12); }
  bool lemmas_hold() const;
};

UncertaintyReport uncertainty_T(const radial::RadialProfile& profile, const windows::FrameConstants& frame, double a);

double uncertainty_lower_bound(const UncertaintyReport& report, const windows::FrameConstants& frame);
double uncertainty_upper_bound(const UncertaintyReport& report, const windows::FrameConstants& frame);

// Reports for every bin whose weight and center-scale mass exceed min_weight; other entries are empty.
std::vector<std::optional<UncertaintyReport>> scan_uncertainty(const ScaleDecomposition& decomp,
                                                               const windows::FrameConstants& frame,
                                                               double min_weight = 1e-9, int jobs = 1);

enum class ConditionMode { at_least, at_most };

struct ConditionalResult {
  double expected_sq_distance = 0.0;
  double expected_x_second_moment = 0.0;
  double mass = 0.0;
  // right-hand sides of the scale-conditioned lower (at_least) or upper (at_most) bound
  double bound_rhs = 0.0;
  bool bound_holds = false;
};

ConditionalResult conditional_uncertainty(const ScaleDecomposition& decomp,
                                          const std::vector<std::optional<UncertaintyReport>>& reports,
                                          const windows::FrameConstants& frame, double eta, ConditionMode mode);

}  // namespace curvelab::curvelet
