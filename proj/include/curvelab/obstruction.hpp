#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvelab/curvelet.hpp"
#include "curvelab/discrete_oracle.hpp"
#include "curvelab/lattice.hpp"
#include "curvelab/radialfn.hpp"
#include "curvelab/windows.hpp"

namespace curvelab::obstruction {

struct OverlapRadius {
  double value = 0.0;
  double upper_bound = 0.0;  // e lambda a_max sqrt((n-2) ln(1/eps)) / (pi sqrt 2)
  bool reached = true;       // false: zeta never reaches the threshold
  double scan_limit = 0.0;
};

// Largest |s| with zeta(s) >= eps: 512-point log scan, then bisection at the outermost crossing.
OverlapRadius r_overlap(const radial::RadialProfile& profile, const ScaleDecomposition& decomp, double eps,
                        double scan_limit = 0.0);

struct CurvatureRadius {
  double value = 0.0;
  double lower_bound = 0.0;  // lambda a_max sqrt((n-1)(n-2)) / (4 pi)
  bool holds = false;
};

CurvatureRadius r_curv(const ScaleDecomposition& decomp, const curvelet::UncertaintyReport& at_a_max);
CurvatureRadius r_curv(const ScaleDecomposition& decomp,
                       const std::vector<std::optional<curvelet::UncertaintyReport>>& reports);

struct ObstructionConfig {
  double epsilon_ov = -1.0;   // <= 0: 1/n^2
  double delta = 0.01;        // mass left outside r_all
  double weight_floor = -1.0; // <= 0: 1/n^2
  ScaleGrid grid;
  double bound_constant = 0.0;  // C in bound_rhs = C sqrt(ln n / n); 0 leaves bound_rhs at 0
};

struct ObstructionReport {
  int n = 0;
  std::string profile_id;
  double lambda = 1.0;
  double epsilon_ov = 0.0;
  double delta = 0.0;
  double a_max = 0.0;
  double a_max_weight = 0.0;
  double r_overlap = 0.0;
  bool r_overlap_reached = true;
  double r_overlap_upper = 0.0;
  double r_curv = 0.0;
  double r_curv_lower = 0.0;
  double r_all = 0.0;
  double ratio = 0.0;
  double normalized_ratio = 0.0;  // ratio sqrt(n / ln n)
  double bound_constant = 0.0;
  double bound_rhs = 0.0;
  bool passes_threshold = false;    // ratio >= 1 + 1/n
  bool assumption_violated = false; // r_all >= 1/4
  bool overlap_within_bound = false;
  bool curv_above_bound = false;
  double quadrature_error = 0.0;
};

ObstructionReport obstruction_ratio(const std::shared_ptr<const radial::RadialProfile>& profile,
                                    const windows::FrameConstants& frame, const ObstructionConfig& config = {});

// Gaussian sigma in {0.02, 0.04, 0.06}, a shell at a0 = 0.08/sqrt(n), a two-scale mixture at
// (0.32/n, 0.8/n) and a tapered ball of radius 0.2, all with lambda = 1.
std::vector<std::string> default_profile_matrix(int n);

// max of ratio sqrt(n / ln n) over the given reports
double fit_bound_constant(const std::vector<ObstructionReport>& reports);

struct LineHypothesis {
  lattice::Vec b;
  lattice::Vec theta;
  double a = 0.0;
  double tau = 0.0;
};

std::vector<lattice::Vec> epsilon_net_line(const LineHypothesis& hyp, double epsilon);

struct OverlapEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Dual vectors w* drawn with probability proportional to |f^(w*)|^2, fixed at construction, so the
// estimate is a smooth function of t.
class DualSampleEstimator {
 public:
  DualSampleEstimator(const lattice::Lattice& lat, const radial::RadialProfile& profile, size_t num_samples,
                      std::uint64_t seed);
  OverlapEstimate estimate(const lattice::Vec& t) const;
  // sum over every enumerated dual vector, the quantity the samples estimate
  double exact(const lattice::Vec& t) const;
  size_t support_size() const { return support_.size(); }

 private:
  std::vector<lattice::Vec> support_;
  std::vector<double> weight_;
  std::vector<lattice::Vec> samples_;
};

OverlapEstimate estimate_overlap_dual_samples(const lattice::Lattice& lat, const radial::RadialProfile& profile,
                                              const lattice::Vec& t, size_t num_samples, std::uint64_t seed);

struct AscentSchedule {
  double initial_step = 0.05;
  double min_step = 1e-7;
  double fd_step = 1e-5;
  int max_iterations = 400;
};

struct AscentResult {
  lattice::LatticePoint point;  // nearest lattice point to the final iterate
  lattice::Vec final_position;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // overlap value after each accepted step
};

AscentResult gradient_ascent_bdd(const lattice::Lattice& lat, const std::function<double(const lattice::Vec&)>& overlap,
                                 const lattice::Vec& t, const AscentSchedule& schedule = {});

struct ErasureConfig {
  int side = 128;
  double cell = 0.0;     // 0: box of width 0.7 lambda_1
  double tau = 0.0;      // 0: 10 r_all
  double r_all = 0.0;    // 0: from the profile with delta = 0.01
  std::uint64_t seed = 1;
  size_t trials = 2000;
};

struct ErasurePoint {
  double r = 0.0;
  size_t successes = 0;
  size_t trials = 0;
  double probability = 0.0;
  double stderr_ = 0.0;
};

struct ErasureRun {
  std::vector<ErasurePoint> points;
  std::vector<double> b_distance;  // |b - x| per trial
  double tau = 0.0;
  double column_defect = 0.0;
  double mean_sq_distance = 0.0;  // empirical E[d(l(b,theta), x)^2]
};

// n = 2. Samples (a, b, theta) once per trial and reuses the draws for every radius.
ErasureRun simulate_index_erasure(const lattice::Lattice& lat, const radial::RadialProfile& profile,
                                  const discrete::DiscreteFrame& frame, const std::vector<double>& radii,
                                  const ErasureConfig& config = {});

}  // namespace curvelab::obstruction
