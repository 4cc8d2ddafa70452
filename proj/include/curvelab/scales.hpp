#pragma once

#include <memory>
#include <vector>

namespace curvelab {

namespace radial {
class RadialProfile;
}
namespace windows {
class RadialWindow;
}

// Log-spaced scale bins a_j = exp(-j * width), bin j covering ln a in [-(j+1/2) width, -(j-1/2) width] clipped at a <= 1.
struct ScaleGrid {
  double bin_width = 0.125;
  int count = 0;  // j = 0 .. count-1; 0 means choose from the profile support

  double center(int j) const;
  double lo(int j) const;
  double hi(int j) const;
};

struct ScaleDecomposition {
  int n = 0;
  double lambda = 1.0;
  ScaleGrid grid;
  std::vector<double> scales;
  std::vector<double> weights;
  double weight_floor = 0.0;
  double a_max = 0.0;
  int a_max_index = -1;
  double weight_sum = 0.0;
  double quadrature_error = 0.0;
  std::shared_ptr<const radial::RadialProfile> profile;
  std::shared_ptr<const windows::RadialWindow> window;

  // H_0(r) = F_0(r) W(lambda a_j r) at bin j, in amplitude units sqrt(S0) r^{(n-1)/2} H_0
  double h0_amp(int j, double r) const;
};

}  // namespace curvelab
