#pragma once

// the boost header calls isnan unqualified; make the global overloads visible first
#include <math.h>

#include <vector>

#include <boost/math/interpolators/pchip.hpp>

namespace curvelab {
using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
}
