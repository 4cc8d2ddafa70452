#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace curvelab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

// Globally adaptive Gauss-Kronrod (31 points per panel): the panel with the largest error estimate is
// bisected until the summed estimate drops below tol * int |f|. The tolerance is floored at 100 ulp so
// that roundoff in the estimates cannot drive endless refinement.
template <class F>
Result adaptive(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_panels = 4000) {
  Result r;
  if (!(b > a)) return r;
  struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  // the panel is mapped onto [-1, 1] here: boost's own mapping leaves its roundoff floor unscaled by the
  // half-width, which stalls refinement on short panels
  auto eval = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0, 0.0};
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    auto g = [&](double u) { return h * f(c + h * u); };
    p.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  const double tol = std::max(rel_tol, 100.0 * std::numeric_limits<double>::epsilon());
  std::priority_queue<Panel> heap;
  Panel first = eval(a, b);
  double value = first.value, error = first.error, l1 = first.l1;
  heap.push(first);
  while (error > tol * l1 && heap.size() < max_panels) {
    Panel p = heap.top();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    heap.pop();
    Panel left = eval(p.a, mid), right = eval(mid, p.b);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
  }
  // resum to shed the drift of the running updates
  value = error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = value;
  r.error = error;
  return r;
}

// Piecewise adaptive integration over sorted breakpoints.
template <class F>
Result adaptive_pieces(F&& f, const std::vector<double>& knots, double rel_tol = 1e-13) {
  Result total;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) continue;
    Result p = adaptive(f, knots[i], knots[i + 1], rel_tol);
    total.value += p.value;
    total.error += p.error;
  }
  return total;
}

// Fixed panels of at most `width`, each refined adaptively. Used for oscillatory kernels.
template <class F>
Result panels(F&& f, double a, double b, double width, double rel_tol = 1e-12) {
  Result total;
  if (!(b > a)) return total;
  size_t count = static_cast<size_t>(std::ceil((b - a) / std::max(width, 1e-300)));
  count = std::clamp<size_t>(count, 1, 2000000);
  double h = (b - a) / static_cast<double>(count);
  for (size_t i = 0; i < count; ++i) {
    double lo = a + h * static_cast<double>(i);
    double hi = (i + 1 == count) ? b : lo + h;
    Result p = adaptive(f, lo, hi, rel_tol, 64);
    total.value += p.value;
    total.error += p.error;
  }
  return total;
}

// Interval [lo, hi] clipped to [a, b] with knots inside kept; returns sorted unique knots.
inline std::vector<double> clip_knots(double lo, double hi, const std::vector<double>& inner) {
  std::vector<double> k;
  if (!(hi > lo)) return k;
  k.push_back(lo);
  for (double x : inner)
    if (x > lo && x < hi) k.push_back(x);
  k.push_back(hi);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

}  // namespace curvelab::quad
