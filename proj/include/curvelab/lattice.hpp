#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace curvelab::lattice {

using Vec = std::vector<double>;
using Coeffs = std::vector<long long>;

struct Lattice {
  int n = 0;
  std::vector<Vec> basis;  // columns b_1..b_n
  std::vector<Vec> bstar;  // Gram-Schmidt vectors
  std::vector<Vec> mu;     // mu[i][j] = <b_i, b*_j>/|b*_j|^2 for j < i
  Vec bstar_sq;
  double det_abs = 0.0;
  double lambda1 = 0.0;
  bool lambda1_exact = false;  // false: first reduced vector, an upper bound
  bool exact_arithmetic = false;

  Vec point(const Coeffs& x) const;
  Vec point(const Vec& x) const;
  // size reduction |mu| <= 1/2 and Lovasz condition, checked on the stored Gram-Schmidt data
  bool is_lll_reduced(double delta = 0.99, double tol = 1e-9) const;
  double hermite_bound() const;       // sqrt(n) |det|^{1/n}
  double factorial_bound() const;     // 2 (n!)^{1/n} |det|^{1/n}
};

// Gram-Schmidt data for the basis as given; fails on a singular basis.
Lattice from_basis(const std::vector<Vec>& columns);

// Exact rational arithmetic when n <= 8 and every entry is an integer; doubles otherwise.
Lattice lll_reduce(const std::vector<Vec>& columns, double delta = 0.99);

// Rows of B, one per line; basis vectors are the columns.
std::vector<Vec> parse_basis_text(const std::string& text);
std::vector<Vec> read_basis_file(const std::string& path);

struct LatticePoint {
  Coeffs coeffs;
  Vec point;
  double distance = 0.0;
};

LatticePoint babai_nearest_plane(const Lattice& lat, const Vec& t);

// Calls fn for every lattice point v with |v - center| <= radius. fn may return a smaller radius to prune.
void enumerate_ball(const Lattice& lat, const Vec& center, double radius,
                    const std::function<double(const Coeffs&, double dist_sq)>& fn);

double lambda1_enum(const Lattice& lat);  // n <= 8
LatticePoint closest_vector(const Lattice& lat, const Vec& t);

Lattice scale(const Lattice& lat, double beta);
Lattice normalize_lambda1(const Lattice& lat);
Lattice dual(const Lattice& lat);

// LLL-reduced random integer lattice with entries in [-range, range].
Lattice random_lattice(int n, std::uint64_t seed, int range = 20);

struct QSpec {
  int n = 0;
  int kappa = 1;
  int ell = 1;
  double c_const = 1.0;
  double log2_m_prime = 0.0;  // M' kept as a base-2 exponent
  double log2_m = 0.0;        // M = 2^kappa n M'
  double overlap_floor = 0.0;  // 1 - 2^{-kappa-1}
};

QSpec make_qspec(int n, int kappa, int ell, double c_const = 1.0);

struct Sandwich {
  double lower = 0.0;
  double upper = 0.0;
};

// Bounds on the overlap of the Q-restricted state; requires v_inf_norm_bound < M'.
Sandwich q_overlap_sandwich(const QSpec& q, double zeta_value, double v_inf_norm_bound);

// |Q cap (Q + w)| for Q = {-M..M}^n, by the product formula.
double q_intersection_count(long long m, const std::vector<long long>& w);

}  // namespace curvelab::lattice
