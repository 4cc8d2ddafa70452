#include "curvelab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "curvelab/errors.hpp"

namespace curvelab::lattice {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(double x) { return x; }
double to_double(const Rational& x) { return x.convert_to<double>(); }

double round_half(double x) { return std::floor(x + 0.5); }
Rational round_half(const Rational& x) {
  Rational y = x + Rational(1, 2);
  BigInt num = boost::multiprecision::numerator(y);
  BigInt den = boost::multiprecision::denominator(y);
  BigInt q = num / den;
  if (num % den != 0 && num < 0) q -= 1;
  return Rational(q);
}

bool is_zero(double x, double scale) { return std::fabs(x) <= 1e-20 * scale; }
bool is_zero(const Rational& x, double) { return x == 0; }

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
struct Gso {
  std::vector<std::vector<T>> b, bs, mu;
  std::vector<T> bsq;
  double scale = 1.0;

  void compute() {
    const size_t n = b.size();
    bs = b;
    mu.assign(n, std::vector<T>(n, T(0)));
    bsq.assign(n, T(0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(b[i], bs[j]) / bsq[j];
        for (size_t d = 0; d < bs[i].size(); ++d) bs[i][d] -= mu[i][j] * bs[j][d];
      }
      bsq[i] = dot(bs[i], bs[i]);
      if (is_zero(bsq[i], scale)) fail(ErrorCode::degenerate, "lattice basis is singular");
    }
  }
};

template <class T>
void lll_core(Gso<T>& g, const T& delta) {
  const int n = static_cast<int>(g.b.size());
  g.compute();
  int k = 1;
  long long guard = 0;
  while (k < n) {
    if (++guard > 10000000) fail(ErrorCode::numerical, "LLL did not terminate");
    for (int j = k - 1; j >= 0; --j) {
      T q = round_half(g.mu[k][j]);
      if (q == 0) continue;
      for (size_t d = 0; d < g.b[k].size(); ++d) g.b[k][d] -= q * g.b[j][d];
      for (int i = 0; i < j; ++i) g.mu[k][i] -= q * g.mu[j][i];
      g.mu[k][j] -= q;
    }
    T m = g.mu[k][k - 1];
    if (g.bsq[k] >= (delta - m * m) * g.bsq[k - 1]) {
      ++k;
    } else {
      std::swap(g.b[k], g.b[k - 1]);
      g.compute();
      k = std::max(k - 1, 1);
    }
  }
}

template <class T>
Lattice to_lattice(const Gso<T>& g, bool exact) {
  Lattice L;
  L.n = static_cast<int>(g.b.size());
  L.exact_arithmetic = exact;
  auto conv = [](const std::vector<T>& v) {
    Vec out;
    for (auto& x : v) out.push_back(to_double(x));
    return out;
  };
  double log_det = 0.0;
  for (int i = 0; i < L.n; ++i) {
    L.basis.push_back(conv(g.b[i]));
    L.bstar.push_back(conv(g.bs[i]));
    L.mu.push_back(conv(g.mu[i]));
    L.bstar_sq.push_back(to_double(g.bsq[i]));
    log_det += 0.5 * std::log(L.bstar_sq.back());
  }
  L.det_abs = std::exp(log_det);
  L.lambda1 = std::sqrt(dot(L.basis[0], L.basis[0]));
  return L;
}

void check_columns(const std::vector<Vec>& columns) {
  const size_t n = columns.size();
  if (n == 0) fail(ErrorCode::domain, "lattice basis is empty");
  for (auto& c : columns) {
    if (c.size() != n) fail(ErrorCode::domain, "lattice basis must be square");
    for (double x : c)
      if (!std::isfinite(x)) fail(ErrorCode::domain, "lattice basis has a non-finite entry");
  }
}

double max_sq(const std::vector<Vec>& columns) {
  double m = 0.0;
  for (auto& c : columns) m = std::max(m, dot(c, c));
  return m;
}

}  // namespace

Vec Lattice::point(const Coeffs& x) const {
  Vec p(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < n; ++d) p[d] += static_cast<double>(x[i]) * basis[i][d];
  return p;
}

Vec Lattice::point(const Vec& x) const {
  Vec p(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < n; ++d) p[d] += x[i] * basis[i][d];
  return p;
}

bool Lattice::is_lll_reduced(double delta, double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::fabs(mu[i][j]) > 0.5 + tol) return false;
  for (int k = 1; k < n; ++k) {
    double m = mu[k][k - 1];
    if (bstar_sq[k] < (delta - m * m) * bstar_sq[k - 1] * (1.0 - tol)) return false;
  }
  return true;
}

double Lattice::hermite_bound() const { return std::sqrt(static_cast<double>(n)) * std::pow(det_abs, 1.0 / n); }

double Lattice::factorial_bound() const {
  return 2.0 * std::exp(std::lgamma(n + 1.0) / n) * std::pow(det_abs, 1.0 / n);
}

Lattice from_basis(const std::vector<Vec>& columns) {
  check_columns(columns);
  Gso<double> g;
  g.b = columns;
  g.scale = max_sq(columns);
  g.compute();
  return to_lattice(g, false);
}

Lattice lll_reduce(const std::vector<Vec>& columns, double delta) {
  check_columns(columns);
  if (!(delta > 0.25 && delta < 1.0)) fail(ErrorCode::domain, "LLL: delta must lie in (1/4, 1)");
  const int n = static_cast<int>(columns.size());
  bool integer = true;
  for (auto& c : columns)
    for (double x : c)
      if (x != std::round(x) || std::fabs(x) > 9.0e15) integer = false;
  Lattice L;
  if (integer && n <= 8) {
    Gso<Rational> g;
    for (auto& c : columns) {
      std::vector<Rational> v;
      for (double x : c) v.emplace_back(static_cast<long long>(x));
      g.b.push_back(v);
    }
    // delta as an exact binary fraction
    Rational d(static_cast<long long>(std::llround(delta * (1LL << 40))), 1LL << 40);
    lll_core(g, d);
    L = to_lattice(g, true);
  } else {
    Gso<double> g;
    g.b = columns;
    g.scale = max_sq(columns);
    lll_core(g, delta);
    L = to_lattice(g, false);
  }
  if (n <= 8) {
    L.lambda1 = lambda1_enum(L);
    L.lambda1_exact = true;
  }
  return L;
}

std::vector<Vec> parse_basis_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Vec> rows;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Vec row;
    std::string tok;
    while (ls >> tok) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) fail(ErrorCode::config, "basis text: bad entry '" + tok + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(row);
  }
  const size_t n = rows.size();
  if (n == 0) fail(ErrorCode::config, "basis text: no rows");
  for (auto& r : rows)
    if (r.size() != n) fail(ErrorCode::config, "basis text: matrix is not square");
  std::vector<Vec> cols(n, Vec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) cols[j][i] = rows[i][j];
  return cols;
}

std::vector<Vec> read_basis_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open basis file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_basis_text(ss.str());
}

LatticePoint babai_nearest_plane(const Lattice& lat, const Vec& t) {
  if (static_cast<int>(t.size()) != lat.n) fail(ErrorCode::domain, "babai: target has wrong dimension");
  Vec r = t;
  LatticePoint out;
  out.coeffs.assign(lat.n, 0);
  for (int j = lat.n - 1; j >= 0; --j) {
    double c = std::round(dot(r, lat.bstar[j]) / lat.bstar_sq[j]);
    out.coeffs[j] = static_cast<long long>(c);
    for (int d = 0; d < lat.n; ++d) r[d] -= c * lat.basis[j][d];
  }
  out.point = lat.point(out.coeffs);
  out.distance = std::sqrt(dot(r, r));
  return out;
}

void enumerate_ball(const Lattice& lat, const Vec& center, double radius,
                    const std::function<double(const Coeffs&, double)>& fn) {
  const int n = lat.n;
  if (static_cast<int>(center.size()) != n) fail(ErrorCode::domain, "enumerate: center has wrong dimension");
  if (!(radius >= 0.0)) fail(ErrorCode::domain, "enumerate: radius must be >= 0");
  Vec c(n);
  for (int j = 0; j < n; ++j) c[j] = dot(center, lat.bstar[j]) / lat.bstar_sq[j];
  double r2 = radius * radius;
  Coeffs x(n, 0);
  std::function<void(int, double)> rec = [&](int j, double partial) {
    double ctr = c[j];
    for (int i = j + 1; i < n; ++i) ctr -= static_cast<double>(x[i]) * lat.mu[i][j];
    double room = r2 - partial;
    if (room < 0.0) return;
    double w = std::sqrt(room / lat.bstar_sq[j]);
    long long lo = static_cast<long long>(std::ceil(ctr - w));
    long long hi = static_cast<long long>(std::floor(ctr + w));
    for (long long v = lo; v <= hi; ++v) {
      double y = static_cast<double>(v) - ctr;
      double p = partial + y * y * lat.bstar_sq[j];
      if (p > r2) continue;
      x[j] = v;
      if (j == 0)
        r2 = std::min(r2, fn(x, p));
      else
        rec(j - 1, p);
    }
    x[j] = 0;
  };
  rec(n - 1, 0.0);
}

double lambda1_enum(const Lattice& lat) {
  if (lat.n > 8) fail(ErrorCode::capability, "lambda1_enum: exact enumeration is limited to n <= 8");
  double best = std::sqrt(dot(lat.basis[0], lat.basis[0]));
  for (auto& b : lat.basis) best = std::min(best, std::sqrt(dot(b, b)));
  double best_sq = best * best;
  Vec zero(lat.n, 0.0);
  enumerate_ball(lat, zero, best * (1.0 + 1e-9), [&](const Coeffs& x, double d2) {
    bool nonzero = std::any_of(x.begin(), x.end(), [](long long v) { return v != 0; });
    if (nonzero && d2 < best_sq) best_sq = d2;
    return best_sq * (1.0 + 1e-12);
  });
  return std::sqrt(best_sq);
}

LatticePoint closest_vector(const Lattice& lat, const Vec& t) {
  if (lat.n > 8) fail(ErrorCode::capability, "closest_vector: exact enumeration is limited to n <= 8");
  LatticePoint best = babai_nearest_plane(lat, t);
  double best_sq = best.distance * best.distance;
  enumerate_ball(lat, t, best.distance * (1.0 + 1e-9) + 1e-300, [&](const Coeffs& x, double d2) {
    if (d2 < best_sq) {
      best_sq = d2;
      best.coeffs = x;
    }
    return best_sq * (1.0 + 1e-12);
  });
  best.point = lat.point(best.coeffs);
  Vec r = t;
  for (int d = 0; d < lat.n; ++d) r[d] -= best.point[d];
  best.distance = std::sqrt(dot(r, r));
  return best;
}

Lattice scale(const Lattice& lat, double beta) {
  if (!(beta > 0.0)) fail(ErrorCode::domain, "scale: beta must be positive");
  Lattice L = lat;
  for (auto& v : L.basis)
    for (auto& x : v) x *= beta;
  for (auto& v : L.bstar)
    for (auto& x : v) x *= beta;
  for (auto& x : L.bstar_sq) x *= beta * beta;
  L.det_abs *= std::pow(beta, lat.n);
  L.lambda1 *= beta;
  L.exact_arithmetic = false;
  return L;
}

Lattice normalize_lambda1(const Lattice& lat) {
  if (!lat.lambda1_exact) fail(ErrorCode::capability, "normalize_lambda1: lambda1 is not known exactly");
  Lattice L = scale(lat, 1.0 / lat.lambda1);
  L.lambda1 = 1.0;
  return L;
}

Lattice dual(const Lattice& lat) {
  const int n = lat.n;
  // columns of B^{-T}: solve B^T X = I by Gauss-Jordan with partial pivoting
  std::vector<Vec> a(n, Vec(2 * n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = lat.basis[i][j];  // row i of B^T is column i of B
    a[i][n + i] = 1.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) fail(ErrorCode::degenerate, "dual: singular basis");
    std::swap(a[piv], a[col]);
    double p = a[col][col];
    for (auto& v : a[col]) v /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      double f = a[r][col];
      for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  // X = (B^T)^{-1}; its columns are the dual basis vectors
  std::vector<Vec> cols(n, Vec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cols[j][i] = a[i][n + j];
  return lll_reduce(cols, 0.99);
}

Lattice random_lattice(int n, std::uint64_t seed, int range) {
  if (n < 1 || n > 8) fail(ErrorCode::domain, "random_lattice: n must lie in [1, 8]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(-range, range);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vec> cols(n, Vec(n));
    for (auto& c : cols)
      for (auto& x : c) x = u(rng);
    try {
      return lll_reduce(cols, 0.99);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
    }
  }
  fail(ErrorCode::numerical, "random_lattice: could not draw a nonsingular basis");
}

QSpec make_qspec(int n, int kappa, int ell, double c_const) {
  if (n < 1) fail(ErrorCode::domain, "qspec: n must be >= 1");
  if (kappa < 1) fail(ErrorCode::domain, "qspec: kappa must be >= 1");
  if (ell < 1) fail(ErrorCode::domain, "qspec: ell must be >= 1");
  if (!(c_const > 0.0)) fail(ErrorCode::domain, "qspec: C must be positive");
  QSpec q;
  q.n = n;
  q.kappa = kappa;
  q.ell = ell;
  q.c_const = c_const;
  const double cn = c_const * n;
  double log2_first = cn + std::log2(1.0 + std::exp2(-cn - 1.0));
  double log2_mp = log2_first + std::log2(2.0 * n) + static_cast<double>(ell) * n + n * std::log2(static_cast<double>(n));
  if (log2_mp < 50.0) log2_mp = std::log2(std::ceil(std::exp2(log2_mp) - 1e-9));
  q.log2_m_prime = log2_mp;
  q.log2_m = kappa + std::log2(static_cast<double>(n)) + log2_mp;
  q.overlap_floor = 1.0 - std::exp2(-kappa - 1.0);
  return q;
}

Sandwich q_overlap_sandwich(const QSpec& q, double zeta_value, double v_inf_norm_bound) {
  if (!std::isfinite(zeta_value)) fail(ErrorCode::domain, "sandwich: zeta must be finite");
  if (!(v_inf_norm_bound >= 0.0)) fail(ErrorCode::domain, "sandwich: |v|_inf must be >= 0");
  if (v_inf_norm_bound > 0.0 && std::log2(v_inf_norm_bound) >= q.log2_m_prime)
    fail(ErrorCode::precondition, "sandwich: |v|_inf reaches M', the counting bound no longer applies");
  return {q.overlap_floor * zeta_value, zeta_value};
}

double q_intersection_count(long long m, const std::vector<long long>& w) {
  if (m < 0) fail(ErrorCode::domain, "q_intersection_count: M must be >= 0");
  double c = 1.0;
  for (long long x : w) c *= static_cast<double>(std::max(0LL, 2 * m + 1 - std::llabs(x)));
  return c;
}

}  // namespace curvelab::lattice
