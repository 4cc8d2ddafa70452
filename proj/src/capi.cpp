#include "curvelab/curvelab.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "curvelab/curvelet.hpp"
#include "curvelab/discrete_oracle.hpp"
#include "curvelab/errors.hpp"
#include "curvelab/lattice.hpp"
#include "curvelab/obstruction.hpp"
#include "curvelab/radialfn.hpp"
#include "curvelab/specfun.hpp"
#include "curvelab/windows.hpp"

using namespace curvelab;

struct cl_frame {
  windows::FrameConstants frame;
};
struct cl_profile {
  std::shared_ptr<const radial::RadialProfile> p;
};
struct cl_decomp {
  ScaleDecomposition d;
};
struct cl_lattice {
  lattice::Lattice lat;
};
struct cl_dual_estimator {
  obstruction::DualSampleEstimator est;
  int n;
};
struct cl_grid {
  discrete::GridState g;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
int guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CL_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw Error(static_cast<ErrorCode>(CL_ERR_ARGUMENT), what);
}

int copy_string(const std::string& s, char* buf, size_t len) {
  if (buf == nullptr || len == 0) {
    g_last_error = "string buffer is empty";
    return CL_ERR_ARGUMENT;
  }
  if (s.size() + 1 > len) {
    g_last_error = "string buffer too short, need " + std::to_string(s.size() + 1);
    return CL_ERR_BUFFER;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  g_last_error.clear();
  return CL_OK;
}

void fill(const curvelet::UncertaintyReport& r, cl_uncertainty_report* out) {
  std::memset(out, 0, sizeof *out);
  out->n = r.n;
  out->a = r.a;
  out->lambda = r.lambda;
  out->gamma_mass = r.gamma_mass;
  out->T = r.T;
  out->lower_bound = r.lower_bound;
  out->upper_bound = r.upper_bound;
  out->x_second_moment = r.x_second_moment;
  out->expected_sq_distance = r.expected_sq_distance();
  out->i_a = r.i_a;
  out->i_b = r.i_b;
  out->i_c = r.i_c;
  out->i_2 = r.i_2;
  out->quadrature_error = r.quadrature_error;
  out->sandwich_holds = r.sandwich_holds();
  out->lemmas_hold = r.lemmas_hold();
  for (size_t i = 0; i < r.lemma_slacks.size() && i < CL_LEMMA_COUNT; ++i) {
    const auto& s = r.lemma_slacks[i];
    std::strncpy(out->lemma_name[i], s.name.c_str(), sizeof out->lemma_name[i] - 1);
    out->lemma_value[i] = s.value;
    out->lemma_lo[i] = s.lo;
    out->lemma_hi[i] = s.hi;
  }
}

lattice::Vec vec(const double* x, int n) { return lattice::Vec(x, x + n); }

void put_coeffs(const lattice::Coeffs& c, int64_t* out) {
  for (size_t i = 0; i < c.size(); ++i) out[i] = static_cast<int64_t>(c[i]);
}

}  // namespace

extern "C" {

const char* cl_version(void) { return "1.0.0"; }

const char* cl_last_error(void) { return g_last_error.c_str(); }

const char* cl_status_name(int status) {
  switch (status) {
    case CL_OK: return "ok";
    case CL_ERR_DOMAIN: return "domain";
    case CL_ERR_PRECONDITION: return "precondition";
    case CL_ERR_COVERAGE: return "coverage";
    case CL_ERR_DEGENERATE: return "degenerate";
    case CL_ERR_CAPABILITY: return "capability";
    case CL_ERR_CONSTRUCTION: return "construction";
    case CL_ERR_CONFIG: return "config";
    case CL_ERR_IO: return "io";
    case CL_ERR_ALIASING: return "aliasing";
    case CL_ERR_CONDITIONING: return "conditioning";
    case CL_ERR_NUMERICAL: return "numerical";
    case CL_ERR_ARGUMENT: return "argument";
    case CL_ERR_BUFFER: return "buffer";
    default: return "internal";
  }
}

// ---------------------------------------------------------------- special functions

int cl_bessel_j(double nu, double z, double* out) {
  return guard([&] {
    need(out, "null output");
    *out = specfun::bessel_j(nu, z);
  });
}

int cl_bessel_meissel(double nu, double x, double* out, int* in_window) {
  return guard([&] {
    need(out, "null output");
    auto r = specfun::bessel_j_meissel(nu, x);
    *out = r.value;
    if (in_window) *in_window = r.in_validity_window;
  });
}

int cl_sphere_surface(int n, double* log_s0, double* log_s0_prime) {
  return guard([&] {
    auto s = specfun::sphere_surface(n);
    if (log_s0) *log_s0 = s.log_s0;
    if (log_s0_prime) *log_s0_prime = s.log_s0_prime;
  });
}

// ---------------------------------------------------------------- frame

int cl_frame_create(int n, double lambda, cl_frame** out) {
  return guard([&] {
    need(out, "null output");
    *out = new cl_frame{windows::make_default_frame(n, lambda)};
  });
}

void cl_frame_destroy(cl_frame* f) { delete f; }

int cl_frame_moment(const cl_frame* f, int k, double* m, double* m_prime) {
  return guard([&] {
    need(f, "null frame");
    if (m) *m = windows::moment(f->frame.angular(), k);
    if (m_prime) *m_prime = windows::moment_prime(f->frame.angular(), k);
  });
}

int cl_frame_scaled_moment(const cl_frame* f, int k, double* m_scaled, double* m_prime_scaled) {
  return guard([&] {
    need(f, "null frame");
    if (m_scaled) *m_scaled = windows::scaled_moment(f->frame.angular(), k);
    if (m_prime_scaled) *m_prime_scaled = windows::scaled_moment_prime(f->frame.angular(), k);
  });
}

int cl_frame_mprime_over_m(const cl_frame* f, double* out) {
  return guard([&] {
    need(f && out, "null argument");
    *out = f->frame.mprime_over_m();
  });
}

int cl_frame_log_c_inv2(const cl_frame* f, double a, double* out) {
  return guard([&] {
    need(f && out, "null argument");
    *out = f->frame.log_c_inv2(a);
  });
}

int cl_frame_log_c_inv2_polar(const cl_frame* f, double a, double* out) {
  return guard([&] {
    need(f && out, "null argument");
    *out = windows::log_c_inv2_polar(f->frame, a);
  });
}

int cl_frame_sandwich_ratio(const cl_frame* f, double a, double* out) {
  return guard([&] {
    need(f && out, "null argument");
    *out = f->frame.angular_ratios(a).d_over_m;
  });
}

int cl_window_identity(const cl_frame* f, double k_norm, double* out) {
  return guard([&] {
    need(f && out, "null argument");
    *out = curvelet::window_identity(f->frame, k_norm);
  });
}

int cl_i2_quadrature(int n, double* out) {
  return guard([&] {
    need(out, "null output");
    *out = curvelet::i2_quadrature(n);
  });
}

// ---------------------------------------------------------------- profiles

int cl_profile_create(const char* descriptor, int n, double lambda, cl_profile** out) {
  return guard([&] {
    need(descriptor && out, "null argument");
    *out = new cl_profile{radial::make_profile(std::string(descriptor), n, lambda)};
  });
}

void cl_profile_destroy(cl_profile* p) { delete p; }

int cl_profile_descriptor(const cl_profile* p, char* buf, size_t len) {
  if (!p) {
    g_last_error = "null profile";
    return CL_ERR_ARGUMENT;
  }
  return copy_string(p->p->spec().to_string(), buf, len);
}

int cl_profile_support_radius(const cl_profile* p, double delta, double* out) {
  return guard([&] {
    need(p && out, "null argument");
    *out = radial::support_radius(*p->p, delta);
  });
}

int cl_profile_autocorrelation(const cl_profile* p, double s, double* out) {
  return guard([&] {
    need(p && out, "null argument");
    *out = radial::autocorrelation_exact(*p->p, s);
  });
}

int cl_profile_matrix_size(int n, size_t* out) {
  return guard([&] {
    need(out, "null output");
    *out = obstruction::default_profile_matrix(n).size();
  });
}

int cl_profile_matrix_entry(int n, size_t index, char* buf, size_t len) {
  std::string s;
  int st = guard([&] {
    auto m = obstruction::default_profile_matrix(n);
    need(index < m.size(), "profile matrix index out of range");
    s = m[index];
  });
  return st != CL_OK ? st : copy_string(s, buf, len);
}

// ---------------------------------------------------------------- decomposition and uncertainty

int cl_decomp_create(const cl_profile* p, const cl_frame* f, double bin_width, double weight_floor, cl_decomp** out) {
  return guard([&] {
    need(p && f && out, "null argument");
    ScaleGrid grid;
    if (bin_width > 0.0) grid.bin_width = bin_width;
    *out = new cl_decomp{curvelet::scale_weights(p->p, f->frame, grid, weight_floor > 0.0 ? weight_floor : -1.0)};
  });
}

void cl_decomp_destroy(cl_decomp* d) { delete d; }

int cl_decomp_size(const cl_decomp* d, size_t* out) {
  return guard([&] {
    need(d && out, "null argument");
    *out = d->d.scales.size();
  });
}

int cl_decomp_bin(const cl_decomp* d, size_t j, double* a, double* weight) {
  return guard([&] {
    need(d, "null decomposition");
    need(j < d->d.scales.size(), "bin index out of range");
    if (a) *a = d->d.scales[j];
    if (weight) *weight = d->d.weights[j];
  });
}

int cl_decomp_a_max(const cl_decomp* d, double* a_max, double* weight) {
  return guard([&] {
    need(d, "null decomposition");
    if (d->d.a_max_index < 0) fail(ErrorCode::degenerate, "no bin reaches the weight floor");
    if (a_max) *a_max = d->d.a_max;
    if (weight) *weight = d->d.weights[d->d.a_max_index];
  });
}

int cl_decomp_mixture(const cl_decomp* d, double s, double* exact, double* mixture, int* valid) {
  return guard([&] {
    need(d, "null decomposition");
    if (exact) *exact = radial::autocorrelation_exact(*d->d.profile, s);
    auto m = radial::autocorrelation_gaussian_mixture(d->d, s);
    if (mixture) *mixture = m.value;
    if (valid) *valid = m.valid;
  });
}

int cl_uncertainty_at(const cl_profile* p, const cl_frame* f, double a, cl_uncertainty_report* out) {
  return guard([&] {
    need(p && f && out, "null argument");
    fill(curvelet::uncertainty_T(*p->p, f->frame, a), out);
  });
}

int cl_uncertainty_scan(const cl_decomp* d, const cl_frame* f, double min_weight, int jobs,
                        cl_uncertainty_report* out, size_t capacity, size_t* count) {
  return guard([&] {
    need(d && f && count, "null argument");
    auto reps = curvelet::scan_uncertainty(d->d, f->frame, min_weight, jobs);
    size_t k = 0;
    for (auto& r : reps)
      if (r) ++k;
    *count = k;
    if (k > capacity || (k > 0 && !out))
      throw Error(static_cast<ErrorCode>(CL_ERR_BUFFER), "report buffer too short, need " + std::to_string(k));
    k = 0;
    for (auto& r : reps)
      if (r) fill(*r, &out[k++]);
  });
}

// ---------------------------------------------------------------- obstruction

void cl_obstruction_config_default(cl_obstruction_config* cfg) {
  if (!cfg) return;
  obstruction::ObstructionConfig c;
  cfg->epsilon_ov = c.epsilon_ov;
  cfg->delta = c.delta;
  cfg->weight_floor = c.weight_floor;
  cfg->bin_width = c.grid.bin_width;
  cfg->bound_constant = c.bound_constant;
}

int cl_obstruction_ratio(const cl_profile* p, const cl_frame* f, const cl_obstruction_config* cfg,
                         cl_obstruction_report* out) {
  return guard([&] {
    need(p && f && out, "null argument");
    obstruction::ObstructionConfig c;
    if (cfg) {
      c.epsilon_ov = cfg->epsilon_ov;
      c.delta = cfg->delta;
      c.weight_floor = cfg->weight_floor;
      if (cfg->bin_width > 0.0) c.grid.bin_width = cfg->bin_width;
      c.bound_constant = cfg->bound_constant;
    }
    auto r = obstruction::obstruction_ratio(p->p, f->frame, c);
    *out = cl_obstruction_report{};
    out->n = r.n;
    out->lambda = r.lambda;
    out->epsilon_ov = r.epsilon_ov;
    out->delta = r.delta;
    out->a_max = r.a_max;
    out->a_max_weight = r.a_max_weight;
    out->r_overlap = r.r_overlap;
    out->r_overlap_upper = r.r_overlap_upper;
    out->r_curv = r.r_curv;
    out->r_curv_lower = r.r_curv_lower;
    out->r_all = r.r_all;
    out->ratio = r.ratio;
    out->normalized_ratio = r.normalized_ratio;
    out->bound_constant = r.bound_constant;
    out->bound_rhs = r.bound_rhs;
    out->quadrature_error = r.quadrature_error;
    out->r_overlap_reached = r.r_overlap_reached;
    out->passes_threshold = r.passes_threshold;
    out->assumption_violated = r.assumption_violated;
    out->overlap_within_bound = r.overlap_within_bound;
    out->curv_above_bound = r.curv_above_bound;
  });
}

// ---------------------------------------------------------------- lattices

int cl_lattice_random(int n, uint64_t seed, int range, cl_lattice** out) {
  return guard([&] {
    need(out, "null output");
    *out = new cl_lattice{lattice::random_lattice(n, seed, range)};
  });
}

int cl_lattice_from_basis(int n, const double* columns, int reduce, cl_lattice** out) {
  return guard([&] {
    need(columns && out && n > 0, "invalid basis argument");
    std::vector<lattice::Vec> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = vec(columns + static_cast<size_t>(j) * n, n);
    *out = new cl_lattice{reduce ? lattice::lll_reduce(cols) : lattice::from_basis(cols)};
  });
}

int cl_lattice_read_file(const char* path, int reduce, cl_lattice** out) {
  return guard([&] {
    need(path && out, "null argument");
    auto cols = lattice::read_basis_file(path);
    *out = new cl_lattice{reduce ? lattice::lll_reduce(cols) : lattice::from_basis(cols)};
  });
}

int cl_lattice_normalize(const cl_lattice* l, cl_lattice** out) {
  return guard([&] {
    need(l && out, "null argument");
    *out = new cl_lattice{lattice::normalize_lambda1(l->lat)};
  });
}

void cl_lattice_destroy(cl_lattice* l) { delete l; }

int cl_lattice_info(const cl_lattice* l, int* n, double* det_abs, double* lambda1, int* lambda1_exact,
                    int* lll_reduced) {
  return guard([&] {
    need(l, "null lattice");
    if (n) *n = l->lat.n;
    if (det_abs) *det_abs = l->lat.det_abs;
    if (lambda1) *lambda1 = l->lat.lambda1;
    if (lambda1_exact) *lambda1_exact = l->lat.lambda1_exact;
    if (lll_reduced) *lll_reduced = l->lat.is_lll_reduced();
  });
}

int cl_lattice_basis(const cl_lattice* l, double* columns) {
  return guard([&] {
    need(l && columns, "null argument");
    const int n = l->lat.n;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) columns[static_cast<size_t>(j) * n + i] = l->lat.basis[j][i];
  });
}

int cl_lattice_point(const cl_lattice* l, const int64_t* coeffs, double* out) {
  return guard([&] {
    need(l && coeffs && out, "null argument");
    lattice::Coeffs c(coeffs, coeffs + l->lat.n);
    auto p = l->lat.point(c);
    std::copy(p.begin(), p.end(), out);
  });
}

int cl_lattice_closest(const cl_lattice* l, const double* t, int64_t* coeffs, double* distance) {
  return guard([&] {
    need(l && t, "null argument");
    auto c = lattice::closest_vector(l->lat, vec(t, l->lat.n));
    if (coeffs) put_coeffs(c.coeffs, coeffs);
    if (distance) *distance = c.distance;
  });
}

int cl_lattice_babai(const cl_lattice* l, const double* t, int64_t* coeffs, double* distance) {
  return guard([&] {
    need(l && t, "null argument");
    auto c = lattice::babai_nearest_plane(l->lat, vec(t, l->lat.n));
    if (coeffs) put_coeffs(c.coeffs, coeffs);
    if (distance) *distance = c.distance;
  });
}

int cl_dual_estimator_create(const cl_lattice* l, const cl_profile* p, size_t samples, uint64_t seed,
                             cl_dual_estimator** out) {
  return guard([&] {
    need(l && p && out, "null argument");
    *out = new cl_dual_estimator{obstruction::DualSampleEstimator(l->lat, *p->p, samples, seed), l->lat.n};
  });
}

void cl_dual_estimator_destroy(cl_dual_estimator* e) { delete e; }

int cl_dual_estimate(const cl_dual_estimator* e, const double* t, double* value, double* stderr_out) {
  return guard([&] {
    need(e && t, "null argument");
    auto r = e->est.estimate(vec(t, e->n));
    if (value) *value = r.value;
    if (stderr_out) *stderr_out = r.stderr_;
  });
}

int cl_dual_exact(const cl_dual_estimator* e, const double* t, double* value) {
  return guard([&] {
    need(e && t && value, "null argument");
    *value = e->est.exact(vec(t, e->n));
  });
}

int cl_dual_support_size(const cl_dual_estimator* e, size_t* out) {
  return guard([&] {
    need(e && out, "null argument");
    *out = e->est.support_size();
  });
}

int cl_gradient_ascent(const cl_lattice* l, const cl_dual_estimator* e, const double* t, int64_t* coeffs,
                       double* final_position, int* converged, int* iterations) {
  return guard([&] {
    need(l && e && t, "null argument");
    if (e->n != l->lat.n) fail(ErrorCode::domain, "gradient ascent: estimator and lattice dimensions differ");
    auto r = obstruction::gradient_ascent_bdd(
        l->lat, [&](const lattice::Vec& x) { return e->est.estimate(x).value; }, vec(t, l->lat.n));
    if (coeffs) put_coeffs(r.point.coeffs, coeffs);
    if (final_position) std::copy(r.final_position.begin(), r.final_position.end(), final_position);
    if (converged) *converged = r.converged;
    if (iterations) *iterations = r.iterations;
  });
}

int cl_qspec_sandwich(int n, int kappa, int ell, double c_const, double zeta_value, double v_inf_bound,
                      cl_qspec_result* out) {
  return guard([&] {
    need(out, "null output");
    auto q = lattice::make_qspec(n, kappa, ell, c_const);
    auto s = lattice::q_overlap_sandwich(q, zeta_value, v_inf_bound);
    out->log2_m_prime = q.log2_m_prime;
    out->log2_m = q.log2_m;
    out->overlap_floor = q.overlap_floor;
    out->lower = s.lower;
    out->upper = s.upper;
  });
}

int cl_q_intersection_count(int64_t m, const int64_t* w, int n, double* out) {
  return guard([&] {
    need(w && out && n > 0, "invalid argument");
    *out = lattice::q_intersection_count(m, std::vector<long long>(w, w + n));
  });
}

int cl_epsilon_net_line(int n, const double* b, const double* theta, double tau, double epsilon, double* points,
                        size_t capacity, size_t* count) {
  return guard([&] {
    need(b && theta && count && n > 0, "invalid argument");
    obstruction::LineHypothesis h{vec(b, n), vec(theta, n), 0.0, tau};
    auto pts = obstruction::epsilon_net_line(h, epsilon);
    *count = pts.size();
    if (pts.size() > capacity || !points)
      throw Error(static_cast<ErrorCode>(CL_ERR_BUFFER), "point buffer too short, need " + std::to_string(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) std::copy(pts[i].begin(), pts[i].end(), points + i * n);
  });
}

// ---------------------------------------------------------------- discrete oracle

int cl_grid_radial(const cl_profile* p, int side, double cell, cl_grid** out) {
  return guard([&] {
    need(p && out, "null argument");
    *out = new cl_grid{discrete::make_radial_state(*p->p, side, cell)};
  });
}

int cl_grid_read(const char* path, cl_grid** out) {
  return guard([&] {
    need(path && out, "null argument");
    *out = new cl_grid{discrete::read_state(path)};
  });
}

int cl_grid_write(const cl_grid* g, const char* path) {
  return guard([&] {
    need(g && path, "null argument");
    discrete::write_state(g->g, path);
  });
}

void cl_grid_destroy(cl_grid* g) { delete g; }

int cl_grid_info(const cl_grid* g, int* n, int* side, double* cell, double* norm_sq) {
  return guard([&] {
    need(g, "null grid");
    if (n) *n = g->g.n;
    if (side) *side = g->g.side;
    if (cell) *cell = g->g.cell;
    if (norm_sq) *norm_sq = g->g.norm_sq();
  });
}

int cl_grid_roundtrip(const cl_grid* g, double lambda, double* fidelity, double* column_defect) {
  return guard([&] {
    need(g, "null grid");
    auto frame = discrete::DiscreteFrame::standard(lambda);
    auto back = discrete::roundtrip_streaming(g->g, frame);
    if (fidelity) *fidelity = discrete::fidelity(g->g, back) / std::sqrt(g->g.norm_sq() * back.norm_sq());
    if (column_defect) *column_defect = discrete::Transform(g->g.n, g->g.side, g->g.cell, frame).column_defect();
  });
}

void cl_erasure_config_default(cl_erasure_config* cfg) {
  if (!cfg) return;
  obstruction::ErasureConfig c;
  cfg->side = c.side;
  cfg->cell = c.cell;
  cfg->tau = c.tau;
  cfg->r_all = c.r_all;
  cfg->seed = c.seed;
  cfg->trials = c.trials;
}

int cl_erasure_simulate(const cl_lattice* l, const cl_profile* p, const double* radii, size_t count,
                        const cl_erasure_config* cfg, cl_erasure_point* out, double* tau, double* mean_sq_distance,
                        double* column_defect) {
  return guard([&] {
    need(l && p && radii && out, "null argument");
    obstruction::ErasureConfig c;
    if (cfg) {
      c.side = cfg->side;
      c.cell = cfg->cell;
      c.tau = cfg->tau;
      c.r_all = cfg->r_all;
      c.seed = cfg->seed;
      c.trials = cfg->trials;
    }
    auto run = obstruction::simulate_index_erasure(l->lat, *p->p, discrete::DiscreteFrame::standard(p->p->lambda()),
                                                   std::vector<double>(radii, radii + count), c);
    for (size_t i = 0; i < run.points.size(); ++i) {
      const auto& q = run.points[i];
      out[i] = cl_erasure_point{q.r, q.successes, q.trials, q.probability, q.stderr_};
    }
    if (tau) *tau = run.tau;
    if (mean_sq_distance) *mean_sq_distance = run.mean_sq_distance;
    if (column_defect) *column_defect = run.column_defect;
  });
}

}  // extern "C"
