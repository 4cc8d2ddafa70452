/* C interface to curvelab. Every function returns a cl_status; on failure cl_last_error() holds a
 * message for the calling thread. Handles are opaque and released with the matching *_destroy. */
#ifndef CURVELAB_H
#define CURVELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(CURVELAB_BUILDING)
#define CL_API __attribute__((visibility("default")))
#else
#define CL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CL_OK = 0,
  CL_ERR_DOMAIN = 1,
  CL_ERR_PRECONDITION = 2,
  CL_ERR_COVERAGE = 3,
  CL_ERR_DEGENERATE = 4,
  CL_ERR_CAPABILITY = 5,
  CL_ERR_CONSTRUCTION = 6,
  CL_ERR_CONFIG = 7,
  CL_ERR_IO = 8,
  CL_ERR_ALIASING = 9,
  CL_ERR_CONDITIONING = 10,
  CL_ERR_NUMERICAL = 11,
  CL_ERR_ARGUMENT = 100,
  CL_ERR_BUFFER = 101,
  CL_ERR_INTERNAL = 102
} cl_status;

typedef struct cl_frame cl_frame;
typedef struct cl_profile cl_profile;
typedef struct cl_decomp cl_decomp;
typedef struct cl_lattice cl_lattice;
typedef struct cl_dual_estimator cl_dual_estimator;
typedef struct cl_grid cl_grid;

CL_API const char* cl_version(void);
CL_API const char* cl_last_error(void);
CL_API const char* cl_status_name(int status);

/* ---- special functions */
CL_API int cl_bessel_j(double nu, double z, double* out);
/* approximates J_nu(sqrt(nu) x); in_window = 1 inside the validity window nu >= 10, 0 < x < nu^0.49 */
CL_API int cl_bessel_meissel(double nu, double x, double* out, int* in_window);
CL_API int cl_sphere_surface(int n, double* log_s0, double* log_s0_prime);

/* ---- windows and frame constants */
CL_API int cl_frame_create(int n, double lambda, cl_frame** out);
CL_API void cl_frame_destroy(cl_frame* f);
CL_API int cl_frame_moment(const cl_frame* f, int k, double* m, double* m_prime);
CL_API int cl_frame_scaled_moment(const cl_frame* f, int k, double* m_scaled, double* m_prime_scaled);
CL_API int cl_frame_mprime_over_m(const cl_frame* f, double* out);
CL_API int cl_frame_log_c_inv2(const cl_frame* f, double a, double* out);
CL_API int cl_frame_log_c_inv2_polar(const cl_frame* f, double a, double* out);
/* C^{-2} / (M_{n-2} a^{(n-1)/2} S'_0) */
CL_API int cl_frame_sandwich_ratio(const cl_frame* f, double a, double* out);
CL_API int cl_window_identity(const cl_frame* f, double k_norm, double* out);
CL_API int cl_i2_quadrature(int n, double* out);

/* ---- radial profiles, e.g. "gaussian:sigma=0.04" */
CL_API int cl_profile_create(const char* descriptor, int n, double lambda, cl_profile** out);
CL_API void cl_profile_destroy(cl_profile* p);
CL_API int cl_profile_descriptor(const cl_profile* p, char* buf, size_t len);
CL_API int cl_profile_support_radius(const cl_profile* p, double delta, double* out);
CL_API int cl_profile_autocorrelation(const cl_profile* p, double s, double* out);
/* the default obstruction matrix at dimension n */
CL_API int cl_profile_matrix_size(int n, size_t* out);
CL_API int cl_profile_matrix_entry(int n, size_t index, char* buf, size_t len);

/* bin_width <= 0: 1/8; weight_floor <= 0: 1/n^2 */
/* ---- scale decomposition and uncertainty */
CL_API int cl_decomp_create(const cl_profile* p, const cl_frame* f, double bin_width, double weight_floor,
                            cl_decomp** out);
CL_API void cl_decomp_destroy(cl_decomp* d);
CL_API int cl_decomp_size(const cl_decomp* d, size_t* out);
CL_API int cl_decomp_bin(const cl_decomp* d, size_t j, double* a, double* weight);
CL_API int cl_decomp_a_max(const cl_decomp* d, double* a_max, double* weight);
CL_API int cl_decomp_mixture(const cl_decomp* d, double s, double* exact, double* mixture, int* valid);

enum { CL_LEMMA_COUNT = 5 };

typedef struct {
  int n;
  double a;
  double lambda;
  double gamma_mass;
  double T;
  double lower_bound;
  double upper_bound;
  double x_second_moment;
  double expected_sq_distance;
  double i_a, i_b, i_c, i_2;
  double quadrature_error;
  int sandwich_holds;
  int lemmas_hold;
  char lemma_name[CL_LEMMA_COUNT][8];
  double lemma_value[CL_LEMMA_COUNT];
  double lemma_lo[CL_LEMMA_COUNT];
  double lemma_hi[CL_LEMMA_COUNT];
} cl_uncertainty_report;

CL_API int cl_uncertainty_at(const cl_profile* p, const cl_frame* f, double a, cl_uncertainty_report* out);
/* fills out[0..*count) with reports for every bin above min_weight, in bin order */
CL_API int cl_uncertainty_scan(const cl_decomp* d, const cl_frame* f, double min_weight, int jobs,
                               cl_uncertainty_report* out, size_t capacity, size_t* count);

/* ---- obstruction */
typedef struct {
  double epsilon_ov;   /* <= 0: 1/n^2 */
  double delta;        /* mass outside r_all */
  double weight_floor; /* <= 0: 1/n^2 */
  double bin_width;
  double bound_constant;
} cl_obstruction_config;

typedef struct {
  int n;
  double lambda;
  double epsilon_ov;
  double delta;
  double a_max;
  double a_max_weight;
  double r_overlap;
  double r_overlap_upper;
  double r_curv;
  double r_curv_lower;
  double r_all;
  double ratio;
  double normalized_ratio;
  double bound_constant;
  double bound_rhs;
  double quadrature_error;
  int r_overlap_reached;
  int passes_threshold;
  int assumption_violated;
  int overlap_within_bound;
  int curv_above_bound;
} cl_obstruction_report;

CL_API void cl_obstruction_config_default(cl_obstruction_config* cfg);
CL_API int cl_obstruction_ratio(const cl_profile* p, const cl_frame* f, const cl_obstruction_config* cfg,
                                cl_obstruction_report* out);

/* ---- lattices; bases are n*n doubles, column-major (column j is basis vector j) */
CL_API int cl_lattice_random(int n, uint64_t seed, int range, cl_lattice** out);
CL_API int cl_lattice_from_basis(int n, const double* columns, int reduce, cl_lattice** out);
CL_API int cl_lattice_read_file(const char* path, int reduce, cl_lattice** out);
CL_API int cl_lattice_normalize(const cl_lattice* l, cl_lattice** out);
CL_API void cl_lattice_destroy(cl_lattice* l);
CL_API int cl_lattice_info(const cl_lattice* l, int* n, double* det_abs, double* lambda1, int* lambda1_exact,
                           int* lll_reduced);
CL_API int cl_lattice_basis(const cl_lattice* l, double* columns);
CL_API int cl_lattice_point(const cl_lattice* l, const int64_t* coeffs, double* out);
CL_API int cl_lattice_closest(const cl_lattice* l, const double* t, int64_t* coeffs, double* distance);
CL_API int cl_lattice_babai(const cl_lattice* l, const double* t, int64_t* coeffs, double* distance);

CL_API int cl_dual_estimator_create(const cl_lattice* l, const cl_profile* p, size_t samples, uint64_t seed,
                                    cl_dual_estimator** out);
CL_API void cl_dual_estimator_destroy(cl_dual_estimator* e);
CL_API int cl_dual_estimate(const cl_dual_estimator* e, const double* t, double* value, double* stderr_out);
CL_API int cl_dual_exact(const cl_dual_estimator* e, const double* t, double* value);
CL_API int cl_dual_support_size(const cl_dual_estimator* e, size_t* out);

/* gradient ascent on the sampled overlap; coeffs receive the nearest lattice point to the final iterate */
CL_API int cl_gradient_ascent(const cl_lattice* l, const cl_dual_estimator* e, const double* t, int64_t* coeffs,
                              double* final_position, int* converged, int* iterations);

typedef struct {
  double log2_m_prime;
  double log2_m;
  double overlap_floor;
  double lower;
  double upper;
} cl_qspec_result;

CL_API int cl_qspec_sandwich(int n, int kappa, int ell, double c_const, double zeta_value, double v_inf_bound,
                             cl_qspec_result* out);
CL_API int cl_q_intersection_count(int64_t m, const int64_t* w, int n, double* out);

/* points b + j eps theta, |j| <= ceil(tau/eps); count receives the full size even when capacity is short */
CL_API int cl_epsilon_net_line(int n, const double* b, const double* theta, double tau, double epsilon,
                               double* points, size_t capacity, size_t* count);

/* ---- discrete oracle at n = 2 */
CL_API int cl_grid_radial(const cl_profile* p, int side, double cell, cl_grid** out);
CL_API int cl_grid_read(const char* path, cl_grid** out);
CL_API int cl_grid_write(const cl_grid* g, const char* path);
CL_API void cl_grid_destroy(cl_grid* g);
CL_API int cl_grid_info(const cl_grid* g, int* n, int* side, double* cell, double* norm_sq);
/* forward and adjoint transform; fidelity |<in|out>| and the frame's column defect */
CL_API int cl_grid_roundtrip(const cl_grid* g, double lambda, double* fidelity, double* column_defect);

typedef struct {
  double r;
  size_t successes;
  size_t trials;
  double probability;
  double stderr_;
} cl_erasure_point;

typedef struct {
  int side;
  double cell;
  double tau;
  double r_all;
  uint64_t seed;
  size_t trials;
} cl_erasure_config;

CL_API void cl_erasure_config_default(cl_erasure_config* cfg);
/* out holds one point per radius */
CL_API int cl_erasure_simulate(const cl_lattice* l, const cl_profile* p, const double* radii, size_t count,
                               const cl_erasure_config* cfg, cl_erasure_point* out, double* tau,
                               double* mean_sq_distance, double* column_defect);

#ifdef __cplusplus
}
#endif

#endif
