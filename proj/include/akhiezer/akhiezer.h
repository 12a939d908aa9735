/*
 * C interface to the Akhiezer iteration library.
 *
 * Complex vectors are passed as interleaved doubles (re, im, re, im, ...),
 * i.e. 2*n doubles for a vector of length n. Band systems are flat endpoint
 * lists a1,b1,a2,b2,... of even length. Every function returning akz_status
 * records a message retrievable with akz_last_error() on failure; the
 * message is per thread.
 */
#ifndef AKHIEZER_H
#define AKHIEZER_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(AKZ_BUILDING)
#    define AKZ_API __declspec(dllexport)
#  else
#    define AKZ_API __declspec(dllimport)
#  endif
#else
#  define AKZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum akz_status {
  AKZ_OK = 0,
  AKZ_ERR_DOMAIN = 1,
  AKZ_ERR_CONFIG = 2,
  AKZ_ERR_IO = 3,
  AKZ_ERR_MAXIT = 4,
  AKZ_ERR_TRUNCATION = 5,
  AKZ_ERR_GUARD_BAND = 6,
  AKZ_ERR_NUMERIC = 7,
  AKZ_ERR_NULL = 8,    /* null handle or pointer argument */
  AKZ_ERR_INTERNAL = 9 /* unexpected exception */
} akz_status;

typedef enum akz_coeffs {
  AKZ_COEFFS_AUTO = 0,        /* closed form for two bands, Stieltjes procedure otherwise */
  AKZ_COEFFS_CLOSED_FORM = 1, /* two bands only */
  AKZ_COEFFS_STIELTJES = 2
} akz_coeffs;

typedef enum akz_weight {
  AKZ_WEIGHT_AKHIEZER = 0,
  AKZ_WEIGHT_RECIPROCAL = 1
} akz_weight;

typedef enum akz_termination {
  AKZ_TERM_CONVERGED = 0,
  AKZ_TERM_MAXIT = 1,
  AKZ_TERM_BREAKDOWN = 2
} akz_termination;

typedef enum akz_function {
  AKZ_FN_EXP = 0,
  AKZ_FN_TANH = 1,
  AKZ_FN_EXP_OVER_X = 2
} akz_function;

typedef enum akz_chebyshev {
  AKZ_CHEB_MODIFIED = 0,
  AKZ_CHEB_CLASSICAL = 1
} akz_chebyshev;

typedef enum akz_adapt_variant {
  AKZ_ADAPT_BISECTION = 0,
  AKZ_ADAPT_ONE_AT_A_TIME = 1,
  AKZ_ADAPT_RAYLEIGH = 2,
  AKZ_ADAPT_SYMMETRIC = 3 /* bands0 = (-B, -a, a, B); only B moves */
} akz_adapt_variant;

typedef struct akz_operator akz_operator;
typedef struct akz_report akz_report;
typedef struct akz_greens akz_greens;
typedef struct akz_polylines akz_polylines;
typedef struct akz_adapt_result akz_adapt_result;

AKZ_API const char* akz_version(void);
AKZ_API const char* akz_last_error(void);
AKZ_API const char* akz_status_name(akz_status s);

/* ---- operators ---- */

/* Path to a Matrix Market file, or gen:uniform-diag:N:bands,
   gen:perturbed:N:bands[:sigma[:seed]], gen:bvp[:n]. */
AKZ_API akz_status akz_operator_create(const char* spec, akz_operator** out);
/* Dense real n x n matrix, column major. */
AKZ_API akz_status akz_operator_from_dense(int n, const double* values, akz_operator** out);
AKZ_API void akz_operator_free(akz_operator* op);
AKZ_API int akz_operator_size(const akz_operator* op);
AKZ_API const char* akz_operator_description(const akz_operator* op);
/* Right-hand side by spec (path, gen:ones, gen:A-times-ones, gen:gaussian[:seed], gen:natural).
   out holds 2*size doubles. */
AKZ_API akz_status akz_operator_rhs(const akz_operator* op, const char* spec, double* out);
/* y = A x, both interleaved. */
AKZ_API akz_status akz_operator_apply(const akz_operator* op, const double* x, double* y);
/* (A - shift I) x = b by dense LU. */
AKZ_API akz_status akz_operator_dense_solve(const akz_operator* op, double shift_re, double shift_im, const double* b,
                                            double* x);
/* Eigenvalues (generator-supplied when known, dense solver otherwise);
   out holds 2*size doubles, ascending by real part. */
AKZ_API akz_status akz_operator_eigenvalues(const akz_operator* op, double* out);

/* ---- iteration reports ---- */

AKZ_API void akz_report_free(akz_report* r);
AKZ_API int akz_report_iterations(const akz_report* r);
AKZ_API akz_termination akz_report_termination(const akz_report* r);
AKZ_API const char* akz_report_message(const akz_report* r);
/* NaN when not applicable */
AKZ_API double akz_report_reference_rate(const akz_report* r);
AKZ_API double akz_report_wall_time(const akz_report* r);
AKZ_API int akz_report_history_size(const akz_report* r);
/* Any of the output pointers may be null. exact is 1 when residual was evaluated at that iteration. */
AKZ_API akz_status akz_report_history(const akz_report* r, int i, int* iter, double* residual, int* exact,
                                      double* proxy);
/* Least-squares rate over exact samples with iter in [lo, hi]; -1 selects the middle third. */
AKZ_API double akz_report_fitted_rate(const akz_report* r, int lo, int hi);

/* ---- solvers ---- */

typedef struct akz_solve_options {
  double tol;
  int maxit;
  int check_every;
} akz_solve_options;

AKZ_API akz_solve_options akz_solve_options_default(void);

/* (A - shift I) x = b by the Akhiezer iteration. x (2n doubles) receives the best iterate even when
   the iteration stops at maxit; that case returns AKZ_ERR_MAXIT with a valid report. report may be null. */
AKZ_API akz_status akz_solve(const akz_operator* op, const double* b, const double* bands, int n_endpoints,
                             double shift_re, double shift_im, akz_coeffs coeffs, akz_weight weight,
                             const akz_solve_options* opt, double* x, akz_report** report);

/* A x = b by Chebyshev iteration on the interval [lo, hi]. */
AKZ_API akz_status akz_chebyshev_solve(const akz_operator* op, const double* b, double lo, double hi,
                                       akz_chebyshev variant, const akz_solve_options* opt, double* x,
                                       akz_report** report);

/* ---- matrix functions ---- */

typedef struct akz_matfun_options {
  double tol;
  int k_max;
  int quad_nodes;       /* total trapezoid nodes over all circles */
  double inflate;       /* circle radius / half band length */
  const double* exact;  /* optional 2n doubles; history then records the relative error */
} akz_matfun_options;

AKZ_API akz_matfun_options akz_matfun_options_default(void);

AKZ_API akz_status akz_matfun(const akz_operator* op, const double* b, const double* bands, int n_endpoints,
                              akz_function f, akz_coeffs coeffs, akz_weight weight, const akz_matfun_options* opt,
                              double* out, akz_report** report);

/* sum_i r_i (A - p_i I)^{-1} b; poles and residues interleaved, m terms. quad fields of opt are unused. */
AKZ_API akz_status akz_matfun_pole_residue(const akz_operator* op, const double* b, const double* bands,
                                           int n_endpoints, const double* poles, const double* residues, int m,
                                           akz_coeffs coeffs, akz_weight weight, const akz_matfun_options* opt,
                                           double* out, akz_report** report);

/* f(A) b by dense eigendecomposition. */
AKZ_API akz_status akz_matfun_dense(const akz_operator* op, const double* b, akz_function f, double* out);

/* ---- Green's function ---- */

AKZ_API akz_status akz_greens_create(const double* bands, int n_endpoints, akz_greens** out);
AKZ_API void akz_greens_free(akz_greens* g);
AKZ_API akz_status akz_greens_re_g(const akz_greens* g, double re, double im, double* out);
/* g'(z) as (re, im) */
AKZ_API akz_status akz_greens_dg(const akz_greens* g, double re, double im, double* out);
/* e^{-Re g(z)} */
AKZ_API akz_status akz_greens_rate_at(const akz_greens* g, double re, double im, double* out);
/* nu(z; eigs), eigs interleaved, m values */
AKZ_API akz_status akz_greens_nu(const akz_greens* g, double re, double im, const double* eigs, int m,
                                 double* out);
AKZ_API akz_status akz_greens_level(const akz_greens* g, double rho, int resolution, akz_polylines** out);

AKZ_API void akz_polylines_free(akz_polylines* p);
AKZ_API int akz_polylines_count(const akz_polylines* p);
AKZ_API int akz_polylines_size(const akz_polylines* p, int i);
AKZ_API int akz_polylines_closed(const akz_polylines* p, int i);
/* 2 * size doubles */
AKZ_API akz_status akz_polylines_points(const akz_polylines* p, int i, double* out);

/* ---- polynomials ---- */

/* a_0..a_N, b_0..b_N into a and b (N+1 doubles each). */
AKZ_API akz_status akz_recurrence(const double* bands, int n_endpoints, akz_coeffs coeffs, akz_weight weight, int N,
                                  double* a, double* b);
/* Orthonormal p_n(x) for two bands, closed form; out is (re, im). */
AKZ_API akz_status akz_eval_pn(const double* bands, int n_endpoints, int n, double re, double im, double* out);
/* Cauchy integrals C_0..C_N at z, 2(N+1) doubles. */
AKZ_API akz_status akz_cauchy(const double* bands, int n_endpoints, akz_coeffs coeffs, akz_weight weight, double re,
                              double im, int N, double* out);

/* ---- band adaptation ---- */

typedef struct akz_adapt_config {
  double gamma_o;
  double gamma_i;
  int growth_n;
  int growth_k;
  double eps_growth;
  int max_rounds;
  int rayleigh_degree;
  double rayleigh_tol;
  int rayleigh_max_steps;
} akz_adapt_config;

AKZ_API akz_adapt_config akz_adapt_config_default(void);

AKZ_API akz_status akz_adapt(const akz_operator* op, const double* b, const double* bands0, int n_endpoints,
                             akz_adapt_variant variant, const akz_adapt_config* cfg, akz_adapt_result** out);
AKZ_API void akz_adapt_free(akz_adapt_result* r);
AKZ_API int akz_adapt_endpoint_count(const akz_adapt_result* r);
AKZ_API akz_status akz_adapt_endpoints(const akz_adapt_result* r, double* out);
AKZ_API int akz_adapt_converged(const akz_adapt_result* r);
AKZ_API int akz_adapt_rayleigh_quotients(const akz_adapt_result* r);
AKZ_API double akz_adapt_final_rate(const akz_adapt_result* r);
AKZ_API const char* akz_adapt_message(const akz_adapt_result* r);
AKZ_API int akz_adapt_trace_size(const akz_adapt_result* r);
/* endpoints receives akz_adapt_endpoint_count() doubles; any output may be null. */
AKZ_API akz_status akz_adapt_trace_step(const akz_adapt_result* r, int i, int* round, const char** action,
                                        double* endpoints, double* rate);

#ifdef __cplusplus
}
#endif

#endif
