#include "akhiezer/akhiezer.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "akhiezer/adapt.hpp"
#include "akhiezer/error.hpp"
#include "akhiezer/greens.hpp"
#include "akhiezer/iterate.hpp"
#include "akhiezer/linops.hpp"

using namespace akz;

struct akz_operator {
  OperatorBundle bundle;
};

struct akz_report {
  IterationReport rep;
};

struct akz_greens {
  GreensEvaluator ev;
};

struct akz_polylines {
  std::vector<Polyline> lines;
};

struct akz_adapt_result {
  AdaptResult res;
};

namespace {

thread_local std::string last_error;

akz_status code_of(errc c) {
  switch (c) {
  case errc::domain: return AKZ_ERR_DOMAIN;
  case errc::config: return AKZ_ERR_CONFIG;
  case errc::io: return AKZ_ERR_IO;
  case errc::maxit: return AKZ_ERR_MAXIT;
  case errc::truncation: return AKZ_ERR_TRUNCATION;
  case errc::guard_band: return AKZ_ERR_GUARD_BAND;
  case errc::numeric: return AKZ_ERR_NUMERIC;
  }
  return AKZ_ERR_INTERNAL;
}

akz_status set_error(akz_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
akz_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const error& e) {
    return set_error(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AKZ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AKZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(AKZ_ERR_INTERNAL, "unknown exception");
  }
}

template <class F>
akz_status checked(std::initializer_list<std::pair<const void*, const char*>> args, F&& f) {
  for (const auto& [p, name] : args)
    if (!p) return set_error(AKZ_ERR_NULL, std::string("null argument: ") + name);
  return guarded(std::forward<F>(f));
}

cvec read_cvec(const double* p, Eigen::Index n) {
  cvec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(p[2 * i], p[2 * i + 1]);
  return v;
}

void write_cvec(const cvec& v, double* p) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    p[2 * i] = v[i].real();
    p[2 * i + 1] = v[i].imag();
  }
}

BandSystem read_bands(const double* e, int n) {
  if (n <= 0 || n % 2 != 0) fail(errc::config, "band endpoint count must be positive and even");
  return BandSystem::from_endpoints(std::vector<double>(e, e + n));
}

CoeffKind kind_of(akz_coeffs c) {
  switch (c) {
  case AKZ_COEFFS_AUTO: return CoeffKind::automatic;
  case AKZ_COEFFS_CLOSED_FORM: return CoeffKind::closed_form;
  case AKZ_COEFFS_STIELTJES: return CoeffKind::stieltjes;
  }
  fail(errc::config, "unknown coefficient source");
}

WeightKind weight_of(akz_weight w) {
  switch (w) {
  case AKZ_WEIGHT_AKHIEZER: return WeightKind::akhiezer_like;
  case AKZ_WEIGHT_RECIPROCAL: return WeightKind::reciprocal_like;
  }
  fail(errc::config, "unknown weight");
}

SolveOptions solve_opts(const akz_solve_options* o) {
  SolveOptions s;
  if (o) {
    s.tol = o->tol;
    s.maxit = o->maxit;
    s.check_every = o->check_every;
  }
  if (!(s.tol >= 0.0) || s.maxit < 0 || s.check_every < 1) fail(errc::config, "invalid solve options");
  return s;
}

std::function<cplx(cplx)> function_of(akz_function f) {
  switch (f) {
  case AKZ_FN_EXP: return [](cplx z) { return std::exp(z); };
  case AKZ_FN_TANH: return [](cplx z) { return std::tanh(z); };
  case AKZ_FN_EXP_OVER_X: return [](cplx z) { return std::exp(z) / z; };
  }
  fail(errc::config, "unknown function");
}

// singularities the quadrature circles must keep outside
std::vector<cplx> singularities_of(akz_function f) {
  constexpr double hp = 1.5707963267948966;
  switch (f) {
  case AKZ_FN_EXP: return {};
  case AKZ_FN_TANH: return {cplx(0, hp), cplx(0, -hp), cplx(0, 3 * hp), cplx(0, -3 * hp)};
  case AKZ_FN_EXP_OVER_X: return {0.0};
  }
  return {};
}

akz_status finish_iteration(const cvec& x, IterationReport&& rep, double* out, akz_report** report) {
  write_cvec(x, out);
  const Termination t = rep.termination;
  const std::string msg = rep.message;
  if (report) *report = new akz_report{std::move(rep)};
  if (t == Termination::maxit) return set_error(AKZ_ERR_MAXIT, msg.empty() ? "maximum iterations reached" : msg);
  if (t == Termination::breakdown) return set_error(AKZ_ERR_NUMERIC, msg.empty() ? "iteration broke down" : msg);
  return AKZ_OK;
}

std::vector<cplx> eigenvalue_estimates(const OperatorBundle& b) {
  std::vector<cplx> out;
  if (b.eigenvalues) {
    for (double v : *b.eigenvalues) out.emplace_back(v);
  } else {
    const auto ed = dense_eig(b.op.materialize(), false);
    for (Eigen::Index i = 0; i < ed.values.size(); ++i) out.push_back(ed.values[i]);
  }
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  return out;
}

} // namespace

extern "C" {

const char* akz_version(void) { return "1.0.0"; }

const char* akz_last_error(void) { return last_error.c_str(); }

const char* akz_status_name(akz_status s) {
  switch (s) {
  case AKZ_OK: return "ok";
  case AKZ_ERR_DOMAIN: return "domain";
  case AKZ_ERR_CONFIG: return "config";
  case AKZ_ERR_IO: return "io";
  case AKZ_ERR_MAXIT: return "maxit";
  case AKZ_ERR_TRUNCATION: return "truncation";
  case AKZ_ERR_GUARD_BAND: return "guard_band";
  case AKZ_ERR_NUMERIC: return "numeric";
  case AKZ_ERR_NULL: return "null";
  case AKZ_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

// ---- operators ----

akz_status akz_operator_create(const char* spec, akz_operator** out) {
  return checked({{spec, "spec"}, {out, "out"}}, [&] {
    *out = new akz_operator{make_operator(spec)};
    return AKZ_OK;
  });
}

akz_status akz_operator_from_dense(int n, const double* values, akz_operator** out) {
  return checked({{values, "values"}, {out, "out"}}, [&] {
    if (n <= 0) fail(errc::domain, "matrix size must be positive");
    rmat M = Eigen::Map<const rmat>(values, n, n);
    OperatorBundle b;
    b.op = LinearOperator::dense(std::move(M));
    b.description = "dense " + std::to_string(n) + "x" + std::to_string(n);
    *out = new akz_operator{std::move(b)};
    return AKZ_OK;
  });
}

void akz_operator_free(akz_operator* op) { delete op; }

int akz_operator_size(const akz_operator* op) { return op ? static_cast<int>(op->bundle.op.size()) : 0; }

const char* akz_operator_description(const akz_operator* op) { return op ? op->bundle.description.c_str() : ""; }

akz_status akz_operator_rhs(const akz_operator* op, const char* spec, double* out) {
  return checked({{op, "op"}, {spec, "spec"}, {out, "out"}}, [&] {
    write_cvec(make_rhs(spec, op->bundle), out);
    return AKZ_OK;
  });
}

akz_status akz_operator_apply(const akz_operator* op, const double* x, double* y) {
  return checked({{op, "op"}, {x, "x"}, {y, "y"}}, [&] {
    write_cvec(op->bundle.op.apply(read_cvec(x, op->bundle.op.size())), y);
    return AKZ_OK;
  });
}

akz_status akz_operator_dense_solve(const akz_operator* op, double shift_re, double shift_im, const double* b,
                                    double* x) {
  return checked({{op, "op"}, {b, "b"}, {x, "x"}}, [&] {
    const auto n = op->bundle.op.size();
    cmat M = op->bundle.op.materialize().cast<cplx>();
    M.diagonal().array() -= cplx(shift_re, shift_im);
    write_cvec(dense_solve(M, read_cvec(b, n)), x);
    return AKZ_OK;
  });
}

akz_status akz_operator_eigenvalues(const akz_operator* op, double* out) {
  return checked({{op, "op"}, {out, "out"}}, [&] {
    const auto ev = eigenvalue_estimates(op->bundle);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      out[2 * i] = ev[i].real();
      out[2 * i + 1] = ev[i].imag();
    }
    return AKZ_OK;
  });
}

// ---- reports ----

void akz_report_free(akz_report* r) { delete r; }

int akz_report_iterations(const akz_report* r) { return r ? r->rep.iterations : 0; }

akz_termination akz_report_termination(const akz_report* r) {
  if (!r) return AKZ_TERM_BREAKDOWN;
  switch (r->rep.termination) {
  case Termination::converged: return AKZ_TERM_CONVERGED;
  case Termination::maxit: return AKZ_TERM_MAXIT;
  case Termination::breakdown: return AKZ_TERM_BREAKDOWN;
  }
  return AKZ_TERM_BREAKDOWN;
}

const char* akz_report_message(const akz_report* r) { return r ? r->rep.message.c_str() : ""; }

double akz_report_reference_rate(const akz_report* r) {
  return r ? r->rep.reference_rate : std::numeric_limits<double>::quiet_NaN();
}

double akz_report_wall_time(const akz_report* r) { return r ? r->rep.wall_time : 0.0; }

int akz_report_history_size(const akz_report* r) { return r ? static_cast<int>(r->rep.history.size()) : 0; }

akz_status akz_report_history(const akz_report* r, int i, int* iter, double* residual, int* exact, double* proxy) {
  return checked({{r, "report"}}, [&] {
    if (i < 0 || i >= static_cast<int>(r->rep.history.size())) fail(errc::domain, "history index out of range");
    const auto& h = r->rep.history[i];
    if (iter) *iter = h.iter;
    if (residual) *residual = h.residual;
    if (exact) *exact = h.exact ? 1 : 0;
    if (proxy) *proxy = h.proxy;
    return AKZ_OK;
  });
}

double akz_report_fitted_rate(const akz_report* r, int lo, int hi) {
  if (!r) return std::numeric_limits<double>::quiet_NaN();
  try {
    return fitted_rate(r->rep, lo, hi);
  } catch (...) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// ---- solvers ----

akz_solve_options akz_solve_options_default(void) {
  const SolveOptions s;
  return {s.tol, s.maxit, s.check_every};
}

akz_status akz_solve(const akz_operator* op, const double* b, const double* bands, int n_endpoints, double shift_re,
                     double shift_im, akz_coeffs coeffs, akz_weight weight, const akz_solve_options* opt, double* x,
                     akz_report** report) {
  return checked({{op, "op"}, {b, "b"}, {bands, "bands"}, {x, "x"}}, [&] {
    const auto n = op->bundle.op.size();
    const auto bs = read_bands(bands, n_endpoints);
    auto src = make_coeff_source(bs, kind_of(coeffs), weight_of(weight));
    std::vector<cplx> eigs;
    if (op->bundle.eigenvalues) eigs = eigenvalue_estimates(op->bundle);
    auto [sol, rep] = akhiezer_solve(op->bundle.op, read_cvec(b, n), cvec::Zero(n), cplx(shift_re, shift_im), *src,
                                     solve_opts(opt), eigs.empty() ? nullptr : &eigs);
    return finish_iteration(sol, std::move(rep), x, report);
  });
}

akz_status akz_chebyshev_solve(const akz_operator* op, const double* b, double lo, double hi, akz_chebyshev variant,
                               const akz_solve_options* opt, double* x, akz_report** report) {
  return checked({{op, "op"}, {b, "b"}, {x, "x"}}, [&] {
    if (!(lo < hi)) fail(errc::config, "Chebyshev interval needs lo < hi");
    const auto n = op->bundle.op.size();
    const double alpha = 0.5 * (lo + hi), c = 0.5 * (hi - lo);
    const cvec bv = read_cvec(b, n), x0 = cvec::Zero(n);
    auto res = variant == AKZ_CHEB_CLASSICAL ? chebyshev_classical_solve(op->bundle.op, bv, x0, alpha, c, solve_opts(opt))
                                             : chebyshev_modified_solve(op->bundle.op, bv, x0, alpha, c, solve_opts(opt));
    return finish_iteration(res.first, std::move(res.second), x, report);
  });
}

// ---- matrix functions ----

akz_matfun_options akz_matfun_options_default(void) {
  const MatfunOptions m;
  return {m.tol, m.k_max, 400, 1.15, nullptr};
}

namespace {

MatfunOptions matfun_opts(const akz_matfun_options* o, const cvec* exact) {
  MatfunOptions m;
  if (o) {
    m.tol = o->tol;
    m.k_max = o->k_max;
  }
  m.exact = exact;
  return m;
}

} // namespace

akz_status akz_matfun(const akz_operator* op, const double* b, const double* bands, int n_endpoints, akz_function f,
                      akz_coeffs coeffs, akz_weight weight, const akz_matfun_options* opt, double* out,
                      akz_report** report) {
  return checked({{op, "op"}, {b, "b"}, {bands, "bands"}, {out, "out"}}, [&] {
    const auto n = op->bundle.op.size();
    const akz_matfun_options o = opt ? *opt : akz_matfun_options_default();
    const auto bs = read_bands(bands, n_endpoints);
    const auto quad = quadrature_circles(bs, o.quad_nodes, o.inflate, singularities_of(f));
    auto src = make_coeff_source(bs, kind_of(coeffs), weight_of(weight));
    cvec exact;
    if (o.exact) exact = read_cvec(o.exact, n);
    auto [y, rep] = matfun_apply(function_of(f), op->bundle.op, read_cvec(b, n), quad, *src,
                                 matfun_opts(&o, o.exact ? &exact : nullptr));
    return finish_iteration(y, std::move(rep), out, report);
  });
}

akz_status akz_matfun_pole_residue(const akz_operator* op, const double* b, const double* bands, int n_endpoints,
                                   const double* poles, const double* residues, int m, akz_coeffs coeffs,
                                   akz_weight weight, const akz_matfun_options* opt, double* out,
                                   akz_report** report) {
  return checked({{op, "op"}, {b, "b"}, {bands, "bands"}, {out, "out"}}, [&] {
    if (m < 0) fail(errc::domain, "negative number of poles");
    if (m > 0 && (!poles || !residues)) fail(errc::domain, "null pole or residue list");
    const auto n = op->bundle.op.size();
    std::vector<PoleResidue> terms;
    for (int i = 0; i < m; ++i)
      terms.push_back({cplx(poles[2 * i], poles[2 * i + 1]), cplx(residues[2 * i], residues[2 * i + 1])});
    auto src = make_coeff_source(read_bands(bands, n_endpoints), kind_of(coeffs), weight_of(weight));
    cvec exact;
    if (opt && opt->exact) exact = read_cvec(opt->exact, n);
    auto [y, rep] = matfun_pole_residue(terms, op->bundle.op, read_cvec(b, n), *src,
                                        matfun_opts(opt, (opt && opt->exact) ? &exact : nullptr));
    return finish_iteration(y, std::move(rep), out, report);
  });
}

akz_status akz_matfun_dense(const akz_operator* op, const double* b, akz_function f, double* out) {
  return checked({{op, "op"}, {b, "b"}, {out, "out"}}, [&] {
    const auto n = op->bundle.op.size();
    write_cvec(dense_matfun(op->bundle.op.materialize(), read_cvec(b, n), function_of(f)), out);
    return AKZ_OK;
  });
}

// ---- Green's function ----

akz_status akz_greens_create(const double* bands, int n_endpoints, akz_greens** out) {
  return checked({{bands, "bands"}, {out, "out"}}, [&] {
    *out = new akz_greens{build_greens(read_bands(bands, n_endpoints))};
    return AKZ_OK;
  });
}

void akz_greens_free(akz_greens* g) { delete g; }

akz_status akz_greens_re_g(const akz_greens* g, double re, double im, double* out) {
  return checked({{g, "greens"}, {out, "out"}}, [&] {
    *out = g->ev.re_g(cplx(re, im));
    return AKZ_OK;
  });
}

akz_status akz_greens_dg(const akz_greens* g, double re, double im, double* out) {
  return checked({{g, "greens"}, {out, "out"}}, [&] {
    const cplx d = g->ev.dg(cplx(re, im));
    out[0] = d.real();
    out[1] = d.imag();
    return AKZ_OK;
  });
}

akz_status akz_greens_rate_at(const akz_greens* g, double re, double im, double* out) {
  return checked({{g, "greens"}, {out, "out"}}, [&] {
    *out = std::exp(-g->ev.re_g(cplx(re, im)));
    return AKZ_OK;
  });
}

akz_status akz_greens_nu(const akz_greens* g, double re, double im, const double* eigs, int m, double* out) {
  return checked({{g, "greens"}, {eigs, "eigs"}, {out, "out"}}, [&] {
    std::vector<cplx> ev;
    for (int i = 0; i < m; ++i) ev.emplace_back(eigs[2 * i], eigs[2 * i + 1]);
    *out = nu(g->ev, cplx(re, im), ev);
    return AKZ_OK;
  });
}

akz_status akz_greens_level(const akz_greens* g, double rho, int resolution, akz_polylines** out) {
  return checked({{g, "greens"}, {out, "out"}}, [&] {
    *out = new akz_polylines{level_curve(g->ev, rho, resolution)};
    return AKZ_OK;
  });
}

void akz_polylines_free(akz_polylines* p) { delete p; }

int akz_polylines_count(const akz_polylines* p) { return p ? static_cast<int>(p->lines.size()) : 0; }

int akz_polylines_size(const akz_polylines* p, int i) {
  if (!p || i < 0 || i >= static_cast<int>(p->lines.size())) return 0;
  return static_cast<int>(p->lines[i].points.size());
}

int akz_polylines_closed(const akz_polylines* p, int i) {
  if (!p || i < 0 || i >= static_cast<int>(p->lines.size())) return 0;
  return p->lines[i].closed ? 1 : 0;
}

akz_status akz_polylines_points(const akz_polylines* p, int i, double* out) {
  return checked({{p, "polylines"}, {out, "out"}}, [&] {
    if (i < 0 || i >= static_cast<int>(p->lines.size())) fail(errc::domain, "polyline index out of range");
    const auto& pts = p->lines[i].points;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      out[2 * j] = pts[j].real();
      out[2 * j + 1] = pts[j].imag();
    }
    return AKZ_OK;
  });
}

// ---- polynomials ----

akz_status akz_recurrence(const double* bands, int n_endpoints, akz_coeffs coeffs, akz_weight weight, int N,
                          double* a, double* b) {
  return checked({{bands, "bands"}, {a, "a"}, {b, "b"}}, [&] {
    if (N < 0) fail(errc::domain, "N must be non-negative");
    auto src = make_coeff_source(read_bands(bands, n_endpoints), kind_of(coeffs), weight_of(weight));
    for (int k = 0; k <= N; ++k) {
      const auto c = src->coeff(k);
      a[k] = c.a;
      b[k] = c.b;
    }
    return AKZ_OK;
  });
}

akz_status akz_eval_pn(const double* bands, int n_endpoints, int n, double re, double im, double* out) {
  return checked({{bands, "bands"}, {out, "out"}}, [&] {
    const auto bs = read_bands(bands, n_endpoints);
    if (bs.size() != 2) fail(errc::config, "closed-form polynomials need exactly two bands");
    const cplx v = eval_pn(n, cplx(re, im), build_params(bs));
    out[0] = v.real();
    out[1] = v.imag();
    return AKZ_OK;
  });
}

akz_status akz_cauchy(const double* bands, int n_endpoints, akz_coeffs coeffs, akz_weight weight, double re,
                      double im, int N, double* out) {
  return checked({{bands, "bands"}, {out, "out"}}, [&] {
    auto src = make_coeff_source(read_bands(bands, n_endpoints), kind_of(coeffs), weight_of(weight));
    const auto C = src->cauchy(cplx(re, im), N);
    for (std::size_t k = 0; k < C.size(); ++k) {
      out[2 * k] = C[k].real();
      out[2 * k + 1] = C[k].imag();
    }
    return AKZ_OK;
  });
}

// ---- adaptation ----

akz_adapt_config akz_adapt_config_default(void) {
  const AdaptConfig c;
  return {c.gamma_o, c.gamma_i, c.growth_n, c.growth_k, c.eps_growth, c.max_rounds, c.rayleigh_degree, c.rayleigh_tol,
          c.rayleigh_max_steps};
}

akz_status akz_adapt(const akz_operator* op, const double* b, const double* bands0, int n_endpoints,
                     akz_adapt_variant variant, const akz_adapt_config* cfg, akz_adapt_result** out) {
  return checked({{op, "op"}, {b, "b"}, {bands0, "bands0"}, {out, "out"}}, [&] {
    AdaptConfig c;
    if (cfg) {
      c.gamma_o = cfg->gamma_o;
      c.gamma_i = cfg->gamma_i;
      c.growth_n = cfg->growth_n;
      c.growth_k = cfg->growth_k;
      c.eps_growth = cfg->eps_growth;
      c.max_rounds = cfg->max_rounds;
      c.rayleigh_degree = cfg->rayleigh_degree;
      c.rayleigh_tol = cfg->rayleigh_tol;
      c.rayleigh_max_steps = cfg->rayleigh_max_steps;
    }
    const auto& A = op->bundle.op;
    const cvec bv = read_cvec(b, A.size());
    const auto bs = read_bands(bands0, n_endpoints);
    AdaptResult r;
    switch (variant) {
    case AKZ_ADAPT_BISECTION: r = adapt_bisection(A, bv, bs, c); break;
    case AKZ_ADAPT_ONE_AT_A_TIME: r = adapt_one_at_a_time(A, bv, bs, c); break;
    case AKZ_ADAPT_RAYLEIGH: r = adapt_rayleigh(A, bv, bs, c); break;
    case AKZ_ADAPT_SYMMETRIC: {
      const auto e = bs.endpoints();
      if (e.size() != 4 || e[0] != -e[3] || e[1] != -e[2])
        fail(errc::config, "symmetric adaptation needs bands (-B,-a,a,B)");
      r = symmetric_simple_adapt(A, bv, e[2], e[3], c);
      break;
    }
    default: fail(errc::config, "unknown adaptation variant");
    }
    *out = new akz_adapt_result{std::move(r)};
    return AKZ_OK;
  });
}

void akz_adapt_free(akz_adapt_result* r) { delete r; }

int akz_adapt_endpoint_count(const akz_adapt_result* r) {
  return r ? static_cast<int>(2 * r->res.bands.size()) : 0;
}

akz_status akz_adapt_endpoints(const akz_adapt_result* r, double* out) {
  return checked({{r, "result"}, {out, "out"}}, [&] {
    const auto e = r->res.bands.endpoints();
    std::copy(e.begin(), e.end(), out);
    return AKZ_OK;
  });
}

int akz_adapt_converged(const akz_adapt_result* r) { return r && r->res.converged ? 1 : 0; }

int akz_adapt_rayleigh_quotients(const akz_adapt_result* r) { return r ? r->res.rayleigh_quotients : 0; }

double akz_adapt_final_rate(const akz_adapt_result* r) {
  return r ? r->res.final_rate : std::numeric_limits<double>::quiet_NaN();
}

const char* akz_adapt_message(const akz_adapt_result* r) { return r ? r->res.message.c_str() : ""; }

int akz_adapt_trace_size(const akz_adapt_result* r) { return r ? static_cast<int>(r->res.trace.size()) : 0; }

akz_status akz_adapt_trace_step(const akz_adapt_result* r, int i, int* round, const char** action, double* endpoints,
                                double* rate) {
  return checked({{r, "result"}}, [&] {
    if (i < 0 || i >= static_cast<int>(r->res.trace.size())) fail(errc::domain, "trace index out of range");
    const auto& s = r->res.trace[i];
    if (round) *round = s.round;
    if (action) *action = s.action.c_str();
    if (endpoints) std::copy(s.endpoints.begin(), s.endpoints.end(), endpoints);
    if (rate) *rate = s.rate;
    return AKZ_OK;
  });
}

} // extern "C"
