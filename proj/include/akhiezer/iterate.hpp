#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "akhiezer/akhiezer_poly.hpp"
#include "akhiezer/bands.hpp"
#include "akhiezer/linops.hpp"
#include "akhiezer/stieltjes_proc.hpp"

namespace akz {

/**
 * @brief Recurrence coefficients and Cauchy integrals of the orthonormal family on a band system.
 */
class CoeffSource {
public:
  virtual ~CoeffSource() = default;
  virtual const BandSystem& bands() const = 0;
  /// (a_k, b_k)
  virtual RecurrencePair coeff(int k) = 0;
  /// C_0(z)..C_N(z), C_k = S_k / (2 pi i).
  virtual std::vector<cplx> cauchy(cplx z, int N) = 0;
  virtual std::string name() const = 0;
};

enum class CoeffKind {
  automatic,   ///< closed form for two bands, Stieltjes procedure otherwise
  closed_form, ///< theta-function formulas, two bands only
  stieltjes    ///< discretized Stieltjes procedure, any number of bands
};

std::unique_ptr<CoeffSource> make_coeff_source(const BandSystem& bands, CoeffKind kind = CoeffKind::automatic,
                                               WeightKind weight = WeightKind::akhiezer_like);

enum class Termination { converged, maxit, breakdown };
const char* to_string(Termination t);

struct HistoryEntry {
  int iter = 0;
  /// latest true relative residual (or error for matrix functions)
  double residual = 0.0;
  /// true when `residual` was computed at this iteration
  bool exact = false;
  /// increment proxy |coefficient| * ||p_k|| / ||b||
  double proxy = 0.0;
};

struct IterationReport {
  int iterations = 0;
  std::vector<HistoryEntry> history;
  /// e^{nu(z;A)} from eigenvalue estimates, else e^{-Re g(z)}; NaN when not applicable
  double reference_rate = std::numeric_limits<double>::quiet_NaN();
  double wall_time = 0.0;
  Termination termination = Termination::maxit;
  std::string message;
  /// true residuals observed right after the proxy first dropped below tol
  std::vector<double> proxy_trigger_residuals;
};

/// Per-iteration factor e^{slope} of log(residual) against iteration, least squares over
/// exact samples with iter in [lo, hi]; defaults to the middle third.
double fitted_rate(const IterationReport& rep, int lo = -1, int hi = -1);

struct SolveOptions {
  double tol = 1e-10;
  int maxit = 2000;
  /// iterations between true-residual evaluations
  int check_every = 5;
};

/// Modified Chebyshev iteration on [alpha - c, alpha + c].
std::pair<cvec, IterationReport> chebyshev_modified_solve(const LinearOperator& A, const cvec& b, const cvec& x0,
                                                          double alpha, double c, const SolveOptions& opt = {});

/// Classical residual-polynomial Chebyshev iteration on [alpha - c, alpha + c].
std::pair<cvec, IterationReport> chebyshev_classical_solve(const LinearOperator& A, const cvec& b, const cvec& x0,
                                                           double alpha, double c, const SolveOptions& opt = {});

/**
 * @brief Akhiezer iteration for (A - z I)^{-1} b.
 *
 * `eigs` (optional) supplies eigenvalue estimates for the reference rate.
 */
std::pair<cvec, IterationReport> akhiezer_solve(const LinearOperator& A, const cvec& b, const cvec& x0, cplx z,
                                                CoeffSource& src, const SolveOptions& opt = {},
                                                const std::vector<cplx>* eigs = nullptr);

/// Approximate (A - zI)^{-1} by iterating on the identity block.
cmat akhiezer_inverse(const LinearOperator& A, CoeffSource& src, const SolveOptions& opt = {}, cplx z = 0.0,
                      IterationReport* report = nullptr);

struct QuadratureCircle {
  cplx center;
  double radius = 0.0;
  int count = 0;
  std::size_t offset = 0; ///< first node index
};

struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  std::vector<QuadratureCircle> circles;
};

/// One trapezoid circle per band, radius inflate * length / 2, nodes split by band length.
QuadratureRule quadrature_circles(const BandSystem& bands, int m_total, double inflate = 1.15,
                                  const std::vector<cplx>& excluded = {});

struct MatfunOptions {
  double tol = 1e-10;
  int k_max = 2000;
  /// if set, history records ||f_k - exact|| / ||exact|| instead of the proxy
  const cvec* exact = nullptr;
};

/// f(A) b by the contour-quadrature Akhiezer expansion.
std::pair<cvec, IterationReport> matfun_apply(const std::function<cplx(cplx)>& f, const LinearOperator& A,
                                              const cvec& b, const QuadratureRule& quad, CoeffSource& src,
                                              const MatfunOptions& opt = {});

struct PoleResidue {
  cplx pole;
  cplx residue;
};

/// sum_i r_i (A - p_i I)^{-1} b with the same engine.
std::pair<cvec, IterationReport> matfun_pole_residue(const std::vector<PoleResidue>& terms, const LinearOperator& A,
                                                     const cvec& b, CoeffSource& src, const MatfunOptions& opt = {});

/// Expansion coefficients alpha_k = -sum_j C_k(z_j) f(z_j) w_j, k = 0..N.
std::vector<cplx> matfun_coefficients(const std::function<cplx(cplx)>& f, const QuadratureRule& quad,
                                      CoeffSource& src, int N);

} // namespace akz
