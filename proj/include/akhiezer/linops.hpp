#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "akhiezer/bands.hpp"

namespace akz {

using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using cmat = Eigen::MatrixXcd;
using rmat = Eigen::MatrixXd;

/**
 * @brief A square operator known through its action x -> A x.
 *
 * Copies share the underlying state; apply is reentrant.
 */
class LinearOperator {
public:
  using ApplyFn = std::function<void(const cvec&, cvec&)>;

  LinearOperator() = default;
  LinearOperator(Eigen::Index n, ApplyFn fn, bool symmetric = false);

  static LinearOperator dense(rmat M);
  static LinearOperator diagonal(rvec d);

  Eigen::Index size() const { return n_; }
  bool symmetric() const { return symmetric_; }
  bool has_dense() const { return dense_ != nullptr; }

  cvec apply(const cvec& x) const;
  void apply(const cvec& x, cvec& y) const;
  /// Column-wise action on a block.
  cmat apply(const cmat& X) const;
  /// Dense matrix, stored or assembled from n applications.
  rmat materialize() const;

private:
  Eigen::Index n_ = 0;
  ApplyFn fn_;
  std::shared_ptr<const rmat> dense_;
  bool symmetric_ = false;
};

/// Largest-remainder split of n in proportion to the band lengths, at least `minimum` each.
std::vector<int> proportional_counts(int n, const BandSystem& bands, int minimum = 1);

/// Equispaced points on each band, endpoints included.
std::vector<double> uniform_band_points(const BandSystem& bands, const std::vector<int>& counts);

LinearOperator gen_uniform_diag(int n, const BandSystem& bands, const std::vector<int>& counts = {});

struct PerturbedSystem {
  LinearOperator op;
  std::vector<double> eigenvalues; ///< ascending
};

/// Uniform band points plus N(0, sigma^2) noise, conjugated by the Q factor of a seeded Gaussian matrix.
PerturbedSystem gen_perturbed(int n, const BandSystem& bands, double sigma = 0.05, std::uint64_t seed = 1,
                              const std::vector<int>& counts = {});

struct BvpSystem {
  LinearOperator op; ///< L^{-1} A
  cvec rhs;          ///< L^{-1} x
  rmat A;
  rmat L;
  rvec grid;
};

/// -u'' - 30 e^x u = x on (0,1), u(0) = u(1) = 0, n_grid interior points, preconditioned by -u''.
BvpSystem bvp_system(int n_grid = 100);

/// Coordinate format, real/integer/pattern, general/symmetric/skew-symmetric.
LinearOperator read_matrix_market(const std::string& path);
/// Matrix Market array (n x 1) or whitespace-separated numbers.
rvec read_vector(const std::string& path);

cvec dense_solve(const cmat& A, const cvec& b);
rvec dense_solve(const rmat& A, const rvec& b);

struct EigenDecomposition {
  cvec values;
  cmat vectors;
  bool symmetric = false;
};

/// Self-adjoint solver when A is symmetric (to 1e-12 relative), general otherwise.
EigenDecomposition dense_eig(const rmat& A, bool want_vectors = true);

/// f(A) b by eigendecomposition.
cvec dense_matfun(const rmat& A, const cvec& b, const std::function<cplx(cplx)>& f);

/// Operator described by a path or a generator spec, with whatever extra data the generator knows.
struct OperatorBundle {
  LinearOperator op;
  std::optional<std::vector<double>> eigenvalues;
  std::optional<cvec> natural_rhs;
  std::string description;
};

/**
 * @brief Parse "<path>" or one of
 *   gen:uniform-diag:N:a1,b1,...
 *   gen:perturbed:N:a1,b1,...[:sigma[:seed]]
 *   gen:bvp[:n]
 */
OperatorBundle make_operator(const std::string& spec);

/**
 * @brief Right-hand side from "<path>" or gen:A-times-ones, gen:ones, gen:gaussian[:seed],
 * gen:natural (the generator's own, e.g. L^{-1}x for gen:bvp).
 */
cvec make_rhs(const std::string& spec, const OperatorBundle& bundle);

} // namespace akz
