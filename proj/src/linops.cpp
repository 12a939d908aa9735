#include "akhiezer/linops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Sparse>

#include "akhiezer/error.hpp"

namespace akz {

namespace {

// real matrix times complex vector without forming a complex copy of the matrix
template <class M>
void real_times(const M& A, const cvec& x, cvec& y) {
  const rvec re = A * x.real();
  const rvec im = A * x.imag();
  y.real() = re;
  y.imag() = im;
}

} // namespace

LinearOperator::LinearOperator(Eigen::Index n, ApplyFn fn, bool symmetric)
    : n_(n), fn_(std::move(fn)), symmetric_(symmetric) {
  if (n <= 0) fail(errc::config, "operator dimension must be positive");
}

LinearOperator LinearOperator::dense(rmat M) {
  if (M.rows() != M.cols()) fail(errc::config, "operator matrix must be square");
  if (!M.allFinite()) fail(errc::config, "operator matrix has non-finite entries");
  auto sp = std::make_shared<const rmat>(std::move(M));
  const double scale = std::max(sp->norm(), 1e-300);
  const bool sym = (*sp - sp->transpose()).norm() <= 1e-12 * scale;
  LinearOperator op(sp->rows(), [sp](const cvec& x, cvec& y) { real_times(*sp, x, y); }, sym);
  op.dense_ = sp;
  return op;
}

LinearOperator LinearOperator::diagonal(rvec d) {
  auto sp = std::make_shared<const rmat>(d.asDiagonal().toDenseMatrix());
  auto dd = std::make_shared<const rvec>(std::move(d));
  LinearOperator op(dd->size(), [dd](const cvec& x, cvec& y) { y = dd->cast<cplx>().cwiseProduct(x); }, true);
  op.dense_ = sp;
  return op;
}

cvec LinearOperator::apply(const cvec& x) const {
  cvec y(n_);
  apply(x, y);
  return y;
}

void LinearOperator::apply(const cvec& x, cvec& y) const {
  if (x.size() != n_) fail(errc::domain, "vector length does not match operator dimension");
  y.resize(n_);
  fn_(x, y);
}

cmat LinearOperator::apply(const cmat& X) const {
  if (X.rows() != n_) fail(errc::domain, "block height does not match operator dimension");
  if (dense_) return dense_->cast<cplx>() * X;
  cmat Y(n_, X.cols());
  cvec y(n_);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    fn_(X.col(j), y);
    Y.col(j) = y;
  }
  return Y;
}

rmat LinearOperator::materialize() const {
  if (dense_) return *dense_;
  rmat M(n_, n_);
  cvec e = cvec::Zero(n_), y(n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    e[j] = 1.0;
    fn_(e, y);
    M.col(j) = y.real();
    e[j] = 0.0;
  }
  return M;
}

std::vector<int> proportional_counts(int n, const BandSystem& bands, int minimum) {
  const int m = static_cast<int>(bands.size());
  if (m == 0) fail(errc::config, "empty band system");
  if (n < minimum * m) fail(errc::config, "too few points for the number of bands");
  double total = 0.0;
  for (const auto& b : bands.bands()) total += b.length();
  std::vector<int> counts(m);
  std::vector<std::pair<double, int>> rem;
  int used = 0;
  for (int j = 0; j < m; ++j) {
    const double share = n * bands[j].length() / total;
    counts[j] = static_cast<int>(std::floor(share));
    rem.emplace_back(share - counts[j], j);
    used += counts[j];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (int i = 0; used < n; ++i, ++used) ++counts[rem[i % m].second];
  // lift small bands to the minimum, taking from the largest
  for (int j = 0; j < m; ++j) {
    while (counts[j] < minimum) {
      auto big = std::max_element(counts.begin(), counts.end());
      --*big;
      ++counts[j];
    }
  }
  return counts;
}

std::vector<double> uniform_band_points(const BandSystem& bands, const std::vector<int>& counts) {
  if (counts.size() != bands.size()) fail(errc::config, "one count per band required");
  std::vector<double> x;
  for (std::size_t j = 0; j < bands.size(); ++j) {
    const int c = counts[j];
    if (c < 1) fail(errc::config, "band counts must be positive");
    const Band& b = bands[j];
    if (c == 1) {
      x.push_back(b.mid());
      continue;
    }
    for (int i = 0; i < c; ++i) x.push_back(i == c - 1 ? b.hi : b.lo + b.length() * i / (c - 1));
  }
  return x;
}

LinearOperator gen_uniform_diag(int n, const BandSystem& bands, const std::vector<int>& counts) {
  const auto cnt = counts.empty() ? proportional_counts(n, bands) : counts;
  if (std::accumulate(cnt.begin(), cnt.end(), 0) != n) fail(errc::config, "band counts do not sum to n");
  const auto x = uniform_band_points(bands, cnt);
  return LinearOperator::diagonal(Eigen::Map<const rvec>(x.data(), static_cast<Eigen::Index>(x.size())));
}

PerturbedSystem gen_perturbed(int n, const BandSystem& bands, double sigma, std::uint64_t seed,
                              const std::vector<int>& counts) {
  if (!(sigma >= 0.0)) fail(errc::config, "perturbation size must be non-negative");
  const auto cnt = counts.empty() ? proportional_counts(n, bands) : counts;
  if (std::accumulate(cnt.begin(), cnt.end(), 0) != n) fail(errc::config, "band counts do not sum to n");
  auto lam = uniform_band_points(bands, cnt);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : lam) v += sigma * normal(gen);
  rmat G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = normal(gen);
  const rmat Q = Eigen::HouseholderQR<rmat>(G).householderQ();

  const rvec d = Eigen::Map<const rvec>(lam.data(), n);
  rmat M = Q * d.asDiagonal() * Q.transpose();
  M = 0.5 * (M + M.transpose()).eval();

  PerturbedSystem out{LinearOperator::dense(std::move(M)), std::move(lam)};
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

BvpSystem bvp_system(int n_grid) {
  if (n_grid < 3) fail(errc::config, "bvp grid needs at least 3 points");
  const int n = n_grid;
  const double h = 1.0 / (n + 1);
  const double ih2 = 1.0 / (h * h);
  BvpSystem s;
  s.grid.resize(n);
  for (int i = 0; i < n; ++i) s.grid[i] = (i + 1) * h;
  s.L = rmat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s.L(i, i) = 2.0 * ih2;
    if (i > 0) s.L(i, i - 1) = -ih2;
    if (i + 1 < n) s.L(i, i + 1) = -ih2;
  }
  s.A = s.L;
  for (int i = 0; i < n; ++i) s.A(i, i) -= 30.0 * std::exp(s.grid[i]);

  // Thomas factors of L: multipliers and pivots
  auto piv = std::make_shared<std::vector<double>>(n);
  (*piv)[0] = 2.0 * ih2;
  for (int i = 1; i < n; ++i) (*piv)[i] = 2.0 * ih2 - ih2 * ih2 / (*piv)[i - 1];
  auto diagA = std::make_shared<rvec>(s.A.diagonal());

  auto solveL = [piv, ih2, n](cvec& y) {
    for (int i = 1; i < n; ++i) y[i] += ih2 / (*piv)[i - 1] * y[i - 1];
    y[n - 1] /= (*piv)[n - 1];
    for (int i = n - 2; i >= 0; --i) y[i] = (y[i] + ih2 * y[i + 1]) / (*piv)[i];
  };
  s.op = LinearOperator(
      n,
      [diagA, ih2, n, solveL](const cvec& x, cvec& y) {
        for (int i = 0; i < n; ++i) {
          cplx v = (*diagA)[i] * x[i];
          if (i > 0) v -= ih2 * x[i - 1];
          if (i + 1 < n) v -= ih2 * x[i + 1];
          y[i] = v;
        }
        solveL(y);
      },
      false);
  s.rhs = s.grid.cast<cplx>();
  solveL(s.rhs);
  return s;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(errc::config, "cannot parse " + what + " '" + s + "'");
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(errc::config, "cannot parse " + what + " '" + s + "'");
}

} // namespace

LinearOperator read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open matrix file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(errc::io, "empty matrix file '" + path + "'");
  std::istringstream hdr(lower(line));
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix") fail(errc::io, "missing MatrixMarket banner in '" + path + "'");
  if (format != "coordinate") fail(errc::io, "only coordinate MatrixMarket matrices are supported");
  if (field != "real" && field != "integer" && field != "pattern") fail(errc::io, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    fail(errc::io, "unsupported symmetry '" + symmetry + "'");

  while (std::getline(in, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos && line[p] != '%') break;
  }
  std::istringstream sz(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(sz >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0)
    fail(errc::io, "malformed size line in '" + path + "'");
  if (rows != cols) fail(errc::io, "matrix must be square");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nnz) * (symmetry == "general" ? 1 : 2));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 1.0;
    if (!(in >> i >> j)) fail(errc::io, "truncated entry list in '" + path + "'");
    if (field != "pattern" && !(in >> v)) fail(errc::io, "malformed entry in '" + path + "'");
    if (i < 1 || j < 1 || i > rows || j > cols) fail(errc::io, "entry index out of range in '" + path + "'");
    if (!std::isfinite(v)) fail(errc::io, "non-finite entry in '" + path + "'");
    trip.emplace_back(i - 1, j - 1, v);
    if (i != j && symmetry == "symmetric") trip.emplace_back(j - 1, i - 1, v);
    if (i != j && symmetry == "skew-symmetric") trip.emplace_back(j - 1, i - 1, -v);
  }
  auto S = std::make_shared<Eigen::SparseMatrix<double>>(rows, cols);
  S->setFromTriplets(trip.begin(), trip.end());
  S->makeCompressed();
  return LinearOperator(
      rows, [S](const cvec& x, cvec& y) { real_times(*S, x, y); }, symmetry == "symmetric");
}

rvec read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open vector file '" + path + "'");
  std::string line;
  std::vector<double> v;
  bool mm = false, sized = false;
  while (std::getline(in, line)) {
    if (line.rfind("%%MatrixMarket", 0) == 0) {
      if (lower(line).find("array") == std::string::npos) fail(errc::io, "vector file must be in array format");
      mm = true;
      continue;
    }
    const auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '%' || line[p] == '#') continue;
    std::istringstream ls(line);
    if (mm && !sized) {
      long r = 0, c = 0;
      if (!(ls >> r >> c) || c != 1) fail(errc::io, "vector file must have a single column");
      sized = true;
      continue;
    }
    std::string tok;
    while (ls >> tok) v.push_back(parse_double(tok, "vector entry"));
  }
  if (v.empty()) fail(errc::io, "no entries in vector file '" + path + "'");
  return Eigen::Map<rvec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

namespace {

template <class Mat, class Vec>
Vec lu_solve(const Mat& A, const Vec& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) fail(errc::domain, "dense solve dimension mismatch");
  Eigen::PartialPivLU<Mat> lu(A);
  const auto& U = lu.matrixLU();
  const double big = U.diagonal().cwiseAbs().maxCoeff();
  const double small = U.diagonal().cwiseAbs().minCoeff();
  if (!(small > 1e-14 * big) || !(big > 0.0)) fail(errc::numeric, "matrix is singular to working precision");
  return lu.solve(b);
}

} // namespace

cvec dense_solve(const cmat& A, const cvec& b) { return lu_solve(A, b); }
rvec dense_solve(const rmat& A, const rvec& b) { return lu_solve(A, b); }

EigenDecomposition dense_eig(const rmat& A, bool want_vectors) {
  if (A.rows() != A.cols()) fail(errc::domain, "eigendecomposition needs a square matrix");
  EigenDecomposition out;
  const double scale = std::max(A.norm(), 1e-300);
  out.symmetric = (A - A.transpose()).norm() <= 1e-12 * scale;
  if (out.symmetric) {
    Eigen::SelfAdjointEigenSolver<rmat> es(A, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(errc::numeric, "symmetric eigensolver failed");
    out.values = es.eigenvalues().cast<cplx>();
    if (want_vectors) out.vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::EigenSolver<rmat> es(A, want_vectors);
    if (es.info() != Eigen::Success) fail(errc::numeric, "eigensolver failed");
    out.values = es.eigenvalues();
    if (want_vectors) out.vectors = es.eigenvectors();
  }
  return out;
}

cvec dense_matfun(const rmat& A, const cvec& b, const std::function<cplx(cplx)>& f) {
  const auto ed = dense_eig(A, true);
  cvec fl(ed.values.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i) fl[i] = f(ed.values[i]);
  if (ed.symmetric) return ed.vectors * fl.cwiseProduct(ed.vectors.adjoint() * b);
  const cvec c = Eigen::PartialPivLU<cmat>(ed.vectors).solve(b);
  return ed.vectors * fl.cwiseProduct(c);
}

OperatorBundle make_operator(const std::string& spec) {
  if (spec.rfind("gen:", 0) != 0) {
    OperatorBundle b;
    b.op = read_matrix_market(spec);
    b.description = spec;
    return b;
  }
  const auto parts = split(spec, ':');
  const std::string kind = parts.size() > 1 ? parts[1] : "";
  OperatorBundle out;
  out.description = spec;
  if (kind == "uniform-diag") {
    if (parts.size() != 4) fail(errc::config, "expected gen:uniform-diag:N:bands");
    const int n = static_cast<int>(parse_long(parts[2], "size"));
    const auto bands = BandSystem::parse(parts[3]);
    out.op = gen_uniform_diag(n, bands);
    out.eigenvalues = uniform_band_points(bands, proportional_counts(n, bands));
  } else if (kind == "perturbed") {
    if (parts.size() < 4 || parts.size() > 6) fail(errc::config, "expected gen:perturbed:N:bands[:sigma[:seed]]");
    const int n = static_cast<int>(parse_long(parts[2], "size"));
    const auto bands = BandSystem::parse(parts[3]);
    const double sigma = parts.size() > 4 ? parse_double(parts[4], "sigma") : 0.05;
    const auto seed = parts.size() > 5 ? static_cast<std::uint64_t>(parse_long(parts[5], "seed")) : 1u;
    auto ps = gen_perturbed(n, bands, sigma, seed);
    out.op = ps.op;
    out.eigenvalues = std::move(ps.eigenvalues);
  } else if (kind == "bvp") {
    if (parts.size() > 3) fail(errc::config, "expected gen:bvp[:n]");
    const int n = parts.size() > 2 ? static_cast<int>(parse_long(parts[2], "grid size")) : 100;
    auto s = bvp_system(n);
    out.op = s.op;
    out.natural_rhs = s.rhs;
  } else {
    fail(errc::config, "unknown generator '" + spec + "'");
  }
  if (out.op.size() <= 0) fail(errc::config, "generator produced an empty operator");
  return out;
}

cvec make_rhs(const std::string& spec, const OperatorBundle& bundle) {
  const auto n = bundle.op.size();
  if (spec.rfind("gen:", 0) != 0) {
    const rvec v = read_vector(spec);
    if (v.size() != n) fail(errc::io, "right-hand side length does not match operator");
    return v.cast<cplx>();
  }
  const auto parts = split(spec, ':');
  const std::string kind = parts.size() > 1 ? parts[1] : "";
  if (kind == "ones") return cvec::Ones(n);
  if (kind == "A-times-ones") return bundle.op.apply(cvec(cvec::Ones(n)));
  if (kind == "gaussian") {
    const auto seed = parts.size() > 2 ? static_cast<std::uint64_t>(parse_long(parts[2], "seed")) : 1u;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(gen);
    return v;
  }
  if (kind == "natural") {
    if (!bundle.natural_rhs) fail(errc::config, "operator has no natural right-hand side");
    return *bundle.natural_rhs;
  }
  fail(errc::config, "unknown right-hand side generator '" + spec + "'");
}

} // namespace akz
