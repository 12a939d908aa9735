#include "akhiezer/iterate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numbers>

#include "akhiezer/error.hpp"
#include "akhiezer/greens.hpp"

namespace akz {

namespace {

constexpr double pi = std::numbers::pi;
const cplx two_pi_i(0.0, 2.0 * pi);

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

class ClosedFormSource final : public CoeffSource {
public:
  explicit ClosedFormSource(const BandSystem& bands) : bands_(bands), p_(build_params(bands)) {}

  const BandSystem& bands() const override { return bands_; }
  std::string name() const override { return "closed-form"; }

  RecurrencePair coeff(int k) override {
    if (k < 0) fail(errc::domain, "recurrence index must be non-negative");
    while (static_cast<int>(table_.size()) <= k) table_.push_back(recurrence_coeffs(static_cast<int>(table_.size()), p_));
    return table_[k];
  }

  std::vector<cplx> cauchy(cplx z, int N) override {
    if (N < 0) fail(errc::domain, "sequence length must be non-negative");
    if (bands_.contains(z)) fail(errc::domain, "Cauchy integrals requested on the bands");
    // backfill from the largest degree whose Cauchy integral is still a normal number
    int M = N;
    cplx c1, c2;
    for (;;) {
      c1 = cauchy_integral(M + 1, z, p_);
      c2 = cauchy_integral(M + 2, z, p_);
      if ((std::isfinite(std::abs(c2)) && std::abs(c2) > 1e-280) || M == 0) break;
      M /= 2;
    }
    coeff(M + 1);
    std::vector<RecurrencePair> tab(table_.begin(), table_.begin() + M + 2);
    auto C = backfill_cauchy(M, z, tab, c1, c2);
    C.resize(N + 1, 0.0);
    return C;
  }

private:
  BandSystem bands_;
  AkhiezerParams p_;
  std::vector<RecurrencePair> table_;
};

class StieltjesSource final : public CoeffSource {
public:
  StieltjesSource(const BandSystem& bands, WeightKind kind) : w_(make_weight(bands, kind)) {}

  const BandSystem& bands() const override { return w_.bands; }
  std::string name() const override { return "stieltjes"; }

  RecurrencePair coeff(int k) override {
    if (k < 0) fail(errc::domain, "recurrence index must be non-negative");
    ensure(k);
    return coeffs_[k];
  }

  // Miller's backward recurrence: the Cauchy integrals are the minimal solution off the bands,
  // normalised by the inhomogeneous row (z - a_0) S_0 - b_0 S_1 = -1
  std::vector<cplx> cauchy(cplx z, int N) override {
    if (N < 0) fail(errc::domain, "sequence length must be non-negative");
    if (w_.bands.contains(z)) fail(errc::domain, "Cauchy integrals requested on the bands");
    int extra = std::max(64, N / 2);
    for (int it = 0; it < 8; ++it, extra *= 2) {
      // both starts on one coefficient table, so only the start index differs
      ensure(N + 2 * extra + 1);
      const auto prev = miller(z, N, N + extra);
      auto cur = miller(z, N, N + 2 * extra);
      bool same = true;
      for (int k = 0; k <= N && same; ++k) same = std::abs(cur[k] - prev[k]) <= 1e-13 * std::abs(cur[k]) + 1e-300;
      if (same) {
        for (auto& c : cur) c /= two_pi_i;
        return cur;
      }
    }
    fail(errc::numeric, "backward recurrence for Cauchy integrals did not settle; point too close to the bands");
  }

private:
  std::vector<cplx> miller(cplx z, int N, int L) {
    ensure(L + 1);
    std::vector<cplx> s(L + 2, 0.0);
    s[L] = 1.0;
    for (int k = L; k >= 1; --k) {
      s[k - 1] = ((z - coeffs_[k].a) * s[k] - coeffs_[k].b * s[k + 1]) / coeffs_[k - 1].b;
      if (std::abs(s[k - 1]) > 1e200)
        for (int j = k - 1; j <= L; ++j) s[j] *= 1e-200;
    }
    const cplx lam = -1.0 / ((z - coeffs_[0].a) * s[0] - coeffs_[0].b * s[1]);
    s.resize(N + 1);
    for (auto& v : s) v *= lam;
    return s;
  }

  void ensure(int N) {
    if (N <= cap_) return;
    const int M = std::max({N, 2 * cap_, 64});
    coeffs_ = coeffs_by_stieltjes(w_, M, 40 * M + 200);
    cap_ = M;
  }

  WeightSpec w_;
  int cap_ = -1;
  std::vector<RecurrencePair> coeffs_;
};

// S_k(z) on demand, grown by doubling
class ShiftTable {
public:
  ShiftTable(CoeffSource& src, cplx z, int first) : src_(src), z_(z) { grow(first); }
  cplx S(int k) {
    if (k >= static_cast<int>(S_.size())) grow(std::max(k, 2 * static_cast<int>(S_.size())));
    return S_[k];
  }

private:
  void grow(int N) {
    const auto C = src_.cauchy(z_, N);
    S_.resize(C.size());
    for (std::size_t k = 0; k < C.size(); ++k) S_[k] = two_pi_i * C[k];
  }
  CoeffSource& src_;
  cplx z_;
  std::vector<cplx> S_;
};

void check_sizes(const LinearOperator& A, const cvec& b, const cvec& x0) {
  if (b.size() != A.size()) fail(errc::domain, "right-hand side length does not match operator");
  if (x0.size() != A.size()) fail(errc::domain, "initial guess length does not match operator");
}

void check_interval(double alpha, double c) {
  if (!(c > 0.0)) fail(errc::config, "interval half-width must be positive");
  if (alpha - c <= 0.0 && 0.0 <= alpha + c) fail(errc::domain, "interval [alpha-c, alpha+c] contains 0");
}

// asymptotic factor 1 / |sigma + sqrt(sigma^2 - 1)|, sigma = -alpha / c
double chebyshev_rate(double alpha, double c) {
  const double s = std::fabs(alpha / c);
  return 1.0 / (s + std::sqrt(s * s - 1.0));
}

} // namespace

std::unique_ptr<CoeffSource> make_coeff_source(const BandSystem& bands, CoeffKind kind, WeightKind weight) {
  if (bands.size() == 0) fail(errc::config, "empty band system");
  if (kind == CoeffKind::automatic)
    kind = (bands.size() == 2 && weight == WeightKind::akhiezer_like) ? CoeffKind::closed_form : CoeffKind::stieltjes;
  if (kind == CoeffKind::closed_form) {
    if (weight != WeightKind::akhiezer_like) fail(errc::config, "closed form exists only for the Akhiezer weight");
    return std::make_unique<ClosedFormSource>(bands);
  }
  return std::make_unique<StieltjesSource>(bands, weight);
}

const char* to_string(Termination t) {
  switch (t) {
  case Termination::converged: return "converged";
  case Termination::maxit: return "maxit";
  case Termination::breakdown: return "breakdown";
  }
  return "unknown";
}

double fitted_rate(const IterationReport& rep, int lo, int hi) {
  if (lo < 0) lo = rep.iterations / 3;
  if (hi < 0) hi = 2 * rep.iterations / 3;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& h : rep.history) {
    if (!h.exact || h.iter < lo || h.iter > hi || !(h.residual > 0.0)) continue;
    const double y = std::log(h.residual);
    sx += h.iter;
    sy += y;
    sxx += double(h.iter) * h.iter;
    sxy += h.iter * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp((n * sxy - sx * sy) / den);
}

std::pair<cvec, IterationReport> chebyshev_modified_solve(const LinearOperator& A, const cvec& b, const cvec& x0,
                                                          double alpha, double c, const SolveOptions& opt) {
  check_sizes(A, b, x0);
  check_interval(alpha, c);
  const auto t0 = clock_type::now();
  IterationReport rep;
  rep.reference_rate = chebyshev_rate(alpha, c);
  const double bn = b.norm() > 0.0 ? b.norm() : 1.0;
  const cvec r0 = b - A.apply(x0);
  auto finish = [&](cvec x, Termination t) {
    rep.termination = t;
    rep.wall_time = seconds_since(t0);
    return std::make_pair(cvec(x + x0), rep);
  };

  double res = r0.norm() / bn;
  rep.history.push_back({0, res, true, 0.0});
  if (res < opt.tol) return finish(cvec::Zero(b.size()), Termination::converged);

  const cplx ratio = -alpha / c - std::sqrt(cplx(-1.0 - alpha / c)) * std::sqrt(cplx(1.0 - alpha / c));
  cplx S = 1.0 / (std::sqrt(cplx(alpha - c)) * std::sqrt(cplx(alpha + c)));
  cvec pm = r0, p, x = S * r0;
  cvec best = cvec::Zero(b.size());
  double best_res = res;
  for (int k = 1; k <= opt.maxit; ++k) {
    const cvec Ap = A.apply(k == 1 ? pm : p);
    if (k == 1) {
      p = (Ap - alpha * pm) / c;
    } else {
      cvec pn = (2.0 / c) * Ap - (2.0 * alpha / c) * p - pm;
      pm.swap(p);
      p.swap(pn);
    }
    S *= ratio;
    x += 2.0 * S * p;
    rep.iterations = k;
    const double proxy = 2.0 * std::abs(S) * p.norm() / bn;
    bool exact = false;
    if (k % opt.check_every == 0 || proxy < opt.tol || k == opt.maxit) {
      res = (r0 - A.apply(x)).norm() / bn;
      exact = true;
      if (proxy < opt.tol) rep.proxy_trigger_residuals.push_back(res);
    }
    rep.history.push_back({k, res, exact, proxy});
    if (!x.allFinite()) return finish(best, Termination::breakdown);
    if (exact && res < best_res) {
      best = x;
      best_res = res;
    }
    if (exact && res < opt.tol) return finish(x, Termination::converged);
  }
  rep.message = "maximum iterations reached";
  return finish(best, Termination::maxit);
}

std::pair<cvec, IterationReport> chebyshev_classical_solve(const LinearOperator& A, const cvec& b, const cvec& x0,
                                                           double alpha, double c, const SolveOptions& opt) {
  check_sizes(A, b, x0);
  check_interval(alpha, c);
  const auto t0 = clock_type::now();
  IterationReport rep;
  rep.reference_rate = chebyshev_rate(alpha, c);
  const double bn = b.norm() > 0.0 ? b.norm() : 1.0;
  const cvec r0 = b - A.apply(x0);
  auto finish = [&](const cvec& x, Termination t) {
    rep.termination = t;
    rep.wall_time = seconds_since(t0);
    return std::make_pair(cvec(x + x0), rep);
  };

  cvec x = cvec::Zero(b.size()), xm = x, r = r0, rm = cvec::Zero(b.size());
  double res = r.norm() / bn;
  rep.history.push_back({0, res, true, 0.0});
  if (res < opt.tol) return finish(x, Termination::converged);

  // t_k = T_{k+1}(sigma)/T_k(sigma)
  const double sigma = -alpha / c;
  double t = sigma;
  double beta_prev = 0.0;
  for (int k = 0; k < opt.maxit; ++k) {
    const double gamma = k == 0 ? -alpha : 0.5 * c * t;
    const cvec Ar = A.apply(r);
    cvec xn = -(r + alpha * x + beta_prev * xm) / gamma;
    cvec rn = (Ar - alpha * r - beta_prev * rm) / gamma;
    xm.swap(x);
    x.swap(xn);
    rm.swap(r);
    r.swap(rn);
    beta_prev = 0.5 * c / t;
    t = 2.0 * sigma - 1.0 / t;
    rep.iterations = k + 1;
    res = r.norm() / bn;
    rep.history.push_back({k + 1, res, true, 0.0});
    if (!x.allFinite()) return finish(xm, Termination::breakdown);
    if (res < opt.tol) return finish(x, Termination::converged);
  }
  rep.message = "maximum iterations reached";
  return finish(x, Termination::maxit);
}

std::pair<cvec, IterationReport> akhiezer_solve(const LinearOperator& A, const cvec& b, const cvec& x0, cplx z,
                                                CoeffSource& src, const SolveOptions& opt,
                                                const std::vector<cplx>* eigs) {
  check_sizes(A, b, x0);
  const BandSystem& bands = src.bands();
  if (bands.contains(z)) fail(errc::domain, "shift lies on the bands");
  const auto t0 = clock_type::now();
  IterationReport rep;
  {
    const auto ev = build_greens(bands);
    rep.reference_rate = eigs ? std::exp(nu(ev, z, *eigs)) : std::exp(-ev.re_g(z));
  }
  const double bn = b.norm() > 0.0 ? b.norm() : 1.0;
  auto resid = [&](const cvec& x) -> cvec { return A.apply(x) - z * x; };
  const cvec r0 = b - resid(x0);
  auto finish = [&](const cvec& x, Termination t) {
    rep.termination = t;
    rep.wall_time = seconds_since(t0);
    return std::make_pair(cvec(x + x0), rep);
  };

  double res = r0.norm() / bn;
  rep.history.push_back({0, res, true, 0.0});
  if (res < opt.tol || r0.norm() == 0.0) return finish(cvec::Zero(b.size()), Termination::converged);

  ShiftTable S(src, z, std::min(opt.maxit, 64));
  cvec pm = cvec::Zero(b.size()), p = r0;
  cvec x = S.S(0) * p;
  cvec best = cvec::Zero(b.size());
  double best_res = res;
  for (int k = 1; k <= opt.maxit; ++k) {
    const auto ck = src.coeff(k - 1);
    const double bprev = k >= 2 ? src.coeff(k - 2).b : 0.0;
    cvec pn = (A.apply(p) - ck.a * p - bprev * pm) / ck.b;
    pm.swap(p);
    p.swap(pn);
    const cplx Sk = S.S(k);
    x += Sk * p;
    rep.iterations = k;
    const double proxy = std::abs(Sk) * p.norm() / bn;
    bool exact = false;
    if (k % opt.check_every == 0 || proxy < opt.tol || k == opt.maxit) {
      res = (r0 - resid(x)).norm() / bn;
      exact = true;
      if (proxy < opt.tol) rep.proxy_trigger_residuals.push_back(res);
    }
    rep.history.push_back({k, res, exact, proxy});
    if (!x.allFinite()) return finish(best, Termination::breakdown);
    if (exact && res < best_res) {
      best = x;
      best_res = res;
    }
    if (exact && res < opt.tol) return finish(x, Termination::converged);
  }
  rep.message = "maximum iterations reached";
  return finish(best, Termination::maxit);
}

cmat akhiezer_inverse(const LinearOperator& A, CoeffSource& src, const SolveOptions& opt, cplx z,
                      IterationReport* report) {
  if (src.bands().contains(z)) fail(errc::domain, "shift lies on the bands");
  const auto t0 = clock_type::now();
  const auto n = A.size();
  const double scale = std::sqrt(double(n));
  IterationReport rep;
  auto resid = [&](const cmat& X) -> double {
    return (cmat::Identity(n, n) - (A.apply(X) - z * X)).norm() / scale;
  };
  ShiftTable S(src, z, std::min(opt.maxit, 64));
  cmat Pm = cmat::Zero(n, n), P = cmat::Identity(n, n);
  cmat X = S.S(0) * P;
  rep.history.push_back({0, 1.0, true, 0.0});
  for (int k = 1; k <= opt.maxit; ++k) {
    const auto ck = src.coeff(k - 1);
    const double bprev = k >= 2 ? src.coeff(k - 2).b : 0.0;
    cmat Pn = (A.apply(P) - ck.a * P - bprev * Pm) / ck.b;
    Pm.swap(P);
    P.swap(Pn);
    const cplx Sk = S.S(k);
    X += Sk * P;
    rep.iterations = k;
    const double proxy = std::abs(Sk) * P.norm() / scale;
    if (k % opt.check_every == 0 || proxy < opt.tol || k == opt.maxit) {
      const double r = resid(X);
      rep.history.push_back({k, r, true, proxy});
      if (r < opt.tol) {
        rep.termination = Termination::converged;
        break;
      }
    }
    if (!X.allFinite()) {
      rep.termination = Termination::breakdown;
      break;
    }
  }
  rep.wall_time = seconds_since(t0);
  if (rep.termination == Termination::maxit) rep.message = "maximum iterations reached";
  if (report) *report = rep;
  return X;
}

QuadratureRule quadrature_circles(const BandSystem& bands, int m_total, double inflate,
                                  const std::vector<cplx>& excluded) {
  const int nb = static_cast<int>(bands.size());
  if (nb == 0) fail(errc::config, "empty band system");
  if (m_total < 2 * nb) fail(errc::config, "need at least 2 quadrature nodes per circle");
  if (!(inflate > 1.0)) fail(errc::config, "inflation factor must exceed 1");
  const auto counts = proportional_counts(m_total, bands, 2);
  QuadratureRule q;
  for (int k = 0; k < nb; ++k) {
    QuadratureCircle c{bands[k].mid(), 0.5 * inflate * bands[k].length(), counts[k], q.nodes.size()};
    if (k > 0) {
      const auto& prev = q.circles.back();
      if (c.center.real() - c.radius <= prev.center.real() + prev.radius)
        fail(errc::config, "quadrature circles intersect; reduce the inflation factor");
    }
    for (const auto& e : excluded)
      if (std::abs(e - c.center) <= c.radius) fail(errc::config, "quadrature circle encloses an excluded point");
    for (int j = 0; j < c.count; ++j) {
      const cplx e = std::polar(1.0, 2.0 * pi * j / c.count);
      q.nodes.push_back(c.center + c.radius * e);
      q.weights.push_back(two_pi_i * c.radius / double(c.count) * e);
    }
    q.circles.push_back(c);
  }
  return q;
}

std::vector<cplx> matfun_coefficients(const std::function<cplx(cplx)>& f, const QuadratureRule& quad,
                                      CoeffSource& src, int N) {
  std::vector<cplx> alpha(N + 1, 0.0);
  for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
    const cplx fz = f(quad.nodes[j]);
    if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()))
      fail(errc::domain, "function is not finite at a quadrature node");
    const auto C = src.cauchy(quad.nodes[j], N);
    for (int k = 0; k <= N; ++k) alpha[k] -= C[k] * fz * quad.weights[j];
  }
  return alpha;
}

namespace {

// f_k = sum_{l<=k} coef_l p_l(A) b with coefficients produced in doubling blocks
std::pair<cvec, IterationReport> expand(const std::function<std::vector<cplx>(int)>& coefs, const LinearOperator& A,
                                        const cvec& b, CoeffSource& src, const MatfunOptions& opt) {
  if (b.size() != A.size()) fail(errc::domain, "right-hand side length does not match operator");
  const auto t0 = clock_type::now();
  IterationReport rep;
  const double bn = b.norm() > 0.0 ? b.norm() : 1.0;
  const double en = opt.exact ? std::max(opt.exact->norm(), 1e-300) : 1.0;
  int cap = std::min(opt.k_max, 64);
  auto alpha = coefs(cap);

  cvec pm = cvec::Zero(b.size()), p = b;
  cvec f = alpha[0] * p;
  const double f1 = std::max(f.norm(), 1e-300);
  auto record = [&](int k, double incr) {
    const double e = opt.exact ? (f - *opt.exact).norm() / en : incr / f1;
    rep.history.push_back({k, e, opt.exact != nullptr, incr / bn});
  };
  record(0, f.norm());
  std::deque<double> last;
  rep.termination = Termination::maxit;
  if (b.norm() == 0.0) rep.termination = Termination::converged;
  for (int k = 1; k <= opt.k_max && rep.termination != Termination::converged; ++k) {
    if (k > cap) {
      cap = std::min(opt.k_max, 2 * cap);
      alpha = coefs(cap);
    }
    const auto ck = src.coeff(k - 1);
    const double bprev = k >= 2 ? src.coeff(k - 2).b : 0.0;
    cvec pn = (A.apply(p) - ck.a * p - bprev * pm) / ck.b;
    pm.swap(p);
    p.swap(pn);
    f += alpha[k] * p;
    rep.iterations = k;
    const double incr = std::abs(alpha[k]) * p.norm();
    record(k, incr);
    if (!f.allFinite()) {
      rep.termination = Termination::breakdown;
      break;
    }
    last.push_back(incr);
    if (last.size() > 5) last.pop_front();
    if (last.size() == 5 && *std::max_element(last.begin(), last.end()) < opt.tol * f1)
      rep.termination = Termination::converged;
  }
  if (rep.termination == Termination::maxit) rep.message = "k_max reached";
  rep.wall_time = seconds_since(t0);
  return {f, rep};
}

} // namespace

std::pair<cvec, IterationReport> matfun_apply(const std::function<cplx(cplx)>& f, const LinearOperator& A,
                                              const cvec& b, const QuadratureRule& quad, CoeffSource& src,
                                              const MatfunOptions& opt) {
  // validate f at the nodes before any work
  (void)matfun_coefficients(f, quad, src, 0);
  return expand([&](int N) { return matfun_coefficients(f, quad, src, N); }, A, b, src, opt);
}

std::pair<cvec, IterationReport> matfun_pole_residue(const std::vector<PoleResidue>& terms, const LinearOperator& A,
                                                     const cvec& b, CoeffSource& src, const MatfunOptions& opt) {
  for (const auto& t : terms)
    if (src.bands().contains(t.pole)) fail(errc::domain, "pole lies on the bands");
  if (terms.empty()) {
    IterationReport rep;
    rep.termination = Termination::converged;
    rep.history.push_back({0, 0.0, false, 0.0});
    return {cvec::Zero(b.size()), rep};
  }
  auto coefs = [&](int N) {
    std::vector<cplx> alpha(N + 1, 0.0);
    for (const auto& t : terms) {
      const auto C = src.cauchy(t.pole, N);
      for (int k = 0; k <= N; ++k) alpha[k] += t.residue * two_pi_i * C[k];
    }
    return alpha;
  };
  return expand(coefs, A, b, src, opt);
}

} // namespace akz
