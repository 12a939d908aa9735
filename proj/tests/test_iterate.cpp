#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "akhiezer/error.hpp"
#include "akhiezer/greens.hpp"
#include "akhiezer/iterate.hpp"

using namespace akz;

namespace {

constexpr double pi = std::numbers::pi;
const cplx two_pi_i(0.0, 2.0 * pi);

double cheb_T(int k, double x) {
  return std::fabs(x) <= 1.0 ? std::cos(k * std::acos(x)) : std::cosh(k * std::acosh(std::fabs(x))) * (x < 0 && k % 2 ? -1 : 1);
}

LinearOperator diag(std::vector<double> d) { return LinearOperator::diagonal(Eigen::Map<rvec>(d.data(), d.size())); }

const BandSystem two_band = BandSystem::from_endpoints({-2.0, -0.5, 0.5, 6.0});

double rel(const cvec& a, const cvec& b) { return (a - b).norm() / b.norm(); }

} // namespace

TEST_CASE("scalar Chebyshev iterations") {
  const auto A = diag({2.0});
  const cvec b = cvec::Ones(1), x0 = cvec::Zero(1);
  SolveOptions opt;
  opt.check_every = 1;
  opt.tol = 1e-14;
  const auto [xm, rm] = chebyshev_modified_solve(A, b, x0, 2.0, 1.0, opt);
  CHECK(std::abs(xm(0) - 0.5) < 1e-13);
  CHECK(rm.reference_rate == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
  // p_k(2) = T_k(0) vanishes for odd k, so compare every other step
  const auto& h = rm.history;
  REQUIRE(h.size() > 14);
  CHECK(std::pow(h[14].residual / h[10].residual, 0.25) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-3));

  const auto [xc, rc] = chebyshev_classical_solve(A, b, x0, 2.0, 1.0, opt);
  CHECK(std::abs(xc(0) - 0.5) < 1e-13);
  const double rho = 2.0 - std::sqrt(3.0);
  for (const auto& e : rc.history) {
    // r_k(2) = T_k(0) / T_k(2)
    CHECK(std::fabs(e.residual - std::fabs(cheb_T(e.iter, 0.0) / cheb_T(e.iter, 2.0))) < 1e-14);
    CHECK(e.residual <= 2 * std::pow(rho, e.iter) / (1 + std::pow(rho, 2 * e.iter)) + 1e-15);
  }
}

TEST_CASE("classical Chebyshev residual polynomial") {
  const std::vector<double> lam{1.0, 1.5, 2.5, 3.0};
  const auto A = diag(lam);
  const cvec b = cvec::Ones(4);
  SolveOptions opt;
  opt.check_every = 1;
  opt.tol = 0.0;
  opt.maxit = 25;
  const auto rep = chebyshev_classical_solve(A, b, cvec::Zero(4), 2.0, 1.0, opt).second;
  for (const auto& e : rep.history) {
    double s = 0.0;
    for (double l : lam) s += std::pow(cheb_T(e.iter, 2.0 - l) / cheb_T(e.iter, 2.0), 2);
    CHECK(e.residual == doctest::Approx(std::sqrt(s / 4.0)).epsilon(1e-10).scale(1e-15));
  }
  CHECK(rep.termination == Termination::maxit);
}

TEST_CASE("Chebyshev on a uniform diagonal") {
  const auto A = gen_uniform_diag(200, BandSystem::from_endpoints({1.0, 3.0}));
  const cvec b = A.apply(cvec(cvec::Ones(200)));
  SolveOptions opt;
  opt.check_every = 1;
  const auto [xm, rm] = chebyshev_modified_solve(A, b, cvec::Zero(200), 2.0, 1.0, opt);
  const auto [xc, rc] = chebyshev_classical_solve(A, b, cvec::Zero(200), 2.0, 1.0, opt);
  CHECK(rm.termination == Termination::converged);
  CHECK(rc.termination == Termination::converged);
  CHECK(fitted_rate(rm, 5, 15) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(0.1));
  CHECK(rel(xm, xc) < 10 * opt.tol);
  CHECK(rel(xm, cvec::Ones(200)) < 10 * opt.tol);

  // starting from the solution
  const auto [xs, rs] = chebyshev_modified_solve(A, b, cvec::Ones(200), 2.0, 1.0, opt);
  CHECK(rs.iterations == 0);
  CHECK((xs - cvec::Ones(200)).norm() < 1e-12);
  CHECK_THROWS_AS(chebyshev_modified_solve(A, b, cvec::Zero(200), 0.5, 1.0, opt), error);
}

TEST_CASE("Akhiezer iteration on the uniform two-band diagonal") {
  const auto A = gen_uniform_diag(200, two_band);
  const cvec b = A.apply(cvec(cvec::Ones(200)));
  auto src = make_coeff_source(two_band);
  SolveOptions opt;
  const auto [x, rep] = akhiezer_solve(A, b, cvec::Zero(200), 0.0, *src, opt);
  CHECK(rep.termination == Termination::converged);
  CHECK(rel(x, cvec::Ones(200)) < 10 * opt.tol);
  CHECK(rep.reference_rate == doctest::Approx(std::exp(-build_greens(two_band).re_g(0.0))).epsilon(1e-12));
  CHECK(fitted_rate(rep) == doctest::Approx(rep.reference_rate).epsilon(0.1));
  for (double r : rep.proxy_trigger_residuals) CHECK(r < 50 * opt.tol);

  // zero right-hand side
  const cvec x0 = cvec::LinSpaced(200, 0.0, 1.0);
  const auto [xz, rz] = akhiezer_solve(A, A.apply(x0), x0, 0.0, *src, opt);
  CHECK(rz.iterations == 0);
  CHECK((xz - x0).norm() == 0.0);
  CHECK_THROWS_AS(akhiezer_solve(A, b, cvec::Zero(200), 1.0, *src, opt), error);
}

TEST_CASE("shifted solves against dense LU") {
  const auto sys = gen_perturbed(150, two_band, 0.0, 11);
  const cvec b = cvec::Random(150);
  const rmat M = sys.op.materialize();
  for (auto kind : {CoeffKind::closed_form, CoeffKind::stieltjes})
    for (const cplx z : {cplx(0.0, 0.0), cplx(0.1, 0.4), cplx(7.0, -1.0)}) {
      auto src = make_coeff_source(two_band, kind);
      SolveOptions opt;
      const auto [x, rep] = akhiezer_solve(sys.op, b, cvec::Zero(150), z, *src, opt);
      const cvec ref = dense_solve(cmat(M.cast<cplx>() - z * cmat::Identity(150, 150)), b);
      INFO("z = " << z << " " << src->name());
      CHECK(rep.termination == Termination::converged);
      CHECK(rel(x, ref) < 10 * opt.tol * 50); // forward error: residual times a modest condition number
      CHECK((b - (M.cast<cplx>() * x - z * x)).norm() / b.norm() < 10 * opt.tol);
    }
}

TEST_CASE("closed-form and Stieltjes sources agree") {
  auto cf = make_coeff_source(two_band, CoeffKind::closed_form);
  auto st = make_coeff_source(two_band, CoeffKind::stieltjes);
  for (int k = 0; k < 40; ++k) {
    CHECK(std::fabs(cf->coeff(k).a - st->coeff(k).a) < 1e-10);
    CHECK(std::fabs(cf->coeff(k).b - st->coeff(k).b) < 1e-10);
  }
  for (const cplx z : {cplx(0.0, 0.0), cplx(-3.0, 0.5)}) {
    const auto c1 = cf->cauchy(z, 30), c2 = st->cauchy(z, 30);
    for (int k = 0; k <= 30; ++k) CHECK(std::abs(c1[k] - c2[k]) < 1e-9 * std::abs(c1[k]));
  }
  CHECK_THROWS_AS(make_coeff_source(BandSystem::from_endpoints({0, 1, 2, 3, 4, 5}), CoeffKind::closed_form), error);
}

TEST_CASE("rate follows nu with an eigenvalue outside the bands") {
  const auto ev = build_greens(two_band);
  auto src = make_coeff_source(two_band);
  SolveOptions opt;
  opt.check_every = 1;
  // just outside: slower but convergent; far outside: nu(0) > 0 and the iteration diverges
  for (double outlier : {6.01, 6.4}) {
    std::vector<double> d;
    for (int i = 0; i < 60; ++i) d.push_back(-2.0 + 1.5 * i / 59.0);
    for (int i = 0; i < 140; ++i) d.push_back(0.5 + 5.5 * i / 139.0);
    d.push_back(outlier);
    const auto A = diag(d);
    const cvec b = cvec::Ones(d.size());
    std::vector<cplx> eigs(d.begin(), d.end());
    opt.maxit = 300;
    const auto [x, rep] = akhiezer_solve(A, b, cvec::Zero(d.size()), 0.0, *src, opt, &eigs);
    const double ref = std::exp(nu(ev, 0.0, eigs));
    INFO("outlier " << outlier);
    CHECK(rep.reference_rate == doctest::Approx(ref).epsilon(1e-12));
    CHECK(ref > std::exp(-ev.re_g(0.0)));
    if (ref < 1.0) {
      CHECK(rep.termination == Termination::converged);
      CHECK(fitted_rate(rep) == doctest::Approx(ref).epsilon(0.15));
    } else {
      CHECK(rep.termination == Termination::maxit);
      CHECK(fitted_rate(rep, 20, 300) == doctest::Approx(ref).epsilon(0.15));
    }
  }
}

TEST_CASE("approximate inverse") {
  auto src = make_coeff_source(two_band);
  SolveOptions opt;
  const auto D = gen_uniform_diag(40, two_band);
  const cmat X = akhiezer_inverse(D, *src, opt);
  const rmat Dm = D.materialize();
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const cplx want = i == j ? 1.0 / Dm(i, i) : 0.0;
      CHECK(std::abs(X(i, j) - want) < 10 * opt.tol * std::max(1.0, std::abs(want)) * 10);
    }

  const auto sys = gen_perturbed(50, two_band, 0.0, 2);
  IterationReport rep;
  const cmat Y = akhiezer_inverse(sys.op, *src, opt, 0.0, &rep);
  CHECK(rep.termination == Termination::converged);
  CHECK((sys.op.apply(Y) - cmat::Identity(50, 50)).norm() / std::sqrt(50.0) < 10 * opt.tol);
  const cvec b = cvec::Random(50);
  const cvec xs = akhiezer_solve(sys.op, b, cvec::Zero(50), 0.0, *src, opt).first;
  CHECK(rel(Y * b, xs) < 10 * opt.tol * 50);
}

TEST_CASE("quadrature circles") {
  const auto q = quadrature_circles(two_band, 200);
  REQUIRE(q.circles.size() == 2);
  CHECK(q.circles[0].count == 43);
  CHECK(q.circles[1].count == 157);
  CHECK(q.nodes.size() == 200u);
  for (const auto& c : q.circles) {
    cplx s1 = 0.0, s0 = 0.0, sfar = 0.0;
    for (int j = 0; j < c.count; ++j) {
      const std::size_t i = c.offset + j;
      s1 += q.weights[i] / (q.nodes[i] - c.center);
      s0 += q.weights[i];
      sfar += q.weights[i] / (q.nodes[i] - 100.0);
    }
    CHECK(std::abs(s1 / two_pi_i - 1.0) < 1e-13);
    CHECK(std::abs(s0) < 1e-13 * c.radius * c.count);
    CHECK(std::abs(sfar) < 1e-13);
  }
  CHECK_THROWS_AS(quadrature_circles(two_band, 3), error);
  CHECK_THROWS_AS(quadrature_circles(two_band, 200, 1.0), error);
  CHECK_THROWS_AS(quadrature_circles(BandSystem::from_endpoints({0, 1, 1.05, 2}), 200, 1.5), error);
  CHECK_THROWS_AS(quadrature_circles(two_band, 200, 1.15, {cplx(1.0, 0.0)}), error);
}

TEST_CASE("matrix functions") {
  const auto sys = gen_perturbed(200, two_band, 0.01, 4);
  const rmat M = sys.op.materialize();
  const cvec b = cvec::Ones(200);
  auto src = make_coeff_source(two_band);
  // 800 nodes put the quadrature error near 1e-12 for entire f (200 saturate around 1e-5)
  const auto quad = quadrature_circles(two_band, 800);

  SUBCASE("constant function") {
    const auto [f, rep] = matfun_apply([](cplx) { return cplx(1.0); }, sys.op, b, quad, *src);
    CHECK(rel(f, b) < 1e-10);
    CHECK(rep.iterations < 10);
  }
  SUBCASE("exponential saturates quickly") {
    const cvec ref = dense_matfun(M, b, [](cplx z) { return std::exp(z); });
    MatfunOptions opt;
    opt.exact = &ref;
    opt.k_max = 60;
    const auto [f, rep] = matfun_apply([](cplx z) { return std::exp(z); }, sys.op, b, quad, *src, opt);
    CHECK(rel(f, ref) < 1e-12);
    CHECK(rep.history[20].residual < 1e-12);
    // superexponential decay: the average slope of the log-error steepens
    for (int k = 4; k <= 12; k += 4) { // saturation sets in near 18
      const double s1 = std::log(rep.history[k].residual / rep.history[k - 4].residual);
      const double s2 = std::log(rep.history[k + 4].residual / rep.history[k].residual);
      CHECK(s2 < s1);
    }
  }
  SUBCASE("1/x matches the shifted solve") {
    // the pole at 0 sits close to the circles, so this needs more nodes (1e-4 at 400, 4e-8 at 800)
    const auto [f, rep] = matfun_apply([](cplx z) { return 1.0 / z; }, sys.op, b, quadrature_circles(two_band, 1600), *src);
    SolveOptions so;
    const cvec x = akhiezer_solve(sys.op, b, cvec::Zero(200), 0.0, *src, so).first;
    CHECK(rel(f, x) < 1e-9);
  }
  SUBCASE("pole-residue form") {
    const cplx p(0.2, 0.3);
    const auto [f, rep] = matfun_pole_residue({{p, 1.0}}, sys.op, b, *src);
    SolveOptions so;
    const cvec x = akhiezer_solve(sys.op, b, cvec::Zero(200), p, *src, so).first;
    CHECK(rel(f, x) < 10 * so.tol * 10);
    const auto empty = matfun_pole_residue({}, sys.op, b, *src).first;
    CHECK(empty.norm() == 0.0);
    CHECK_THROWS_AS(matfun_pole_residue({{cplx(1.0, 0.0), 1.0}}, sys.op, b, *src), error);
  }
  SUBCASE("budget exhaustion returns the partial sum") {
    MatfunOptions opt;
    opt.k_max = 3;
    const auto [f, rep] = matfun_apply([](cplx z) { return std::exp(z); }, sys.op, b, quad, *src, opt);
    CHECK(rep.termination == Termination::maxit);
    CHECK(rep.iterations == 3);
    CHECK(f.allFinite());
  }
  SUBCASE("non-finite node values are rejected") {
    const auto q2 = quadrature_circles(two_band, 200);
    CHECK_THROWS_AS(matfun_apply([](cplx) { return cplx(NAN, 0.0); }, sys.op, b, q2, *src), error);
  }
}

TEST_CASE("budget exhaustion returns the best iterate") {
  const auto A = gen_uniform_diag(200, two_band);
  const cvec b = cvec::Ones(200);
  auto src = make_coeff_source(two_band);
  SolveOptions opt;
  opt.maxit = 20;
  const auto [x, rep] = akhiezer_solve(A, b, cvec::Zero(200), 0.0, *src, opt);
  CHECK(rep.termination == Termination::maxit);
  CHECK(rep.iterations == 20);
  double best = 1.0;
  for (const auto& e : rep.history)
    if (e.exact) best = std::min(best, e.residual);
  CHECK((b - A.apply(x)).norm() / b.norm() == doctest::Approx(best).epsilon(1e-10));
}
