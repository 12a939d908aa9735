#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "akhiezer/akhiezer_poly.hpp"
#include "akhiezer/error.hpp"
#include "akhiezer/stieltjes_proc.hpp"

using namespace akz;

namespace {

const double pi = 3.14159265358979323846;
const cplx two_pi_i(0.0, 2.0 * pi);

const std::vector<std::vector<double>> configs{
    {-2.0, -0.5, 0.5, 6.0},
    {-1.0, -0.3, 0.2, 1.0},
    {0.0, 1.0, 1.5, 4.0},
    {-1.0, -0.5, 0.5, 1.0},
};

BandSystem bands_of(const std::vector<double>& e) { return BandSystem::from_endpoints(e); }

// p_0..p_N at x from a coefficient table
std::vector<cplx> poly_values(const std::vector<RecurrencePair>& c, int N, cplx x) {
  std::vector<cplx> p(N + 1);
  p[0] = 1.0;
  if (N >= 1) p[1] = (x - c[0].a) / c[0].b;
  for (int n = 1; n < N; ++n) p[n + 1] = ((x - c[n].a) * p[n] - c[n - 1].b * p[n - 1]) / c[n].b;
  return p;
}

// (1/2 pi i) int p_n w / (x - z) dx, written as (1/2 pi i p_n(z)) int p_n^2 w / (x - z) dx
// (the difference quotient of p_n is orthogonal to p_n), which avoids cancellation when C_n is small;
// band by band under x = mid + half cos(theta)
cplx cauchy_by_quadrature(const WeightSpec& w, const std::vector<RecurrencePair>& c, int n, cplx z) {
  using boost::math::quadrature::gauss_kronrod;
  cplx total = 0.0;
  for (std::size_t j = 0; j < w.bands.size(); ++j) {
    const double mid = w.bands[j].mid(), half = 0.5 * w.bands[j].length();
    auto part = [&](bool imag) {
      auto f = [&](double th) {
        const double x = mid + half * std::cos(th);
        if (!(x > w.bands[j].lo && x < w.bands[j].hi)) return 0.0;
        const double pn = poly_values(c, n, x)[n].real();
        const cplx v = pn * pn * w(x) * half * std::sin(th) / (x - z);
        return imag ? v.imag() : v.real();
      };
      double err = 0.0;
      return gauss_kronrod<double, 31>::integrate(f, 0.0, pi, 15, 1e-12, &err);
    };
    total += cplx(part(false), part(true));
  }
  return total / (two_pi_i * poly_values(c, n, z)[n]);
}

} // namespace

TEST_CASE("closed-form recurrence coefficients match the Stieltjes oracle") {
  for (const auto& e : configs) {
    const auto B = bands_of(e);
    const auto p = build_params(B);
    const auto oracle = coeffs_by_stieltjes(make_weight(B, WeightKind::akhiezer_like), 41);
    const double scale = B.right() - B.left();
    for (int n = 0; n <= 40; ++n) {
      const auto c = recurrence_coeffs(n, p);
      CHECK(std::fabs(c.a - oracle[n].a) < 1e-10 * scale);
      CHECK(std::fabs(c.b - oracle[n].b) < 1e-10 * scale);
    }
  }
}

TEST_CASE("tiny gap reproduces the Chebyshev-T recurrence") {
  const auto p = build_params(bands_of({-1.0, -5e-7, 5e-7, 1.0}));
  const auto c0 = recurrence_coeffs(0, p);
  CHECK(std::fabs(c0.a) < 1e-4);
  CHECK(std::fabs(c0.b - 1.0 / std::sqrt(2.0)) < 1e-4);
  for (int n = 1; n <= 10; ++n) {
    const auto c = recurrence_coeffs(n, p);
    CHECK(std::fabs(c.a) < 1e-4);
    CHECK(std::fabs(c.b - 0.5) < 1e-4);
  }
}

TEST_CASE("Cauchy integrals: closed form against adaptive quadrature") {
  const auto B = bands_of({-2.0, -0.5, 0.5, 6.0});
  const auto p = build_params(B);
  const auto w = make_weight(B, WeightKind::akhiezer_like);
  const auto oracle = coeffs_by_stieltjes(w, 12);
  const std::vector<cplx> pts{{0.3, 0.4},  {-1.0, 0.7}, {-3.0, -0.5}, {2.0, -2.0}, {7.0, 1.0},   {0.1, -0.2},
                              {-0.6, 0.05}, {4.0, 0.03}, {0.0, 0.0},   {7.0, 0.0},  {-2.5, 0.0}, {0.55, -0.05}};
  for (const cplx z : pts)
    for (int n : {0, 3, 10}) {
      const cplx cf = cauchy_integral(n, z, p);
      const cplx q = cauchy_by_quadrature(w, oracle, n, z);
      INFO("z = " << z << ", n = " << n);
      CHECK(std::abs(cf - q) < 1e-8 * std::abs(q));
    }
}

TEST_CASE("Cauchy integrals satisfy the three-term recurrence") {
  for (const auto& e : configs) {
    const auto B = bands_of(e);
    const auto p = build_params(B);
    const auto c = recurrence_table(22, p);
    for (const cplx z : {cplx(0.1, 0.3), cplx(B.right() + 0.5, 0.0), cplx(B.left() - 1.0, -2.0)}) {
      std::vector<cplx> C(22);
      for (int n = 0; n < 22; ++n) C[n] = cauchy_integral(n, z, p);
      CHECK(std::abs(cauchy_row0_residual(z, c, C)) < 1e-10 * std::abs(C[0]) * std::abs(z - c[0].a));
      for (int n = 1; n <= 20; ++n) {
        const cplx r = (z - c[n].a) * C[n] - c[n - 1].b * C[n - 1] - c[n].b * C[n + 1];
        const double scale = std::abs(z - c[n].a) * std::abs(C[n]) + c[n - 1].b * std::abs(C[n - 1]);
        CHECK(std::abs(r) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("backfill is stable where the forward recurrence is not") {
  const auto p = build_params(bands_of({-1.0, -0.3, 0.2, 1.0}));
  const cplx z = 3.0;
  const int N = 40;
  const auto back = cauchy_sequence(N, z, p);
  REQUIRE(back.size() == static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) {
    const cplx ref = cauchy_integral(n, z, p);
    CHECK(std::abs(back[n] - ref) < 1e-10 * std::abs(ref));
  }
  const auto c = recurrence_table(N + 1, p);
  std::vector<cplx> fwd{cauchy_integral(0, z, p), cauchy_integral(1, z, p)};
  double worst = 0.0;
  for (int n = 1; n < 30; ++n) {
    fwd.push_back(((z - c[n].a) * fwd[n] - c[n - 1].b * fwd[n - 1]) / c[n].b);
    worst = std::max(worst, std::abs(fwd[n + 1] - back[n + 1]) / std::abs(back[n + 1]));
  }
  CHECK(worst >= 1e3);
}

TEST_CASE("orthonormality of the closed-form polynomials") {
  for (const auto& e : configs) {
    const auto B = bands_of(e);
    const auto p = build_params(B);
    const auto m = discretize(make_weight(B, WeightKind::akhiezer_like), 600);
    const int N = 12;
    std::vector<std::vector<double>> P(N + 1, std::vector<double>(m.x.size()));
    for (std::size_t i = 0; i < m.x.size(); ++i)
      for (int n = 0; n <= N; ++n) P[n][i] = eval_pn(n, m.x[i], p).real();
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= a; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.x.size(); ++i) s += m.w[i] * P[a][i] * P[b][i];
        CHECK(std::fabs(s - (a == b ? 1.0 : 0.0)) < 1e-8);
      }
  }
}

TEST_CASE("closed-form polynomials obey the three-term recurrence") {
  for (const auto& e : configs) {
    const auto B = bands_of(e);
    const auto p = build_params(B);
    const std::vector<cplx> xs{B[0].mid(), B[1].mid() + 0.1 * B[1].length(), cplx(0.3, 0.7), cplx(B.right() + 1.0, -0.2)};
    for (const cplx x : xs)
      for (int n = 1; n <= 15; ++n) {
        const auto cm = recurrence_coeffs(n - 1, p), cn = recurrence_coeffs(n, p);
        const cplx pm = eval_pn(n - 1, x, p), pn = eval_pn(n, x, p), pp = eval_pn(n + 1, x, p);
        const cplx r = x * pn - (cm.b * pm + cn.a * pn + cn.b * pp);
        const double scale = std::abs(x) * std::abs(pn) + cm.b * std::abs(pm) + cn.b * std::abs(pp) + 1.0;
        CHECK(std::abs(r) < 1e-10 * scale);
      }
  }
}

TEST_CASE("affine covariance") {
  const std::vector<double> e{-1.0, -0.3, 0.2, 1.0};
  const auto p = build_params(bands_of(e));
  for (const auto [c, d] : {std::pair{2.5, 1.0}, std::pair{0.3, -4.0}}) {
    std::vector<double> e2;
    for (double x : e) e2.push_back(c * x + d);
    const auto q = build_params(bands_of(e2));
    for (int n = 0; n <= 20; ++n) {
      const auto r1 = recurrence_coeffs(n, p), r2 = recurrence_coeffs(n, q);
      CHECK(r2.a == doctest::Approx(c * r1.a + d).epsilon(1e-9).scale(c));
      CHECK(r2.b == doctest::Approx(c * r1.b).epsilon(1e-9));
    }
    for (const cplx z : {cplx(0.1, 0.4), cplx(2.0, 0.0), cplx(-0.5, -1.0)})
      for (int n : {0, 4, 9}) {
        CHECK(std::abs(eval_pn(n, c * z + d, q) - eval_pn(n, z, p)) < 1e-9 * (1.0 + std::abs(eval_pn(n, z, p))));
        const cplx c1 = cauchy_integral(n, z, p) / c, c2 = cauchy_integral(n, c * z + d, q);
        CHECK(std::abs(c1 - c2) < 1e-9 * std::abs(c1));
      }
  }
}

TEST_CASE("guard band around the inner endpoint") {
  const auto p = build_params(bands_of({-1.0, -0.3, 0.2, 1.0}));
  CHECK_THROWS_AS(u_of_x(p.alpha + 1e-9, p), error);
  // polynomial evaluation falls back to the recurrence there
  const auto c = recurrence_table(8, p);
  const double x = p.alpha * p.c + p.d + 1e-9;
  const auto ref = poly_values(c, 8, x);
  for (int n = 0; n <= 8; ++n) CHECK(std::abs(eval_pn(n, x, p) - ref[n]) < 1e-10 * (1.0 + std::abs(ref[n])));
}

TEST_CASE("weight matches the Stieltjes-procedure weight and has unit mass") {
  const auto B = bands_of({-2.0, -0.5, 0.5, 6.0});
  const auto p = build_params(B);
  const auto w = make_weight(B, WeightKind::akhiezer_like);
  for (double x : {-1.7, -0.9, 0.6, 2.0, 5.5}) CHECK(akhiezer_weight(x, p) == doctest::Approx(w(x)).epsilon(1e-12));
  CHECK(akhiezer_weight(0.0, p) == 0.0);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(build_params(bands_of({-1.0, 0.0, 0.5, 1.0, 2.0, 3.0})), error);
  const auto p = build_params(bands_of({-1.0, -0.3, 0.2, 1.0}));
  CHECK_THROWS_AS(eval_pn(-1, 0.0, p), error);
  CHECK_THROWS_AS(cauchy_integral(2, 0.5, p), error);
}
