#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "akhiezer/error.hpp"
#include "akhiezer/linops.hpp"

using namespace akz;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& body) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("akz_test_linops_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::ofstream(path) << body;
  }
  ~TempFile() { fs::remove(path); }
  std::string str() const { return path.string(); }
};

errc code_of(auto&& f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return errc::numeric;
}

std::vector<double> sorted_real(const cvec& v) {
  std::vector<double> out;
  for (auto x : v) out.push_back(x.real());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("uniform diagonal generator") {
  const auto B = BandSystem::from_endpoints({-2.0, -0.5, 0.5, 6.0});
  const auto counts = proportional_counts(200, B);
  CHECK(counts[0] + counts[1] == 200);
  CHECK(counts[0] == 43); // 1.5/7 of 200 = 42.86
  const auto op = gen_uniform_diag(200, B);
  const rmat M = op.materialize();
  const auto ev = M.diagonal();
  CHECK(ev.minCoeff() == -2.0);
  CHECK(ev.maxCoeff() == 6.0);
  for (int i = 0; i < 200; ++i) CHECK(B.contains(ev(i)));
  CHECK((M - rmat(ev.asDiagonal())).norm() == 0.0);
  CHECK(code_of([&] { gen_uniform_diag(10, B, {3, 3}); }) == errc::config);
}

TEST_CASE("proportional counts") {
  const auto B = BandSystem::from_endpoints({0.0, 1.0, 2.0, 2.001, 3.0, 5.0});
  const auto c = proportional_counts(100, B, 2);
  CHECK(c[0] + c[1] + c[2] == 100);
  CHECK(c[1] == 2);
  CHECK(std::abs(c[2] - 2 * c[0]) <= 2);
  CHECK(code_of([&] { proportional_counts(5, B, 2); }) == errc::config);
}

TEST_CASE("perturbed generator") {
  const auto B = BandSystem::from_endpoints({-2.0, -0.5, 0.5, 6.0});
  const auto s0 = gen_perturbed(120, B, 0.0, 3);
  const auto pts = uniform_band_points(B, proportional_counts(120, B));
  auto sorted_pts = pts;
  std::sort(sorted_pts.begin(), sorted_pts.end());
  CHECK(s0.eigenvalues == sorted_pts);

  const auto s = gen_perturbed(120, B, 0.05, 7);
  const rmat M = s.op.materialize();
  CHECK((M - M.transpose()).norm() < 1e-12);
  const auto ev = sorted_real(dense_eig(M, false).values);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::fabs(ev[i] - s.eigenvalues[i]) < 1e-11);
  CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));

  const auto again = gen_perturbed(120, B, 0.05, 7);
  CHECK(again.eigenvalues == s.eigenvalues);
  CHECK((again.op.materialize() - M).norm() == 0.0);
  CHECK(gen_perturbed(120, B, 0.05, 8).eigenvalues != s.eigenvalues);
  CHECK(code_of([&] { gen_perturbed(120, B, -1.0); }) == errc::config);
}

TEST_CASE("BVP system") {
  const auto s = bvp_system(100);
  CHECK(s.op.size() == 100);
  CHECK((s.A - s.A.transpose()).norm() == 0.0);
  for (int i = 0; i < 100; ++i) CHECK(s.grid(i) == doctest::Approx((i + 1) / 101.0));

  const rmat P = s.op.materialize();
  CHECK((P - s.L.partialPivLu().solve(s.A)).norm() < 1e-10 * P.norm());
  CHECK((s.L * s.rhs.real() - s.grid).norm() < 1e-12);

  const auto ev = sorted_real(dense_eig(P, false).values);
  // extremes of the two clusters
  const double expect[4] = {-4.14928, -0.28169, 0.43062, 0.99921};
  const auto neg_end = std::find_if(ev.begin(), ev.end(), [](double x) { return x > 0; });
  REQUIRE(neg_end != ev.begin());
  REQUIRE(neg_end != ev.end());
  const double got[4] = {ev.front(), *(neg_end - 1), *neg_end, ev.back()};
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(got[i] / expect[i] - 1.0) < 1e-4);

  // inertia: same number of negative eigenvalues as A
  const auto evA = sorted_real(dense_eig(s.A, false).values);
  CHECK(std::count_if(evA.begin(), evA.end(), [](double x) { return x < 0; }) == neg_end - ev.begin());
  CHECK(code_of([] { bvp_system(2); }) == errc::config);
}

TEST_CASE("Matrix Market reader") {
  SUBCASE("identity") {
    TempFile f("%%MatrixMarket matrix coordinate real general\n% comment\n3 3 3\n1 1 1\n2 2 1.0\n3 3 1e0\n");
    const auto op = read_matrix_market(f.str());
    cvec x(3);
    x << cplx(1, 2), 3.0, cplx(-1, 0.5);
    CHECK((op.apply(x) - x).norm() == 0.0);
  }
  SUBCASE("symmetric fills the upper triangle") {
    TempFile f("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 1 -1\n");
    const rmat M = read_matrix_market(f.str()).materialize();
    CHECK(M(0, 1) == -1.0);
    CHECK(M(1, 0) == -1.0);
    CHECK(M(1, 1) == 0.0);
  }
  SUBCASE("skew-symmetric and pattern") {
    TempFile f("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n");
    const rmat M = read_matrix_market(f.str()).materialize();
    CHECK(M(0, 1) == -3.0);
    CHECK(M(1, 0) == 3.0);
    TempFile p("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 2\n");
    const rmat Q = read_matrix_market(p.str()).materialize();
    CHECK(Q(0, 1) == 1.0);
    CHECK(Q(0, 0) == 0.0);
  }
  SUBCASE("duplicates accumulate") {
    TempFile f("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 2\n1 1 3\n");
    CHECK(read_matrix_market(f.str()).materialize()(0, 0) == 5.0);
  }
  SUBCASE("malformed input") {
    CHECK(code_of([] { read_matrix_market("/nonexistent/file.mtx"); }) == errc::io);
    for (const char* body : {"", "not a banner\n1 1 1\n1 1 1\n", "%%MatrixMarket matrix array real general\n1 1\n1\n",
                             "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
                             "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n",
                             "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n",
                             "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
                             "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 nan\n"}) {
      TempFile f(body);
      CHECK(code_of([&] { read_matrix_market(f.str()); }) == errc::io);
    }
  }
}

TEST_CASE("vector reader") {
  TempFile a("%%MatrixMarket matrix array real general\n3 1\n1\n2.5\n-3\n");
  const rvec v = read_vector(a.str());
  REQUIRE(v.size() == 3);
  CHECK(v(1) == 2.5);
  TempFile b("1 2\n3\n");
  CHECK(read_vector(b.str()).size() == 3);
  TempFile c("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK(code_of([&] { read_vector(c.str()); }) == errc::io);
  TempFile d("");
  CHECK(code_of([&] { read_vector(d.str()); }) == errc::io);
}

TEST_CASE("dense solve backward error") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> N;
  rmat A(100, 100);
  rvec b(100);
  for (int i = 0; i < 100; ++i) {
    b(i) = N(rng);
    for (int j = 0; j < 100; ++j) A(i, j) = N(rng);
  }
  const rvec x = dense_solve(A, b);
  CHECK((A * x - b).norm() / (A.norm() * x.norm()) < 1e-12);
  const cmat Ac = A.cast<cplx>() - cplx(0.0, 0.5) * cmat::Identity(100, 100);
  const cvec bc = b.cast<cplx>();
  const cvec xc = dense_solve(Ac, bc);
  CHECK((Ac * xc - bc).norm() / (Ac.norm() * xc.norm()) < 1e-12);

  rmat S = rmat::Identity(3, 3);
  S(2, 2) = 0.0;
  CHECK(code_of([&] { dense_solve(S, rvec::Ones(3)); }) == errc::numeric);
  CHECK(code_of([&] { dense_solve(S, rvec::Ones(2)); }) == errc::domain);
}

TEST_CASE("dense eigendecomposition and matrix functions") {
  rmat A(2, 2);
  A << 2, 1, 1, 2;
  const auto e = dense_eig(A);
  CHECK(e.symmetric);
  const auto ev = sorted_real(e.values);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-14));
  cvec b(2);
  b << 1.0, 0.0;
  const cvec f = dense_matfun(A, b, [](cplx z) { return std::exp(z); });
  CHECK(std::abs(f(0) - 0.5 * (std::exp(3.0) + std::exp(1.0))) < 1e-12);
  CHECK(std::abs(f(1) - 0.5 * (std::exp(3.0) - std::exp(1.0))) < 1e-12);
  rmat R(2, 2);
  R << 0, -1, 1, 0;
  const auto r = dense_eig(R, false);
  CHECK_FALSE(r.symmetric);
  CHECK(std::abs(std::abs(r.values(0).imag()) - 1.0) < 1e-14);
}

TEST_CASE("operator and rhs specs") {
  const auto u = make_operator("gen:uniform-diag:50:-1,-0.2,0.3,2");
  CHECK(u.op.size() == 50);
  REQUIRE(u.eigenvalues.has_value());
  CHECK(u.eigenvalues->front() == -1.0);
  const auto p = make_operator("gen:perturbed:40:-1,-0.2,0.3,2:0.01:5");
  CHECK(p.eigenvalues->size() == 40u);
  const auto q = make_operator("gen:perturbed:40:-1,-0.2,0.3,2:0.01:5");
  CHECK(*q.eigenvalues == *p.eigenvalues);
  const auto bvp = make_operator("gen:bvp:30");
  CHECK(bvp.op.size() == 30);
  REQUIRE(bvp.natural_rhs.has_value());

  const cvec ones = make_rhs("gen:ones", u);
  CHECK(ones.size() == 50);
  CHECK((make_rhs("gen:A-times-ones", u) - u.op.apply(ones)).norm() == 0.0);
  CHECK((make_rhs("gen:gaussian:3", u) - make_rhs("gen:gaussian:3", u)).norm() == 0.0);
  CHECK((make_rhs("gen:gaussian:3", u) - make_rhs("gen:gaussian:4", u)).norm() > 0.0);
  CHECK((make_rhs("gen:natural", bvp) - *bvp.natural_rhs).norm() == 0.0);

  CHECK(code_of([&] { make_rhs("gen:natural", u); }) == errc::config);
  CHECK(code_of([&] { make_rhs("gen:bogus", u); }) == errc::config);
  CHECK(code_of([] { make_operator("gen:uniform-diag:x:1,2"); }) == errc::config);
  CHECK(code_of([] { make_operator("gen:nope"); }) == errc::config);
  CHECK(code_of([] { make_operator("gen:bvp:1:2"); }) == errc::config);
  CHECK(code_of([] { make_operator("/nonexistent.mtx"); }) == errc::io);
  TempFile short_rhs("1\n2\n");
  CHECK(code_of([&] { make_rhs(short_rhs.str(), u); }) == errc::io);
}

TEST_CASE("operator plumbing") {
  const LinearOperator d = LinearOperator::diagonal(rvec::LinSpaced(4, 1.0, 4.0));
  cvec x = cvec::Ones(4);
  const cvec y = d.apply(x);
  CHECK(y(3) == cplx(4.0, 0.0));
  cmat X = cmat::Identity(4, 4);
  CHECK((d.apply(X) - d.materialize().cast<cplx>()).norm() == 0.0);
  CHECK(code_of([&] { d.apply(cvec(cvec::Ones(3))); }) == errc::domain);
  CHECK(code_of([] { LinearOperator::dense(rmat::Ones(2, 3)); }) == errc::config);
}
