#include "akhiezer/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "akhiezer/error.hpp"

namespace akz {

namespace {

constexpr double pi = std::numbers::pi;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_modulus(double k, const char* who) {
  if (!std::isfinite(k) || k < 0.0 || k >= 1.0)
    fail(errc::domain, std::string(who) + ": modulus must lie in [0,1), got " + std::to_string(k));
}

// q^{e} for real exponent e, via the log of the nome
double nome_pow(double logq, double e) { return std::exp(logq * e); }

enum class which { t1, t4, t1d, t4d };

cplx theta_series(cplx z, double q, const ThetaSeriesConfig& cfg, which kind) {
  if (!(q > 0.0 && q < 1.0)) fail(errc::domain, "theta: nome must lie in (0,1)");
  if (!finite(z)) fail(errc::domain, "theta: non-finite argument");
  if (cfg.max_terms < 8 || !(cfg.tolerance > 0.0)) fail(errc::config, "theta: invalid series configuration");

  // theta1 and its derivative flip sign under z -> z + pi; theta4 is pi-periodic.
  const double m = std::round(z.real() / pi);
  z -= m * pi;
  const bool odd_shift = std::fmod(std::fabs(m), 2.0) == 1.0;
  const double sign = (odd_shift && (kind == which::t1 || kind == which::t1d)) ? -1.0 : 1.0;

  const double logq = std::log(q);
  const double y = std::fabs(z.imag());
  cplx sum = (kind == which::t4) ? cplx(1.0) : cplx(0.0);
  double scale = (kind == which::t4) ? 1.0 : 0.0;
  const int first = (kind == which::t4 || kind == which::t4d) ? 1 : 0;

  for (int j = first; j < first + cfg.max_terms; ++j) {
    double expo, freq;
    if (kind == which::t1 || kind == which::t1d) {
      expo = (j + 0.5) * (j + 0.5);
      freq = 2.0 * j + 1.0;
    } else {
      expo = double(j) * j;
      freq = 2.0 * j;
    }
    double bound = 2.0 * nome_pow(logq, expo) * std::exp(freq * y);
    if (kind == which::t1d || kind == which::t4d) bound *= freq;
    if (j > first && bound < cfg.tolerance * std::max(std::abs(sum), scale))
      return sign * sum;
    const double c = 2.0 * ((j % 2) ? -1.0 : 1.0) * nome_pow(logq, expo);
    switch (kind) {
    case which::t1: sum += c * std::sin(freq * z); break;
    case which::t4: sum += c * std::cos(freq * z); break;
    case which::t1d: sum += c * freq * std::cos(freq * z); break;
    case which::t4d: sum -= c * freq * std::sin(freq * z); break;
    }
    scale += bound;
  }
  fail(errc::truncation, "theta series did not converge within " + std::to_string(cfg.max_terms) +
                             " terms (nome too close to 1 or |Im z| too large)");
}

} // namespace

double complete_K(double k) {
  check_modulus(k, "complete_K");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 64 && std::fabs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return pi / (a + b);
}

EllipticModulus EllipticModulus::from_k(double k) {
  if (!(k > 0.0 && k < 1.0)) fail(errc::domain, "EllipticModulus: k must lie in (0,1)");
  EllipticModulus m;
  m.k = k;
  m.K = complete_K(k);
  m.Kprime = complete_K(std::sqrt((1.0 - k) * (1.0 + k)));
  m.q = std::exp(-pi * m.Kprime / m.K);
  return m;
}

cplx carlson_rf(cplx x, cplx y, cplx z) {
  if (!finite(x) || !finite(y) || !finite(z)) fail(errc::domain, "carlson_rf: non-finite argument");
  const cplx a0 = (x + y + z) / 3.0;
  // (3 eps)^(-1/6) with eps = 1e-16
  const double qbound = 383.0 * std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  cplx a = a0, xm = x, ym = y, zm = z;
  double f = 1.0;
  for (int m = 0; m < 100 && f * qbound >= std::abs(a); ++m) {
    const cplx sx = std::sqrt(xm), sy = std::sqrt(ym), sz = std::sqrt(zm);
    const cplx lam = sx * sy + sx * sz + sy * sz;
    xm = 0.25 * (xm + lam);
    ym = 0.25 * (ym + lam);
    zm = 0.25 * (zm + lam);
    a = 0.25 * (a + lam);
    f *= 0.25;
  }
  const cplx X = (a0 - x) * f / a;
  const cplx Y = (a0 - y) * f / a;
  const cplx Z = -X - Y;
  const cplx e2 = X * Y - Z * Z;
  const cplx e3 = X * Y * Z;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(a);
}

cplx incomplete_F_sin(cplx w, double k) {
  if (!finite(w)) fail(errc::domain, "incomplete_F: non-finite argument");
  const cplx w2 = w * w;
  return w * carlson_rf(1.0 - w2, 1.0 - k * k * w2, 1.0);
}

cplx incomplete_F(cplx phi, double k) {
  if (!finite(phi)) fail(errc::domain, "incomplete_F: non-finite argument");
  if (!(k > 0.0 && k < 1.0)) fail(errc::domain, "incomplete_F: modulus must lie in (0,1)");
  const double m = std::round(phi.real() / pi);
  const cplx p = phi - m * pi;
  const cplx s = std::sin(p), c = std::cos(p);
  cplx f = s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0);
  if (m != 0.0) f += 2.0 * m * complete_K(k);
  return f;
}

SnCnDn jacobi_sn_cn_dn(double u, double k) {
  if (!std::isfinite(u)) fail(errc::domain, "jacobi_sn_cn_dn: non-finite argument");
  check_modulus(k, "jacobi_sn_cn_dn");
  double a[32], c[32];
  a[0] = 1.0;
  c[0] = k;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  int n = 0;
  while (std::fabs(c[n]) > 1e-17 && n < 30) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  return {sn, cn, std::sqrt(1.0 - k * k * sn * sn)};
}

double jacobi_sn_d1(double u, double k) {
  const auto s = jacobi_sn_cn_dn(u, k);
  return s.cn * s.dn;
}

double jacobi_sn_d2(double u, double k) {
  const auto s = jacobi_sn_cn_dn(u, k);
  return -s.sn * (s.dn * s.dn + k * k * s.cn * s.cn);
}

cplx theta1(cplx z, double q, const ThetaSeriesConfig& cfg) { return theta_series(z, q, cfg, which::t1); }
cplx theta4(cplx z, double q, const ThetaSeriesConfig& cfg) { return theta_series(z, q, cfg, which::t4); }
cplx theta1_deriv(cplx z, double q, const ThetaSeriesConfig& cfg) { return theta_series(z, q, cfg, which::t1d); }
cplx theta4_deriv(cplx z, double q, const ThetaSeriesConfig& cfg) { return theta_series(z, q, cfg, which::t4d); }

} // namespace akz
