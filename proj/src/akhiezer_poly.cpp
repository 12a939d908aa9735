#include "akhiezer/akhiezer_poly.hpp"

#include <cmath>
#include <numbers>

#include "akhiezer/error.hpp"

namespace akz {

namespace {

constexpr double pi = std::numbers::pi;
const cplx two_pi_i(0.0, 2.0 * pi);

cplx nudge_real(cplx t) {
  // real points are evaluated as limits from the upper half plane
  if (t.imag() == 0.0) return {t.real(), 1e-15 * std::max(1.0, std::fabs(t.real()))};
  return t;
}

bool on_std_bands(cplx t, const AkhiezerParams& p) {
  if (t.imag() != 0.0) return false;
  const double x = t.real();
  return (x >= -1.0 && x <= p.alpha) || (x >= p.beta && x <= 1.0);
}

cplx pn_std(int n, cplx t, const AkhiezerParams& p) {
  if (n == 0) return 1.0;
  const cplx u = u_of_x(t, p);
  const double r = p.rho;
  const cplx R = p.H(u - r) / p.H(u + r);
  const cplx th = p.Theta(u);
  const cplx plus = std::pow(R, n) * p.Theta(u + 2.0 * n * r) / th;
  const cplx minus = std::pow(R, -n) * p.Theta(u - 2.0 * n * r) / th;
  return 0.5 * pn_constant(n, p) * (plus + minus);
}

cplx pn_by_recurrence(int n, cplx x, const AkhiezerParams& p) {
  cplx pm = 0.0, pc = 1.0;
  double bprev = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto rc = recurrence_coeffs(k, p);
    const cplx pn = ((x - rc.a) * pc - bprev * pm) / rc.b;
    pm = pc;
    pc = pn;
    bprev = rc.b;
  }
  return pc;
}

} // namespace

cplx AkhiezerParams::H(cplx z) const { return theta1(pi * z / (2.0 * modulus.K), modulus.q, theta_cfg); }
cplx AkhiezerParams::Theta(cplx z) const { return theta4(pi * z / (2.0 * modulus.K), modulus.q, theta_cfg); }
cplx AkhiezerParams::dH(cplx z) const {
  const double s = pi / (2.0 * modulus.K);
  return s * theta1_deriv(s * z, modulus.q, theta_cfg);
}
cplx AkhiezerParams::dTheta(cplx z) const {
  const double s = pi / (2.0 * modulus.K);
  return s * theta4_deriv(s * z, modulus.q, theta_cfg);
}

AkhiezerParams build_params(const BandSystem& bands, const ThetaSeriesConfig& cfg) {
  if (bands.size() != 2) fail(errc::config, "closed-form Akhiezer data needs exactly two bands");
  AkhiezerParams p;
  p.theta_cfg = cfg;
  p.c = 0.5 * (bands[1].hi - bands[0].lo);
  p.d = 0.5 * (bands[1].hi + bands[0].lo);
  p.alpha = (bands[0].hi - p.d) / p.c;
  p.beta = (bands[1].lo - p.d) / p.c;
  if (!(-1.0 < p.alpha && p.alpha < p.beta && p.beta < 1.0)) fail(errc::config, "degenerate band geometry");
  const double k = std::sqrt(2.0 * (p.beta - p.alpha) / ((1.0 - p.alpha) * (1.0 + p.beta)));
  p.modulus = EllipticModulus::from_k(k);
  p.rho = incomplete_F_sin(std::sqrt(0.5 * (1.0 - p.alpha)), k).real();
  if (!(p.rho > 0.0 && p.rho < p.modulus.K)) fail(errc::numeric, "rho outside (0,K)");
  // surface truncation failures at construction rather than mid-iteration
  (void)p.Theta(p.rho);
  (void)p.H(cplx(p.modulus.K, p.modulus.Kprime));
  return p;
}

cplx u_of_x(cplx t, const AkhiezerParams& p) {
  if (std::abs(t - p.alpha) < p.guard())
    fail(errc::guard_band, "point lies inside the guard band around the inner endpoint");
  t = nudge_real(t);
  const cplx s = (p.alpha - 1.0) * (1.0 + t) / (2.0 * (p.alpha - t));
  cplx u = incomplete_F_sin(std::sqrt(s), p.modulus.k);
  if (std::abs(p.H(u - p.rho)) > std::abs(p.H(u + p.rho))) u = -u;
  return u;
}

double pn_constant(int n, const AkhiezerParams& p) {
  if (n < 0) fail(errc::domain, "polynomial degree must be non-negative");
  if (n == 0) return 1.0;
  const double r = p.rho;
  return std::sqrt(2.0) * p.Theta(r).real() /
         std::sqrt(p.Theta((2.0 * n - 1.0) * r).real() * p.Theta((2.0 * n + 1.0) * r).real());
}

cplx eval_pn(int n, cplx x, const AkhiezerParams& p) {
  if (n < 0) fail(errc::domain, "polynomial degree must be non-negative");
  const cplx t = p.to_std(x);
  if (std::abs(t - p.alpha) < p.guard()) return pn_by_recurrence(n, x, p);
  return pn_std(n, t, p);
}

RecurrencePair recurrence_coeffs_std(int n, const AkhiezerParams& p) {
  if (n < 0) fail(errc::domain, "recurrence index must be non-negative");
  const double k = p.modulus.k, r = p.rho, al = p.alpha;
  const auto e = jacobi_sn_cn_dn(r, k);
  const double sn = e.sn;
  const double snp = e.cn * e.dn;
  const double snpp = -e.sn * (e.dn * e.dn + k * k * e.cn * e.cn);
  const double f = 1.0 - al * al;
  const double h2 = p.H(2.0 * r).real();
  const double dh2 = p.dH(2.0 * r).real();
  const double dh0 = p.dH(0.0).real();
  auto lth = [&](double z) { return p.dTheta(z).real() / p.Theta(z).real(); };
  auto th = [&](double z) { return p.Theta(z).real(); };

  const double common = -f * (1.0 / (8.0 * sn * sn) + snpp / (8.0 * sn * snp * snp) + dh2 / (h2 * 4.0 * sn * snp));
  const double pref = f / (4.0 * sn * snp) * dh0 / h2;
  RecurrencePair out;
  if (n == 0) {
    out.a = common + f / (2.0 * sn * snp) * lth(r) + al;
    out.b = pref * std::sqrt(2.0 * th(3.0 * r) / th(r));
  } else {
    out.a = common + f / (4.0 * sn * snp) * (lth((2.0 * n + 1.0) * r) - lth((2.0 * n - 1.0) * r)) + al;
    out.b = pref * std::sqrt(th((2.0 * n + 3.0) * r) * th((2.0 * n - 1.0) * r)) / th((2.0 * n + 1.0) * r);
  }
  return out;
}

RecurrencePair recurrence_coeffs(int n, const AkhiezerParams& p) {
  const auto s = recurrence_coeffs_std(n, p);
  return {p.c * s.a + p.d, p.c * s.b};
}

std::vector<RecurrencePair> recurrence_table(int N, const AkhiezerParams& p) {
  std::vector<RecurrencePair> out;
  out.reserve(N + 1);
  for (int n = 0; n <= N; ++n) out.push_back(recurrence_coeffs(n, p));
  return out;
}

cplx cauchy_integral(int n, cplx z, const AkhiezerParams& p) {
  if (n < 0) fail(errc::domain, "polynomial degree must be non-negative");
  const cplx t = p.to_std(z);
  if (on_std_bands(t, p)) fail(errc::domain, "Cauchy integral requested on the bands");
  const cplx u = u_of_x(t, p);
  const double r = p.rho;
  const cplx R = p.H(u - r) / p.H(u + r);
  const cplx tt = nudge_real(t);
  const cplx roots = std::sqrt(tt - p.alpha) / (std::sqrt(tt - 1.0) * std::sqrt(tt + 1.0) * std::sqrt(tt - p.beta));
  const cplx cs = -pn_constant(n, p) / two_pi_i * std::pow(R, n) * p.Theta(u + 2.0 * n * r) / p.Theta(u) * roots;
  return cs / p.c;
}

cplx stieltjes(int n, cplx z, const AkhiezerParams& p) { return two_pi_i * cauchy_integral(n, z, p); }

double akhiezer_weight(double x, const AkhiezerParams& p) {
  const double t = p.to_std(x);
  if (!((t > -1.0 && t < p.alpha) || (t > p.beta && t < 1.0))) return 0.0;
  return std::sqrt(std::fabs(t - p.alpha)) /
         (pi * std::sqrt(1.0 - t) * std::sqrt(t + 1.0) * std::sqrt(std::fabs(t - p.beta))) / p.c;
}

std::vector<cplx> backfill_cauchy(int N, cplx z, const std::vector<RecurrencePair>& coeffs, cplx c_np1,
                                  cplx c_np2) {
  if (N < 0) fail(errc::domain, "backfill size must be non-negative");
  if (coeffs.size() < static_cast<std::size_t>(N) + 2) fail(errc::config, "backfill needs coefficients 0..N+1");
  for (int k = 0; k <= N + 1; ++k)
    if (!(coeffs[k].b > 0.0)) fail(errc::numeric, "non-positive off-diagonal coefficient in backfill");
  std::vector<cplx> C(N + 1);
  const auto& last = coeffs[N + 1];
  C[N] = ((z - last.a) * c_np1 - last.b * c_np2) / coeffs[N].b;
  cplx next = c_np1;
  for (int k = N; k >= 1; --k) {
    C[k - 1] = ((z - coeffs[k].a) * C[k] - coeffs[k].b * next) / coeffs[k - 1].b;
    next = C[k];
  }
  return C;
}

cplx cauchy_row0_residual(cplx z, const std::vector<RecurrencePair>& coeffs, const std::vector<cplx>& C) {
  return z * C[0] - coeffs[0].a * C[0] - coeffs[0].b * C[1] + 1.0 / two_pi_i;
}

std::vector<cplx> cauchy_sequence(int N, cplx z, const AkhiezerParams& p) {
  const auto coeffs = recurrence_table(N + 1, p);
  return backfill_cauchy(N, z, coeffs, cauchy_integral(N + 1, z, p), cauchy_integral(N + 2, z, p));
}

} // namespace akz
