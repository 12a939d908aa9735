#pragma once

#include <vector>

#include "akhiezer/bands.hpp"
#include "akhiezer/specfun.hpp"

namespace akz {

/**
 * @brief Closed-form data for the two-band Akhiezer weight.
 *
 * Standard coordinates t live on [-1,alpha] U [beta,1]; original
 * coordinates are x = c t + d.
 */
struct AkhiezerParams {
  double c = 1.0;
  double d = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  EllipticModulus modulus;
  double rho = 0.0;
  ThetaSeriesConfig theta_cfg;

  cplx to_std(cplx x) const { return (x - d) / c; }
  double to_std(double x) const { return (x - d) / c; }
  double guard() const { return 1e-6 * (beta - alpha); }

  // H(z) = theta1(pi z / 2K), Theta(z) = theta4(pi z / 2K)
  cplx H(cplx z) const;
  cplx Theta(cplx z) const;
  cplx dH(cplx z) const;
  cplx dTheta(cplx z) const;
};

AkhiezerParams build_params(const BandSystem& bands, const ThetaSeriesConfig& cfg = {});

/// u(t) in standard coordinates, on the sheet where |H(u-rho)/H(u+rho)| <= 1.
cplx u_of_x(cplx t, const AkhiezerParams& p);

/// Normalising constant of p_n (1 for n = 0).
double pn_constant(int n, const AkhiezerParams& p);

/// Orthonormal p_n at x in original coordinates.
cplx eval_pn(int n, cplx x, const AkhiezerParams& p);

RecurrencePair recurrence_coeffs_std(int n, const AkhiezerParams& p);
RecurrencePair recurrence_coeffs(int n, const AkhiezerParams& p);
std::vector<RecurrencePair> recurrence_table(int N, const AkhiezerParams& p);

/// Cauchy integral of p_n w at z (original coordinates).
cplx cauchy_integral(int n, cplx z, const AkhiezerParams& p);
/// 2 pi i times the Cauchy integral.
cplx stieltjes(int n, cplx z, const AkhiezerParams& p);

/// Normalised weight density in original coordinates (zero off the bands).
double akhiezer_weight(double x, const AkhiezerParams& p);

/// Backward solution of the truncated tridiagonal system for C_0..C_N,
/// seeded with C_{N+1}, C_{N+2}. coeffs must hold indices 0..N+1.
std::vector<cplx> backfill_cauchy(int N, cplx z, const std::vector<RecurrencePair>& coeffs, cplx c_np1,
                                  cplx c_np2);

/// Residual of the first row, z C_0 - a_0 C_0 - b_0 C_1 + 1/(2 pi i).
cplx cauchy_row0_residual(cplx z, const std::vector<RecurrencePair>& coeffs, const std::vector<cplx>& C);

/// C_0..C_N at z by backfill from the closed form at N+1, N+2.
std::vector<cplx> cauchy_sequence(int N, cplx z, const AkhiezerParams& p);

} // namespace akz
