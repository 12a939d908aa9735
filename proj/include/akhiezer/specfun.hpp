#pragma once

#include <complex>

namespace akz {

using cplx = std::complex<double>;

/**
 * @brief Modulus k together with K(k), K'(k) = K(sqrt(1-k^2)) and the nome q.
 */
struct EllipticModulus {
  double k = 0.0;
  double K = 0.0;
  double Kprime = 0.0;
  double q = 0.0;

  static EllipticModulus from_k(double k);
};

/**
 * @brief Truncation control for the theta series.
 */
struct ThetaSeriesConfig {
  /// Relative size below which the next term bound ends the sum.
  double tolerance = 1e-17;
  /// Hard cap on the number of terms.
  int max_terms = 64;
};

double complete_K(double k);

/// Carlson's R_F for complex arguments (principal square roots).
cplx carlson_rf(cplx x, cplx y, cplx z);

/// F(phi, k), continued to complex phi through R_F.
cplx incomplete_F(cplx phi, double k);

/// F(arcsin w, k) without forming arcsin: w R_F(1-w^2, 1-k^2 w^2, 1).
cplx incomplete_F_sin(cplx w, double k);

struct SnCnDn {
  double sn;
  double cn;
  double dn;
};

SnCnDn jacobi_sn_cn_dn(double u, double k);

/// sn' = cn dn
double jacobi_sn_d1(double u, double k);
/// sn'' = -sn (dn^2 + k^2 cn^2)
double jacobi_sn_d2(double u, double k);

cplx theta1(cplx z, double q, const ThetaSeriesConfig& cfg = {});
cplx theta4(cplx z, double q, const ThetaSeriesConfig& cfg = {});
cplx theta1_deriv(cplx z, double q, const ThetaSeriesConfig& cfg = {});
cplx theta4_deriv(cplx z, double q, const ThetaSeriesConfig& cfg = {});

} // namespace akz
