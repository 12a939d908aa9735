#pragma once

#include <optional>
#include <vector>

#include "akhiezer/akhiezer_poly.hpp"
#include "akhiezer/bands.hpp"

namespace akz {

/**
 * @brief Exterior Green's function with pole at infinity for a band system.
 *
 * g'(z) = Q_g(z)/R(z), R(z) = prod_j sqrt(z-a_j) sqrt(z-b_j), with the monic
 * Q_g fixed by the vanishing of its integral over every gap.
 */
class GreensEvaluator {
public:
  enum class Path {
    vertical, ///< real-axis value from the nearest endpoint, then straight up
    straight  ///< from a_1: straight segment, or semicircles over bands for real z
  };

  explicit GreensEvaluator(const BandSystem& bands);

  const BandSystem& bands() const { return bands_; }
  int genus() const { return bands_.genus(); }
  /// h_0..h_{g-1}, Q_g(z) = z^g + sum_k h_k z^k
  const std::vector<double>& q_coeffs() const { return h_; }
  const std::optional<AkhiezerParams>& g1_params() const { return akh_; }

  cplx Q(cplx z) const;
  /// g'(z); real z is read as z + i0.
  cplx dg(cplx z) const;

  /// Re g(z): closed form for g <= 1 (outside the guard band), path quadrature otherwise.
  double re_g(cplx z) const;
  /// Path quadrature for any genus.
  double re_g_path(cplx z, Path path = Path::vertical) const;
  /// As re_g but zero on the bands instead of an error.
  double re_g_ext(cplx z) const;

  /// Integral of Q/R over each gap (should vanish).
  std::vector<double> gap_residuals() const;

private:
  double gap_integral(std::size_t j, int power) const;
  // g'(e + delta) with the factor sqrt(z - e) formed from delta directly
  cplx dg_rel(double e, cplx delta) const;
  double real_axis(double x) const;
  double vertical(cplx z) const;
  double straight(cplx z) const;

  BandSystem bands_;
  std::vector<double> h_;
  std::optional<AkhiezerParams> akh_;
};

GreensEvaluator build_greens(const BandSystem& bands);

double re_g(const GreensEvaluator& ev, cplx z);

/// max_j Re g(lambda_j) - Re g(z), eigenvalues on the bands counting as 0.
double nu(const GreensEvaluator& ev, cplx z, const std::vector<cplx>& eigs);

struct Polyline {
  std::vector<cplx> points;
  bool closed = false;
};

/// Contours e^{Re g} = varrho by marching squares; vertices refined on grid edges.
std::vector<Polyline> level_curve(const GreensEvaluator& ev, double varrho, int resolution = 160);

} // namespace akz
