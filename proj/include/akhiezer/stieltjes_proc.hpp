#pragma once

#include <vector>

#include "akhiezer/bands.hpp"

namespace akz {

enum class WeightKind {
  /// prod_{j<=g} sqrt|x-b_j| / (sqrt(b_{g+1}-x) prod_j sqrt|x-a_j|); g=0 is Chebyshev-T
  akhiezer_like,
  /// sqrt(b_{g+1}-x) prod_j sqrt|x-a_j| / prod_{j<=g} sqrt|x-b_j|
  reciprocal_like
};

/**
 * @brief A band weight, normalised to unit mass.
 */
struct WeightSpec {
  BandSystem bands;
  WeightKind kind = WeightKind::akhiezer_like;
  /// 1 / (unnormalised mass); filled by make_weight.
  double normalization = 0.0;

  /// Normalised density at x (zero off the bands).
  double operator()(double x) const;
  /// Unnormalised density times sqrt((x-lo)(hi-x)) on band j; bounded at both ends.
  double smoothed(double x, std::size_t j) const;
};

WeightSpec make_weight(const BandSystem& bands, WeightKind kind);

/**
 * @brief Discrete measure: nodes x_i with positive weights summing to one.
 */
struct DiscreteMeasure {
  std::vector<double> x;
  std::vector<double> w;
};

/// Midpoint rule in theta under s = mid + half cos(theta), per band.
DiscreteMeasure discretize(const WeightSpec& w, int nodes_per_band);

/// a_0..a_N, b_0..b_N by the discretized Stieltjes procedure.
/// nodes_per_band <= 0 selects 40 N + 200.
std::vector<RecurrencePair> coeffs_by_stieltjes(const WeightSpec& w, int N, int nodes_per_band = 0);

/// Stieltjes transform of p_n w at z, refined until two node counts agree.
cplx stieltjes_by_quadrature(const WeightSpec& w, const std::vector<RecurrencePair>& coeffs, int n, cplx z);

/// S_0..S_N on a fixed discrete measure.
std::vector<cplx> stieltjes_sequence(const DiscreteMeasure& m, const std::vector<RecurrencePair>& coeffs, int N,
                                     cplx z);

} // namespace akz
