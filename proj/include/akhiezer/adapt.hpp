#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "akhiezer/bands.hpp"
#include "akhiezer/iterate.hpp"
#include "akhiezer/linops.hpp"

namespace akz {

struct AdaptConfig {
  double gamma_o = 5.0;
  double gamma_i = 0.7;
  int growth_n = 20;
  int growth_k = 10;
  /// bisection stops when the bracket is below bisect_tol * (band length)
  double bisect_tol = 1e-8;
  int bisect_steps = 60;
  int max_rounds = 50;
  /// growth below 1 + eps_growth counts as bounded
  double eps_growth = 0.02;
  /// degree of the power-like map in the Rayleigh variant
  int rayleigh_degree = 50;
  double rayleigh_tol = 1e-12;
  int rayleigh_max_steps = 200;
};

using SourceFactory = std::function<std::unique_ptr<CoeffSource>(const BandSystem&)>;

/// make_coeff_source(bands) with the automatic choice.
SourceFactory default_source_factory();

/// (||p_{n+k}(A) b|| / ||p_n(A) b||)^{1/k} with renormalised carriers.
double growth_rate(const LinearOperator& A, const cvec& b, CoeffSource& src, int n, int k);

struct GrowthEstimate {
  double rate = 0.0;
  int n = 0;
  int k = 0;
  bool retried = false;
};

/// Window [n, n+k]; if [n+k, n+2k] disagrees by more than 10%, one retry with n, k doubled.
GrowthEstimate estimate_growth(const LinearOperator& A, const cvec& b, CoeffSource& src, const AdaptConfig& cfg);

struct AdaptStep {
  int round = 0;
  std::string action;
  std::vector<double> endpoints;
  double rate = 0.0;
};

struct AdaptResult {
  BandSystem bands;
  std::vector<AdaptStep> trace;
  bool converged = false;
  int rayleigh_quotients = 0;
  double final_rate = 0.0;
  std::string message;
};

AdaptResult adapt_bisection(const LinearOperator& A, const cvec& b, const BandSystem& bands0, const AdaptConfig& cfg,
                            const SourceFactory& factory = default_source_factory());

AdaptResult adapt_one_at_a_time(const LinearOperator& A, const cvec& b, const BandSystem& bands0,
                                const AdaptConfig& cfg, const SourceFactory& factory = default_source_factory());

AdaptResult adapt_rayleigh(const LinearOperator& A, const cvec& b, const BandSystem& bands0, const AdaptConfig& cfg,
                           const SourceFactory& factory = default_source_factory());

/// Bands [-b_out, -a] ∪ [a, b_out]; only b_out moves.
AdaptResult symmetric_simple_adapt(const LinearOperator& A, const cvec& b, double a, double b_out,
                                   const AdaptConfig& cfg, const SourceFactory& factory = default_source_factory());

struct RayleighResult {
  double value = 0.0;
  int steps = 0;
  bool converged = false;
  cvec vector; ///< last iterate, unit norm
};

/// y <- p_n(A) y / ||p_n(A) y|| from y = start until the Rayleigh quotient settles.
RayleighResult rayleigh_power(const LinearOperator& A, const cvec& start, CoeffSource& src, const AdaptConfig& cfg);

} // namespace akz
