#include "akhiezer/stieltjes_proc.hpp"

#include <cmath>
#include <numbers>

#include "akhiezer/error.hpp"

namespace akz {

namespace {

constexpr double pi = std::numbers::pi;

// Twice the exponent carried by endpoint e of band j: -1 for 1/sqrt, +1 for sqrt.
int twice_exponent(WeightKind kind, std::size_t j, bool upper, std::size_t nbands) {
  int e;
  if (!upper) e = -1;
  else e = (j + 1 == nbands) ? -1 : 1;
  return kind == WeightKind::akhiezer_like ? e : -e;
}

double sqrt_pow(double d, int twice) {
  switch (twice) {
  case 0: return 1.0;
  case 1: return std::sqrt(d);
  case -1: return 1.0 / std::sqrt(d);
  case 2: return d;
  default: return std::pow(d, 0.5 * twice);
  }
}

std::size_t band_of(const BandSystem& b, double x) {
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b[j].lo <= x && x <= b[j].hi) return j;
  return b.size();
}

} // namespace

double WeightSpec::smoothed(double x, std::size_t j) const {
  double v = 1.0;
  const std::size_t nb = bands.size();
  for (std::size_t i = 0; i < nb; ++i) {
    int ea = twice_exponent(kind, i, false, nb);
    int eb = twice_exponent(kind, i, true, nb);
    if (i == j) {
      ++ea;
      ++eb;
    }
    v *= sqrt_pow(std::fabs(x - bands[i].lo), ea) * sqrt_pow(std::fabs(x - bands[i].hi), eb);
  }
  return v;
}

double WeightSpec::operator()(double x) const {
  const std::size_t j = band_of(bands, x);
  if (j == bands.size() || x == bands[j].lo || x == bands[j].hi) return 0.0;
  return normalization * smoothed(x, j) / std::sqrt((x - bands[j].lo) * (bands[j].hi - x));
}

WeightSpec make_weight(const BandSystem& bands, WeightKind kind) {
  WeightSpec w{bands, kind, 1.0};
  const int M = 4000;
  double m = 0.0;
  for (std::size_t j = 0; j < bands.size(); ++j)
    for (int i = 0; i < M; ++i) {
      const double th = (i + 0.5) * pi / M;
      m += w.smoothed(bands[j].mid() + 0.5 * bands[j].length() * std::cos(th), j) * pi / M;
    }
  if (!(m > 0.0) || !std::isfinite(m)) fail(errc::numeric, "weight mass is not positive");
  w.normalization = 1.0 / m;
  return w;
}

DiscreteMeasure discretize(const WeightSpec& w, int nodes_per_band) {
  if (nodes_per_band < 1) fail(errc::config, "need at least one node per band");
  DiscreteMeasure m;
  const std::size_t nb = w.bands.size();
  m.x.reserve(nb * nodes_per_band);
  m.w.reserve(nb * nodes_per_band);
  double total = 0.0;
  for (std::size_t j = 0; j < nb; ++j) {
    const double mid = w.bands[j].mid(), half = 0.5 * w.bands[j].length();
    for (int i = 0; i < nodes_per_band; ++i) {
      const double th = (i + 0.5) * pi / nodes_per_band;
      const double s = mid + half * std::cos(th);
      const double v = w.smoothed(s, j) * pi / nodes_per_band;
      m.x.push_back(s);
      m.w.push_back(v);
      total += v;
    }
  }
  for (double& v : m.w) v /= total;
  return m;
}

std::vector<RecurrencePair> coeffs_by_stieltjes(const WeightSpec& w, int N, int nodes_per_band) {
  if (N < 0) fail(errc::domain, "coefficient count must be non-negative");
  if (nodes_per_band <= 0) nodes_per_band = 40 * N + 200;
  const auto m = discretize(w, nodes_per_band);
  const std::size_t M = m.x.size();
  if (static_cast<std::size_t>(N) + 1 >= M)
    fail(errc::config, "Stieltjes procedure needs more nodes than coefficients; increase nodes per band");
  std::vector<double> q(M), qm(M, 0.0), r(M);
  for (std::size_t i = 0; i < M; ++i) q[i] = std::sqrt(m.w[i]);
  const double scale = std::max(1.0, 0.5 * (w.bands.right() - w.bands.left()));
  std::vector<RecurrencePair> out;
  out.reserve(N + 1);
  double bprev = 0.0;
  for (int n = 0; n <= N; ++n) {
    double a = 0.0;
    for (std::size_t i = 0; i < M; ++i) a += m.x[i] * q[i] * q[i];
    double nrm = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      r[i] = (m.x[i] - a) * q[i] - bprev * qm[i];
      nrm += r[i] * r[i];
    }
    const double b = std::sqrt(nrm);
    if (!(b > 1e-13 * scale) || !std::isfinite(b))
      fail(errc::numeric, "Stieltjes procedure collapsed at n=" + std::to_string(n) + "; increase nodes per band");
    out.push_back({a, b});
    for (std::size_t i = 0; i < M; ++i) {
      qm[i] = q[i];
      q[i] = r[i] / b;
    }
    bprev = b;
  }
  return out;
}

std::vector<cplx> stieltjes_sequence(const DiscreteMeasure& m, const std::vector<RecurrencePair>& coeffs, int N,
                                     cplx z) {
  if (N > 0 && coeffs.size() < static_cast<std::size_t>(N)) fail(errc::config, "not enough recurrence coefficients");
  std::vector<cplx> S(N + 1, 0.0);
  const std::size_t M = m.x.size();
  for (std::size_t i = 0; i < M; ++i) {
    const cplx kern = m.w[i] / (m.x[i] - z);
    double pm = 0.0, pc = 1.0;
    S[0] += kern;
    for (int k = 1; k <= N; ++k) {
      const double bp = k >= 2 ? coeffs[k - 2].b : 0.0;
      const double pn = ((m.x[i] - coeffs[k - 1].a) * pc - bp * pm) / coeffs[k - 1].b;
      pm = pc;
      pc = pn;
      S[k] += pc * kern;
    }
  }
  return S;
}

cplx stieltjes_by_quadrature(const WeightSpec& w, const std::vector<RecurrencePair>& coeffs, int n, cplx z) {
  if (n < 0) fail(errc::domain, "polynomial degree must be non-negative");
  if (w.bands.distance(z) < 1e-10) fail(errc::domain, "Stieltjes transform requested within 1e-10 of the bands");
  int M = std::max(40 * n + 200, 256);
  auto eval = [&](int nodes, double& scale) {
    const auto m = discretize(w, nodes);
    const auto S = stieltjes_sequence(m, coeffs, n, z);
    scale = 0.0;
    for (std::size_t i = 0; i < m.x.size(); ++i) scale += m.w[i] / std::abs(m.x[i] - z);
    return S[n];
  };
  double scale = 0.0;
  cplx prev = eval(M, scale);
  for (int it = 0; it < 14; ++it) {
    M *= 2;
    const cplx cur = eval(M, scale);
    if (std::abs(cur - prev) <= 1e-13 * std::abs(cur) + 1e-16 * scale) return cur;
    prev = cur;
  }
  fail(errc::numeric, "Stieltjes quadrature did not settle; point too close to the bands");
}

} // namespace akz
