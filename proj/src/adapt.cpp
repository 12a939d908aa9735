#include "akhiezer/adapt.hpp"

#include <algorithm>
#include <cmath>

#include "akhiezer/error.hpp"
#include "akhiezer/greens.hpp"

namespace akz {

namespace {

// p_0(A)b .. p_N(A)b with unit-norm carriers; logn[j] = log ||p_j(A) b|| - log ||b||
struct Carrier {
  std::vector<double> logn;
  cvec last;
};

Carrier run_carriers(const LinearOperator& A, const cvec& b, CoeffSource& src, int N) {
  const double bn = b.norm();
  if (!(bn > 0.0)) fail(errc::domain, "growth needs a nonzero vector");
  Carrier c;
  c.logn.assign(N + 1, 0.0);
  cvec y = b / bn, ym = cvec::Zero(b.size());
  for (int j = 0; j < N; ++j) {
    const auto cj = src.coeff(j);
    const double bp = j > 0 ? src.coeff(j - 1).b : 0.0;
    cvec yn = (A.apply(y) - cj.a * y - bp * ym) / cj.b;
    const double s = yn.norm();
    if (!(s > 0.0) || !std::isfinite(s)) fail(errc::numeric, "polynomial carrier vanished or overflowed");
    c.logn[j + 1] = c.logn[j] + std::log(s);
    ym = y / s;
    y = yn / s;
  }
  c.last = std::move(y);
  return c;
}

std::vector<double> endpoints_of(const BandSystem& b) { return b.endpoints(); }

void require_two_bands(const BandSystem& b) {
  if (b.size() != 2) fail(errc::config, "band adaptation works on two bands");
  if (!(b[0].hi < 0.0 && 0.0 < b[1].lo)) fail(errc::config, "initial bands must straddle the origin in their gap");
}

// outward-looking bracket for endpoint j (0: a1, 1: b1, 2: a2, 3: b2) and its fallback factor
struct Bracket {
  double lo, hi, fallback;
};

Bracket bracket_for(const std::vector<double>& e, int j, const AdaptConfig& cfg) {
  switch (j) {
  case 0: return {cfg.gamma_o * e[0], e[0], cfg.gamma_o};
  case 1: return {e[1], cfg.gamma_i * e[1], cfg.gamma_i};
  case 2: return {cfg.gamma_i * e[2], e[2], cfg.gamma_i};
  default: return {e[3], cfg.gamma_o * e[3], cfg.gamma_o};
  }
}

// root of e^{Re g(x)} - r in [lo, hi]; false when the ends do not bracket a sign change
bool bisect_level(const GreensEvaluator& ev, double r, double lo, double hi, double tol, int steps, double& root) {
  auto f = [&](double x) { return std::exp(ev.re_g_ext(x)) - r; };
  double flo = f(lo), fhi = f(hi);
  if (std::signbit(flo) == std::signbit(fhi)) return false;
  for (int i = 0; i < steps && hi - lo > tol; ++i) {
    const double m = 0.5 * (lo + hi);
    const double fm = f(m);
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  root = 0.5 * (lo + hi);
  return true;
}

double move_endpoint(const BandSystem& bands, int j, double r, const AdaptConfig& cfg, std::string& how) {
  const auto e = endpoints_of(bands);
  const auto br = bracket_for(e, j, cfg);
  const auto ev = build_greens(bands);
  const double len = bands[j / 2].length();
  double root = 0.0;
  if (bisect_level(ev, r, br.lo, br.hi, cfg.bisect_tol * len, cfg.bisect_steps, root)) {
    how = "bisection";
    return root;
  }
  how = "fallback";
  return br.fallback * e[j];
}

double rate_for(const LinearOperator& A, const cvec& b, const BandSystem& bands, const AdaptConfig& cfg,
                const SourceFactory& factory) {
  auto src = factory(bands);
  return estimate_growth(A, b, *src, cfg).rate;
}

// lam lies strictly outside the bands e on endpoint j's side (in the gap, nearer to j, for b1/a2)
bool beyond(const std::vector<double>& e, int j, double lam) {
  const double tol = 1e-9 * (e[3] - e[0]);
  switch (j) {
  case 0: return lam < e[0] - tol;
  case 3: return lam > e[3] + tol;
  case 1: return lam > e[1] + tol && lam < 0.5 * (e[1] + e[2]);
  default: return lam < e[2] - tol && lam >= 0.5 * (e[1] + e[2]);
  }
}

const char* endpoint_name(int j) {
  static const char* names[] = {"a1", "b1", "a2", "b2"};
  return names[j];
}

} // namespace

SourceFactory default_source_factory() {
  return [](const BandSystem& b) { return make_coeff_source(b); };
}

double growth_rate(const LinearOperator& A, const cvec& b, CoeffSource& src, int n, int k) {
  if (n < 1 || k < 1) fail(errc::config, "growth window needs n, k >= 1");
  const auto c = run_carriers(A, b, src, n + k);
  return std::exp((c.logn[n + k] - c.logn[n]) / k);
}

GrowthEstimate estimate_growth(const LinearOperator& A, const cvec& b, CoeffSource& src, const AdaptConfig& cfg) {
  const int n = cfg.growth_n, k = cfg.growth_k;
  if (n < 1 || k < 1) fail(errc::config, "growth window needs n, k >= 1");
  const auto c = run_carriers(A, b, src, n + 2 * k);
  const double r1 = std::exp((c.logn[n + k] - c.logn[n]) / k);
  const double r2 = std::exp((c.logn[n + 2 * k] - c.logn[n + k]) / k);
  if (std::fabs(r1 - r2) <= 0.1 * std::max(r1, r2)) return {r1, n, k, false};
  return {growth_rate(A, b, src, 2 * n, 2 * k), 2 * n, 2 * k, true};
}

RayleighResult rayleigh_power(const LinearOperator& A, const cvec& start, CoeffSource& src, const AdaptConfig& cfg) {
  RayleighResult out;
  cvec y = start / start.norm();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int s = 1; s <= cfg.rayleigh_max_steps; ++s) {
    y = run_carriers(A, y, src, cfg.rayleigh_degree).last;
    const cvec Ay = A.apply(y);
    const double q = (y.dot(Ay)).real() / y.squaredNorm();
    out.value = q;
    out.steps = s;
    if (std::fabs(q - prev) < cfg.rayleigh_tol * std::fabs(q)) {
      out.converged = true;
      break;
    }
    prev = q;
  }
  out.vector = std::move(y);
  return out;
}

AdaptResult adapt_bisection(const LinearOperator& A, const cvec& b, const BandSystem& bands0, const AdaptConfig& cfg,
                            const SourceFactory& factory) {
  require_two_bands(bands0);
  AdaptResult res;
  res.bands = bands0;
  double r = rate_for(A, b, res.bands, cfg, factory);
  res.trace.push_back({0, "initial", res.bands.endpoints(), r});
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (r < 1.0 + cfg.eps_growth) {
      res.converged = true;
      break;
    }
    std::vector<double> e(4);
    std::string actions;
    for (int j = 0; j < 4; ++j) {
      std::string how;
      e[j] = move_endpoint(res.bands, j, r, cfg, how);
      actions += std::string(j ? " " : "") + endpoint_name(j) + ":" + how;
    }
    res.bands = BandSystem::from_endpoints(e);
    r = rate_for(A, b, res.bands, cfg, factory);
    res.trace.push_back({round, actions, e, r});
  }
  if (!res.converged && r < 1.0 + cfg.eps_growth) res.converged = true;
  res.final_rate = r;
  if (!res.converged) fail(errc::maxit, "band adaptation did not stop growing within max_rounds");
  return res;
}

AdaptResult adapt_one_at_a_time(const LinearOperator& A, const cvec& b, const BandSystem& bands0,
                                const AdaptConfig& cfg, const SourceFactory& factory) {
  require_two_bands(bands0);
  AdaptResult res;
  res.bands = bands0;
  double r = rate_for(A, b, res.bands, cfg, factory);
  res.trace.push_back({0, "initial", res.bands.endpoints(), r});
  int round = 1;
  for (; round <= cfg.max_rounds && r >= 1.0 + cfg.eps_growth; ++round) {
    bool moved = false;
    for (int j = 0; j < 4 && r >= 1.0 + cfg.eps_growth; ++j) {
      std::string how;
      auto e = res.bands.endpoints();
      e[j] = move_endpoint(res.bands, j, r, cfg, how);
      BandSystem trial;
      try {
        trial = BandSystem::from_endpoints(e);
      } catch (const error&) {
        continue;
      }
      const double rn = rate_for(A, b, trial, cfg, factory);
      const bool accept = rn < r;
      res.trace.push_back({round, std::string(endpoint_name(j)) + ":" + how + (accept ? ":accepted" : ":reverted"), e, rn});
      if (accept) {
        res.bands = trial;
        r = rn;
        moved = true;
      }
    }
    if (!moved) {
      res.message = "no endpoint move lowered the growth rate";
      break;
    }
  }
  res.final_rate = r;
  res.converged = r < 1.0 + cfg.eps_growth;
  if (!res.converged && round > cfg.max_rounds) fail(errc::maxit, "one-at-a-time adaptation exceeded max_rounds");
  return res;
}

AdaptResult adapt_rayleigh(const LinearOperator& A, const cvec& b, const BandSystem& bands0, const AdaptConfig& cfg,
                           const SourceFactory& factory) {
  require_two_bands(bands0);
  AdaptResult res;
  res.bands = bands0;
  std::vector<bool> pinned(4, false);

  int last_steps = 0;
  bool stagnated = false;
  // Rayleigh quotient for endpoint j (nearest one when j < 0); a map that hits the step cap
  // is flagged and its last quotient used.
  auto quotient = [&](const BandSystem& bands, int& j) {
    auto src = factory(bands);
    const auto rq = rayleigh_power(A, b, *src, cfg);
    ++res.rayleigh_quotients;
    last_steps = rq.steps;
    if (j < 0) {
      const auto e = bands.endpoints();
      j = 0;
      for (int i = 1; i < 4; ++i)
        if (std::fabs(e[i] - rq.value) < std::fabs(e[j] - rq.value)) j = i;
    }
    if (!rq.converged) {
      stagnated = true;
      res.message = std::string("Rayleigh quotient for ") + endpoint_name(j) + " stagnated after " +
                    std::to_string(rq.steps) + " steps";
    }
    return rq.value;
  };
  auto tag = [&](int j, const char* what) {
    return std::string(endpoint_name(j)) + ":" + what + "(" + std::to_string(last_steps) + " steps)";
  };

  // phase 1: move the endpoint nearest to the dominant offender onto it
  double r = rate_for(A, b, res.bands, cfg, factory);
  res.trace.push_back({0, "initial", res.bands.endpoints(), r});
  int round = 0;
  while (r >= 1.0 + cfg.eps_growth) {
    if (++round > cfg.max_rounds) fail(errc::maxit, "Rayleigh adaptation exceeded max_rounds");
    int j = -1;
    const double lam = quotient(res.bands, j);
    auto e = res.bands.endpoints();
    e[j] = lam;
    pinned[j] = true;
    res.bands = BandSystem::from_endpoints(e);
    r = rate_for(A, b, res.bands, cfg, factory);
    res.trace.push_back({round, tag(j, "rayleigh"), e, r});
  }

  // phase 2: once anything moved, pull each free endpoint inward and pin it to the eigenvalue that appears
  const bool moved = std::any_of(pinned.begin(), pinned.end(), [](bool p) { return p; });
  for (int j = 0; moved && j < 4; ++j) {
    if (pinned[j]) continue;
    const auto base = res.bands.endpoints();
    const double len = base[2 * (j / 2) + 1] - base[2 * (j / 2)];
    // smallest inward pull that exposes growth: few eigenvalues outside, fast power map
    for (double frac = 1e-4; frac < 0.95; frac *= 2.0) {
      auto e = base;
      e[j] += (j % 2 == 0 ? 1.0 : -1.0) * frac * len;
      const auto probe = BandSystem::from_endpoints(e);
      const double rp = rate_for(A, b, probe, cfg, factory);
      if (rp < 1.0 + cfg.eps_growth) continue;
      int jj = j;
      const bool was_stagnated = stagnated;
      const std::string was_message = res.message;
      const double lam = quotient(probe, jj);
      // With a weak pull the growth of p_n at an endpoint where the weight vanishes can beat the
      // exposed eigenvalue; a quotient that is not beyond endpoint j of the probe means pull further.
      if (!beyond(e, j, lam)) {
        stagnated = was_stagnated;
        res.message = was_message;
        continue;
      }
      e = base;
      e[j] = lam;
      res.bands = BandSystem::from_endpoints(e);
      pinned[j] = true;
      res.trace.push_back({++round, tag(j, stagnated ? "probe:stagnated" : "probe"), e, rp});
      break;
    }
  }
  res.final_rate = rate_for(A, b, res.bands, cfg, factory);
  res.converged = !stagnated && res.final_rate < 1.0 + cfg.eps_growth;
  return res;
}

AdaptResult symmetric_simple_adapt(const LinearOperator& A, const cvec& b, double a, double b_out,
                                   const AdaptConfig& cfg, const SourceFactory& factory) {
  if (!(0.0 < a && a < b_out)) fail(errc::config, "symmetric bands need 0 < a < b");
  AdaptResult res;
  double B = b_out;
  auto bands_for = [&](double outer) { return BandSystem::from_endpoints({-outer, -a, a, outer}); };
  res.bands = bands_for(B);
  double r = rate_for(A, b, res.bands, cfg, factory);
  res.trace.push_back({0, "initial", res.bands.endpoints(), r});
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (r < 1.0 + cfg.eps_growth) {
      res.converged = true;
      break;
    }
    const auto ev = build_greens(res.bands);
    const double tol = cfg.bisect_tol * (B - a);
    double right = 0.0, left = 0.0;
    const bool okr = bisect_level(ev, r, B, cfg.gamma_o * B, tol, cfg.bisect_steps, right);
    const bool okl = bisect_level(ev, r, -cfg.gamma_o * B, -B, tol, cfg.bisect_steps, left);
    double next = cfg.gamma_o * B;
    if (okr || okl) next = std::max(okr ? right : B, okl ? -left : B);
    B = next;
    res.bands = bands_for(B);
    r = rate_for(A, b, res.bands, cfg, factory);
    res.trace.push_back({round, (okr || okl) ? "outer:bisection" : "outer:fallback", res.bands.endpoints(), r});
  }
  if (!res.converged && r < 1.0 + cfg.eps_growth) res.converged = true;
  res.final_rate = r;
  if (!res.converged) fail(errc::maxit, "symmetric adaptation did not stop growing within max_rounds");
  return res;
}

} // namespace akz
