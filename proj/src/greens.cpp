#include "akhiezer/greens.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include "akhiezer/error.hpp"

namespace akz {

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
double integrate(F f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 15>::integrate(f, a, b, 20, 1e-13, &err);
}

// +0 imaginary part so that principal roots take their upper-half-plane limits
cplx upper(cplx z) { return z.imag() == 0.0 ? cplx(z.real(), 0.0) : z; }

} // namespace

GreensEvaluator::GreensEvaluator(const BandSystem& bands) : bands_(bands) {
  const int g = bands_.genus();
  if (g == 1) akh_ = build_params(bands_);
  if (g == 0) return;
  Eigen::MatrixXd M(g, g);
  Eigen::VectorXd rhs(g);
  for (int j = 0; j < g; ++j) {
    for (int k = 0; k < g; ++k) M(j, k) = gap_integral(j, k);
    rhs(j) = -gap_integral(j, g);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) fail(errc::numeric, "singular gap-condition system");
  const Eigen::VectorXd sol = lu.solve(rhs);
  h_.assign(sol.data(), sol.data() + g);
}

double GreensEvaluator::gap_integral(std::size_t j, int power) const {
  // x^p / R(x) over (b_j, a_{j+1}); the two nearby roots are absorbed by
  // x = mid + half cos(theta), leaving an analytic periodic integrand.
  const double lo = bands_[j].hi, hi = bands_[j + 1].lo;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const int M = 2000;
  double s = 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = mid + half * std::cos((i + 0.5) * pi / M);
    cplx rest(0.0, 1.0); // sqrt(x-lo) sqrt(x-hi) = i sqrt((x-lo)(hi-x))
    for (std::size_t i2 = 0; i2 < bands_.size(); ++i2) {
      if (i2 != j) rest *= std::sqrt(cplx(x - bands_[i2].hi, 0.0));
      if (i2 != j + 1) rest *= std::sqrt(cplx(x - bands_[i2].lo, 0.0));
    }
    s += (std::pow(x, power) / rest).real();
  }
  return s * pi / M;
}

std::vector<double> GreensEvaluator::gap_residuals() const {
  std::vector<double> r;
  for (int j = 0; j < genus(); ++j) {
    double v = gap_integral(j, genus());
    for (int k = 0; k < genus(); ++k) v += h_[k] * gap_integral(j, k);
    r.push_back(v);
  }
  return r;
}

cplx GreensEvaluator::Q(cplx z) const {
  cplx q = 1.0;
  for (int k = genus() - 1; k >= 0; --k) q = q * z + h_[k];
  return q;
}

cplx GreensEvaluator::dg(cplx z) const {
  z = upper(z);
  cplx R = 1.0;
  for (const auto& b : bands_.bands()) R *= std::sqrt(z - b.lo) * std::sqrt(z - b.hi);
  return Q(z) / R;
}

cplx GreensEvaluator::dg_rel(double e, cplx delta) const {
  delta = upper(delta);
  const cplx z = e + delta;
  cplx R = 1.0;
  for (const auto& b : bands_.bands()) {
    R *= (b.lo == e) ? std::sqrt(delta) : std::sqrt(upper(z - b.lo));
    R *= (b.hi == e) ? std::sqrt(delta) : std::sqrt(upper(z - b.hi));
  }
  return Q(z) / R;
}

double GreensEvaluator::real_axis(double x) const {
  if (bands_.contains(x)) return 0.0;
  // integrate from the nearest endpoint on the same side, x = e + s t^2
  double e;
  if (x < bands_.left()) e = bands_.left();
  else if (x > bands_.right()) e = bands_.right();
  else {
    std::size_t j = 0;
    while (!(bands_[j].hi < x && x < bands_[j + 1].lo)) ++j;
    const double lo = bands_[j].hi, hi = bands_[j + 1].lo;
    e = (x - lo <= hi - x) ? lo : hi;
  }
  const double s = x > e ? 1.0 : -1.0;
  const double T = std::sqrt(std::fabs(x - e));
  return integrate([&](double t) { return (dg_rel(e, s * t * t) * (2.0 * s * t)).real(); }, 0.0, T);
}

double GreensEvaluator::vertical(cplx z) const {
  const double base = real_axis(z.real());
  const double y = z.imag();
  if (y == 0.0) return base;
  const double T = std::sqrt(y);
  const double up = integrate(
      [&](double t) { return (dg_rel(z.real(), cplx(0.0, t * t)) * cplx(0.0, 2.0 * t)).real(); }, 0.0, T);
  return base + up;
}

double GreensEvaluator::straight(cplx z) const {
  const double a1 = bands_.left();
  if (z.imag() != 0.0) {
    const cplx dz = z - a1;
    return integrate([&](double t) { return (dg_rel(a1, dz * (t * t)) * (2.0 * t) * dz).real(); }, 0.0, 1.0);
  }
  const double x = z.real();
  if (x <= a1) return real_axis(x);
  double acc = 0.0;
  auto semicircle = [&](const Band& b) {
    // zeta = m + r e^{i phi}, phi from pi down to 0; u = t^2 measured from each end
    const double r = 0.5 * b.length();
    const double T = std::sqrt(0.5 * pi);
    auto chord = [](double u) { return 2.0 * std::sin(0.5 * u) * std::polar(1.0, 0.5 * (pi - u)); }; // 1 - e^{-iu}
    const double left = integrate(
        [&](double t) {
          const double u = t * t;
          const cplx dzeta = cplx(0.0, r) * std::polar(1.0, pi - u);
          return -(dg_rel(b.lo, r * chord(u)) * dzeta).real() * 2.0 * t;
        },
        0.0, T);
    const double right = integrate(
        [&](double t) {
          const double u = t * t;
          const cplx dzeta = cplx(0.0, r) * std::polar(1.0, u);
          return -(dg_rel(b.hi, -r * std::conj(chord(u))) * dzeta).real() * 2.0 * t;
        },
        0.0, T);
    return left + right;
  };
  auto segment = [&](double lo, double hi, bool singular_hi) {
    // real-axis integral of g' from lo to hi (lo is an endpoint)
    const double m = singular_hi ? 0.5 * (lo + hi) : hi;
    double v = integrate([&](double t) { return dg_rel(lo, t * t).real() * 2.0 * t; }, 0.0, std::sqrt(m - lo));
    if (singular_hi)
      v += integrate([&](double t) { return dg_rel(hi, -t * t).real() * 2.0 * t; }, 0.0, std::sqrt(hi - m));
    return v;
  };
  for (std::size_t k = 0; k < bands_.size(); ++k) {
    const Band& b = bands_[k];
    if (x <= b.hi) {
      if (x >= b.lo) return 0.0; // on the band
      break;
    }
    acc += semicircle(b);
    const double next = (k + 1 < bands_.size()) ? bands_[k + 1].lo : std::numeric_limits<double>::infinity();
    if (x < next) return acc + segment(b.hi, x, false);
    acc += segment(b.hi, next, true);
  }
  return acc;
}

double GreensEvaluator::re_g_path(cplx z, Path path) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(errc::domain, "re_g: non-finite point");
  if (z.imag() < 0.0) z = std::conj(z);
  return path == Path::vertical ? vertical(z) : straight(z);
}

double GreensEvaluator::re_g(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(errc::domain, "re_g: non-finite point");
  if (bands_.contains(z)) {
    for (const auto& b : bands_.bands())
      if (z.real() == b.lo || z.real() == b.hi) return 0.0;
    fail(errc::domain, "re_g evaluated inside a band");
  }
  if (genus() == 0) {
    const Band& b = bands_[0];
    const cplx w = (upper(z) - b.mid()) / (0.5 * b.length());
    return std::log(std::abs(w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0)));
  }
  if (genus() == 1) {
    const auto& p = *akh_;
    const cplx t = p.to_std(z);
    if (std::abs(t - p.alpha) >= 10.0 * p.guard()) {
      const cplx u = u_of_x(t, p);
      return std::log(std::abs(p.H(u + p.rho) / p.H(u - p.rho)));
    }
  }
  return re_g_path(z, Path::vertical);
}

double GreensEvaluator::re_g_ext(cplx z) const {
  if (bands_.contains(z)) return 0.0;
  return re_g(z);
}

GreensEvaluator build_greens(const BandSystem& bands) { return GreensEvaluator(bands); }

double re_g(const GreensEvaluator& ev, cplx z) { return ev.re_g(z); }

double nu(const GreensEvaluator& ev, cplx z, const std::vector<cplx>& eigs) {
  double mx = 0.0;
  for (const cplx& l : eigs) mx = std::max(mx, ev.re_g_ext(l));
  return mx - ev.re_g(z);
}

std::vector<Polyline> level_curve(const GreensEvaluator& ev, double varrho, int resolution) {
  if (!(varrho > 1.0)) fail(errc::domain, "level_curve: varrho must exceed 1");
  if (resolution < 8) fail(errc::config, "level_curve: resolution must be at least 8");
  const double level = std::log(varrho);
  const BandSystem& B = ev.bands();
  // the hull's Bernstein ellipse at the same level encloses the curve
  const double m = 0.5 * (B.left() + B.right()), h = 0.5 * (B.right() - B.left());
  const double A = 1.05 * h * 0.5 * (varrho + 1.0 / varrho) + 1e-9 * h;
  const double Bh = 1.05 * h * 0.5 * (varrho - 1.0 / varrho) + 1e-9 * h;

  const int nx = resolution;
  const int half = resolution / 2;
  const int ny = 2 * half;
  std::vector<double> xs(nx + 1), ys(ny + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = m - A + 2.0 * A * i / nx;
  for (int j = 0; j <= ny; ++j) {
    const double s = double(j - half) / half;
    ys[j] = Bh * s * std::fabs(s); // rows cluster towards the real axis
  }
  auto F = [&](cplx z) { return ev.re_g_ext(z) - level; };
  std::vector<double> val((nx + 1) * (ny + 1));
  auto at = [&](int i, int j) -> double& { return val[j * (nx + 1) + i]; };
  for (int j = half; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      at(i, j) = F(cplx(xs[i], ys[j]));
      at(i, ny - j) = at(i, j);
    }

  // edge ids: 2*(j*(nx+1)+i) horizontal (i,j)->(i+1,j); +1 vertical (i,j)->(i,j+1)
  std::unordered_map<long, cplx> vertex;
  auto edge_point = [&](long id) {
    auto it = vertex.find(id);
    if (it != vertex.end()) return it->second;
    const long base = id / 2;
    const int i = int(base % (nx + 1)), j = int(base / (nx + 1));
    const bool vert = id % 2;
    const cplx p0(xs[i], ys[j]);
    const cplx p1 = vert ? cplx(xs[i], ys[j + 1]) : cplx(xs[i + 1], ys[j]);
    double f0 = at(i, j);
    double s0 = 0.0, s1 = 1.0;
    cplx p = p0;
    for (int it2 = 0; it2 < 60; ++it2) {
      const double sm = 0.5 * (s0 + s1);
      p = p0 + sm * (p1 - p0);
      const double fm = F(p);
      if (std::fabs(std::expm1(fm)) < 1e-6) break;
      if ((fm > 0.0) == (f0 > 0.0)) {
        s0 = sm;
        f0 = fm;
      } else {
        s1 = sm;
      }
    }
    vertex.emplace(id, p);
    return p;
  };

  std::multimap<long, long> adj;
  auto add = [&](long e1, long e2) {
    adj.emplace(e1, e2);
    adj.emplace(e2, e1);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const long bottom = 2L * (j * (nx + 1) + i);
      const long top = 2L * ((j + 1) * (nx + 1) + i);
      const long left = 2L * (j * (nx + 1) + i) + 1;
      const long right = 2L * (j * (nx + 1) + i + 1) + 1;
      const int c = (at(i, j) > 0) | (at(i + 1, j) > 0) << 1 | (at(i + 1, j + 1) > 0) << 2 | (at(i, j + 1) > 0) << 3;
      switch (c) {
      case 0: case 15: break;
      case 1: case 14: add(left, bottom); break;
      case 2: case 13: add(bottom, right); break;
      case 3: case 12: add(left, right); break;
      case 4: case 11: add(right, top); break;
      case 6: case 9: add(bottom, top); break;
      case 7: case 8: add(left, top); break;
      case 5: case 10: {
        const double centre = F(cplx(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])));
        const bool centre_pos = centre > 0.0;
        if ((c == 5) == centre_pos) {
          add(left, top);
          add(bottom, right);
        } else {
          add(left, bottom);
          add(right, top);
        }
        break;
      }
      }
    }

  std::vector<Polyline> out;
  std::map<long, int> used;
  for (const auto& kv : adj) used[kv.first] = 0;
  auto degree = [&](long e) { return int(adj.count(e)); };
  auto walk = [&](long start) {
    Polyline pl;
    long prev = -1, cur = start;
    while (true) {
      pl.points.push_back(edge_point(cur));
      used[cur] = 1;
      long next = -1;
      auto range = adj.equal_range(cur);
      for (auto it = range.first; it != range.second; ++it)
        if (it->second != prev && !used[it->second]) {
          next = it->second;
          break;
        }
      if (next < 0) {
        for (auto it = range.first; it != range.second; ++it)
          if (it->second == start && prev != start && pl.points.size() > 2) pl.closed = true;
        break;
      }
      prev = cur;
      cur = next;
    }
    if (pl.closed) pl.points.push_back(pl.points.front());
    return pl;
  };
  // open chains first (ends on the grid boundary), then loops
  for (const auto& kv : used)
    if (!kv.second && degree(kv.first) == 1) out.push_back(walk(kv.first));
  for (const auto& kv : used)
    if (!used[kv.first]) out.push_back(walk(kv.first));
  return out;
}

} // namespace akz
