// Command-line front end. Talks to the library only through akhiezer.h.

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "akhiezer/akhiezer.h"

using json = nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr const char* kGenHelp = R"(Matrix specs (--matrix):
  <path>                            Matrix Market coordinate file
  gen:uniform-diag:N:a1,b1,...      diagonal, N equispaced points split over the bands by length
  gen:perturbed:N:a1,b1,...[:sigma[:seed]]
                                    Q (D + sigma*noise) Q^T with Q from a seeded Gaussian matrix
                                    (defaults sigma=0.05, seed=1)
  gen:bvp[:n]                       -u'' - 30 e^x u = x on (0,1), preconditioned by -u'' (n=100)
Right-hand sides (--rhs):
  <path>                            Matrix Market array or whitespace-separated numbers
  gen:ones | gen:A-times-ones | gen:gaussian[:seed] | gen:natural (generator's own, e.g. gen:bvp)
Exit codes: 0 success, 1 numerical failure (maxit, breakdown), 2 usage or I/O error.)";

struct Failure {
  int code;
  std::string message;
};

int exit_code(akz_status s) {
  switch (s) {
  case AKZ_OK: return 0;
  case AKZ_ERR_MAXIT:
  case AKZ_ERR_NUMERIC:
  case AKZ_ERR_TRUNCATION:
  case AKZ_ERR_GUARD_BAND: return 1;
  default: return 2;
  }
}

void check(akz_status s) {
  if (s != AKZ_OK) throw Failure{exit_code(s), std::string(akz_status_name(s)) + ": " + akz_last_error()};
}

struct Deleter {
  void operator()(akz_operator* p) const { akz_operator_free(p); }
  void operator()(akz_report* p) const { akz_report_free(p); }
  void operator()(akz_greens* p) const { akz_greens_free(p); }
  void operator()(akz_polylines* p) const { akz_polylines_free(p); }
  void operator()(akz_adapt_result* p) const { akz_adapt_free(p); }
};
template <class T>
using handle = std::unique_ptr<T, Deleter>;

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{2, std::string("cannot parse ") + what + ": '" + s + "'"};
    }
  }
  if (out.empty()) throw Failure{2, std::string("empty ") + what};
  return out;
}

cplx parse_complex(const std::string& s, const char* what) {
  const auto v = parse_list(s, what);
  if (v.size() > 2) throw Failure{2, std::string(what) + " takes re or re,im"};
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

std::vector<double> parse_bands(const std::string& s) {
  auto e = parse_list(s, "bands");
  if (e.size() % 2 != 0) throw Failure{2, "bands need an even number of endpoints"};
  return e;
}

// write everything at the end so failures leave no partial files
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Failure{2, "cannot open output file " + path};
  f << text;
  if (!f) throw Failure{2, "write failed: " + path};
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

struct Problem {
  handle<akz_operator> op;
  std::vector<double> b;
  int n = 0;
};

Problem load(const std::string& matrix, const std::string& rhs) {
  Problem p;
  akz_operator* raw = nullptr;
  check(akz_operator_create(matrix.c_str(), &raw));
  p.op.reset(raw);
  p.n = akz_operator_size(raw);
  p.b.assign(2 * p.n, 0.0);
  check(akz_operator_rhs(raw, rhs.c_str(), p.b.data()));
  return p;
}

std::vector<double> eigenvalues(const Problem& p) {
  std::vector<double> ev(2 * p.n);
  check(akz_operator_eigenvalues(p.op.get(), ev.data()));
  return ev;
}

const std::map<std::string, akz_coeffs> kCoeffs{
    {"auto", AKZ_COEFFS_AUTO}, {"closed-form", AKZ_COEFFS_CLOSED_FORM}, {"stieltjes", AKZ_COEFFS_STIELTJES}};
const std::map<std::string, akz_weight> kWeights{{"akhiezer", AKZ_WEIGHT_AKHIEZER},
                                                 {"reciprocal", AKZ_WEIGHT_RECIPROCAL}};

const char* termination_name(akz_termination t) {
  switch (t) {
  case AKZ_TERM_CONVERGED: return "converged";
  case AKZ_TERM_MAXIT: return "maxit";
  case AKZ_TERM_BREAKDOWN: return "breakdown";
  }
  return "unknown";
}

struct History {
  std::vector<int> iter;
  std::vector<double> value;
};

History exact_history(const akz_report* r) {
  History h;
  for (int i = 0; i < akz_report_history_size(r); ++i) {
    int it = 0, exact = 0;
    double v = 0.0;
    check(akz_report_history(r, i, &it, &v, &exact, nullptr));
    if (exact) {
      h.iter.push_back(it);
      h.value.push_back(v);
    }
  }
  return h;
}

std::string history_csv(const char* command, const char* value_column, const History& h, double rate_ref) {
  std::ostringstream o;
  o << "# akhiezer-cli " << command << " csv v1: iter," << value_column << ",rate_ref\n";
  o << "iter," << value_column << ",rate_ref\n";
  for (std::size_t i = 0; i < h.iter.size(); ++i)
    o << h.iter[i] << ',' << fmt(h.value[i]) << ',' << (std::isfinite(rate_ref) ? fmt(rate_ref) : "nan") << '\n';
  return o.str();
}

std::pair<int, int> parse_fit(const std::string& s) {
  if (s.empty()) return {-1, -1};
  const auto v = parse_list(s, "fit window");
  if (v.size() != 2) throw Failure{2, "--fit takes lo,hi"};
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

// ---- solve ----

struct SolveArgs {
  std::string matrix, rhs = "gen:A-times-ones", bands, shift = "0,0", coeffs = "auto", weight = "akhiezer";
  std::string method = "akhiezer", out, summary, solution, fit;
  double tol = 1e-10;
  int maxit = 2000;
};

int run_solve(const SolveArgs& a) {
  auto p = load(a.matrix, a.rhs);
  const auto bands = parse_bands(a.bands);
  const cplx z = parse_complex(a.shift, "shift");
  akz_solve_options opt = akz_solve_options_default();
  opt.tol = a.tol;
  opt.maxit = a.maxit;
  std::vector<double> x(2 * p.n);
  akz_report* raw = nullptr;
  akz_status st;
  if (a.method == "akhiezer") {
    st = akz_solve(p.op.get(), p.b.data(), bands.data(), static_cast<int>(bands.size()), z.real(), z.imag(),
                   kCoeffs.at(a.coeffs), kWeights.at(a.weight), &opt, x.data(), &raw);
  } else {
    if (bands.size() != 2) throw Failure{2, "Chebyshev methods take a single interval in --bands"};
    if (z != 0.0) throw Failure{2, "Chebyshev methods do not take a shift"};
    st = akz_chebyshev_solve(p.op.get(), p.b.data(), bands[0], bands[1],
                             a.method == "chebyshev-classical" ? AKZ_CHEB_CLASSICAL : AKZ_CHEB_MODIFIED, &opt,
                             x.data(), &raw);
  }
  handle<akz_report> rep(raw);
  if (!rep) check(st);

  const auto h = exact_history(rep.get());
  const double ref = akz_report_reference_rate(rep.get());
  const auto [lo, hi] = parse_fit(a.fit);
  json s{{"command", "solve"},
         {"method", a.method},
         {"matrix", akz_operator_description(p.op.get())},
         {"n", p.n},
         {"bands", bands},
         {"shift", {z.real(), z.imag()}},
         {"coeffs", a.coeffs},
         {"weight", a.weight},
         {"tol", a.tol},
         {"iterations", akz_report_iterations(rep.get())},
         {"termination", termination_name(akz_report_termination(rep.get()))},
         {"final_residual", num(h.value.empty() ? NAN : h.value.back())},
         {"fitted_rate", num(akz_report_fitted_rate(rep.get(), lo, hi))},
         {"reference_rate", num(ref)},
         {"wall_time", akz_report_wall_time(rep.get())},
         {"message", akz_report_message(rep.get())}};

  std::string sol;
  if (!a.solution.empty()) {
    std::ostringstream o;
    o << "# akhiezer-cli solution v1: re im\n";
    for (int i = 0; i < p.n; ++i) o << fmt(x[2 * i]) << ' ' << fmt(x[2 * i + 1]) << '\n';
    sol = o.str();
  }
  emit(a.out, history_csv("solve", "residual", h, ref));
  if (!a.solution.empty()) emit(a.solution, sol);
  if (!a.summary.empty()) emit(a.summary, s.dump(2) + "\n");
  else if (!a.out.empty() && a.out != "-") std::cout << s.dump(2) << "\n";
  else std::cerr << s.dump(2) << "\n";
  return exit_code(st);
}

// ---- matfun ----

struct MatfunArgs {
  std::string matrix, rhs = "gen:ones", bands, coeffs = "auto", weight = "akhiezer", function = "exp";
  std::string out, summary, fit;
  double tol = 1e-10, inflate = 1.15;
  int maxit = 2000, quad_nodes = 400;
  bool oracle = false;
};

struct PoleList {
  std::vector<double> poles, residues;
};

PoleList read_poles(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Failure{2, "cannot open pole-residue file " + path};
  PoleList pl;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::istringstream ls(line);
    double v[4];
    for (double& x : v)
      if (!(ls >> x)) throw Failure{2, path + ":" + std::to_string(lineno) + ": expected 'pole_re pole_im res_re res_im'"};
    pl.poles.insert(pl.poles.end(), {v[0], v[1]});
    pl.residues.insert(pl.residues.end(), {v[2], v[3]});
  }
  return pl;
}

int run_matfun(const MatfunArgs& a) {
  const std::string pr_prefix = "pole-residue:";
  const bool pole_residue = a.function.rfind(pr_prefix, 0) == 0;
  std::map<std::string, akz_function> fns{{"exp", AKZ_FN_EXP}, {"tanh", AKZ_FN_TANH}, {"exp-over-x", AKZ_FN_EXP_OVER_X}};
  if (!pole_residue && !fns.count(a.function))
    throw Failure{2, "--function must be exp, tanh, exp-over-x or pole-residue:<path>"};
  PoleList pl;
  if (pole_residue) pl = read_poles(a.function.substr(pr_prefix.size()));

  auto p = load(a.matrix, a.rhs);
  const auto bands = parse_bands(a.bands);
  const int nb = static_cast<int>(bands.size());

  std::vector<double> exact;
  double ref = std::numeric_limits<double>::quiet_NaN();
  if (a.oracle) {
    exact.assign(2 * p.n, 0.0);
    if (pole_residue) {
      std::vector<double> y(2 * p.n);
      for (std::size_t i = 0; 2 * i < pl.poles.size(); ++i) {
        check(akz_operator_dense_solve(p.op.get(), pl.poles[2 * i], pl.poles[2 * i + 1], p.b.data(), y.data()));
        const cplx r(pl.residues[2 * i], pl.residues[2 * i + 1]);
        for (int j = 0; j < p.n; ++j) {
          const cplx v = r * cplx(y[2 * j], y[2 * j + 1]);
          exact[2 * j] += v.real();
          exact[2 * j + 1] += v.imag();
        }
      }
    } else {
      check(akz_matfun_dense(p.op.get(), p.b.data(), fns.at(a.function), exact.data()));
    }
    // e^{nu} at the singularity nearest the bands in Green's-function terms
    std::vector<cplx> sing;
    if (pole_residue)
      for (std::size_t i = 0; 2 * i < pl.poles.size(); ++i) sing.emplace_back(pl.poles[2 * i], pl.poles[2 * i + 1]);
    else if (a.function == "tanh")
      sing = {cplx(0.0, M_PI / 2)};
    else if (a.function == "exp-over-x")
      sing = {0.0};
    if (!sing.empty()) {
      const auto ev = eigenvalues(p);
      akz_greens* g = nullptr;
      check(akz_greens_create(bands.data(), nb, &g));
      handle<akz_greens> gh(g);
      double best = -std::numeric_limits<double>::infinity();
      for (const cplx s : sing) {
        double v = 0.0;
        check(akz_greens_nu(g, s.real(), s.imag(), ev.data(), p.n, &v));
        best = std::max(best, v);
      }
      ref = std::exp(best);
    }
  }

  akz_matfun_options opt = akz_matfun_options_default();
  opt.tol = a.tol;
  opt.k_max = a.maxit;
  opt.quad_nodes = a.quad_nodes;
  opt.inflate = a.inflate;
  opt.exact = a.oracle ? exact.data() : nullptr;
  std::vector<double> y(2 * p.n);
  akz_report* raw = nullptr;
  const akz_status st =
      pole_residue ? akz_matfun_pole_residue(p.op.get(), p.b.data(), bands.data(), nb, pl.poles.data(),
                                             pl.residues.data(), static_cast<int>(pl.poles.size() / 2),
                                             kCoeffs.at(a.coeffs), kWeights.at(a.weight), &opt, y.data(), &raw)
                   : akz_matfun(p.op.get(), p.b.data(), bands.data(), nb, fns.at(a.function), kCoeffs.at(a.coeffs),
                                kWeights.at(a.weight), &opt, y.data(), &raw);
  handle<akz_report> rep(raw);
  if (!rep) check(st);

  History h;
  for (int i = 0; i < akz_report_history_size(rep.get()); ++i) {
    int it = 0;
    double v = 0.0;
    check(akz_report_history(rep.get(), i, &it, &v, nullptr, nullptr));
    h.iter.push_back(it);
    h.value.push_back(v);
  }
  const auto [lo, hi] = parse_fit(a.fit);
  json s{{"command", "matfun"},
         {"function", a.function},
         {"matrix", akz_operator_description(p.op.get())},
         {"n", p.n},
         {"bands", bands},
         {"quad_nodes", a.quad_nodes},
         {"inflate", a.inflate},
         {"iterations", akz_report_iterations(rep.get())},
         {"termination", termination_name(akz_report_termination(rep.get()))},
         {"oracle", a.oracle},
         {"final_error", a.oracle && !h.value.empty() ? num(h.value.back()) : json(nullptr)},
         {"fitted_rate", a.oracle ? num(akz_report_fitted_rate(rep.get(), lo, hi)) : json(nullptr)},
         {"reference_rate", num(ref)},
         {"wall_time", akz_report_wall_time(rep.get())},
         {"message", akz_report_message(rep.get())}};
  emit(a.out, history_csv("matfun", a.oracle ? "error" : "increment", h, ref));
  if (!a.summary.empty()) emit(a.summary, s.dump(2) + "\n");
  else if (!a.out.empty() && a.out != "-") std::cout << s.dump(2) << "\n";
  else std::cerr << s.dump(2) << "\n";
  return exit_code(st);
}

// ---- adapt ----

struct AdaptArgs {
  std::string matrix = "gen:bvp", rhs = "gen:natural", variant = "rayleigh", bands0 = "-2,-0.5,0.5,1", out;
  akz_adapt_config cfg = akz_adapt_config_default();
};

int run_adapt(const AdaptArgs& a) {
  auto p = load(a.matrix, a.rhs);
  const auto b0 = parse_bands(a.bands0);
  const std::map<std::string, akz_adapt_variant> variants{{"bisection", AKZ_ADAPT_BISECTION},
                                                          {"one-at-a-time", AKZ_ADAPT_ONE_AT_A_TIME},
                                                          {"rayleigh", AKZ_ADAPT_RAYLEIGH},
                                                          {"symmetric", AKZ_ADAPT_SYMMETRIC}};
  akz_adapt_result* raw = nullptr;
  check(akz_adapt(p.op.get(), p.b.data(), b0.data(), static_cast<int>(b0.size()), variants.at(a.variant), &a.cfg,
                  &raw));
  handle<akz_adapt_result> r(raw);
  const int ne = akz_adapt_endpoint_count(raw);
  std::vector<double> e(ne);
  check(akz_adapt_endpoints(raw, e.data()));
  json trace = json::array();
  for (int i = 0; i < akz_adapt_trace_size(raw); ++i) {
    int round = 0;
    const char* action = nullptr;
    std::vector<double> te(ne);
    double rate = 0.0;
    check(akz_adapt_trace_step(raw, i, &round, &action, te.data(), &rate));
    trace.push_back({{"round", round}, {"action", action}, {"endpoints", te}, {"rate", num(rate)}});
  }
  double rate0 = std::numeric_limits<double>::quiet_NaN();
  {
    akz_greens* g = nullptr;
    check(akz_greens_create(e.data(), ne, &g));
    handle<akz_greens> gh(g);
    check(akz_greens_rate_at(g, 0.0, 0.0, &rate0));
  }
  const bool converged = akz_adapt_converged(raw) != 0;
  json s{{"command", "adapt"},
         {"variant", a.variant},
         {"matrix", akz_operator_description(p.op.get())},
         {"bands0", b0},
         {"bands", e},
         {"converged", converged},
         {"final_growth_rate", num(akz_adapt_final_rate(raw))},
         {"rate_at_0", num(rate0)},
         {"rayleigh_quotients", akz_adapt_rayleigh_quotients(raw)},
         {"message", akz_adapt_message(raw)},
         {"trace", trace}};
  emit(a.out, s.dump(2) + "\n");
  return converged ? 0 : 1;
}

// ---- green ----

struct GreenArgs {
  std::string bands, eval, rate_at, out;
  double level = 0.0;
  int resolution = 160;
  bool json_out = false;
};

int run_green(const GreenArgs& a, bool level_given) {
  const auto bands = parse_bands(a.bands);
  akz_greens* raw = nullptr;
  check(akz_greens_create(bands.data(), static_cast<int>(bands.size()), &raw));
  handle<akz_greens> g(raw);
  std::ostringstream o;
  if (!a.rate_at.empty()) {
    const cplx z = parse_complex(a.rate_at, "point");
    double v = 0.0;
    check(akz_greens_rate_at(raw, z.real(), z.imag(), &v));
    if (a.json_out) o << json{{"bands", bands}, {"z", {z.real(), z.imag()}}, {"rate", v}}.dump() << "\n";
    else o << fmt(v) << "\n";
  } else if (!a.eval.empty()) {
    const cplx z = parse_complex(a.eval, "point");
    double v = 0.0, d[2] = {0.0, 0.0};
    check(akz_greens_re_g(raw, z.real(), z.imag(), &v));
    const bool on_bands = z.imag() == 0.0 && v == 0.0;
    if (!on_bands) check(akz_greens_dg(raw, z.real(), z.imag(), d));
    if (a.json_out)
      o << json{{"bands", bands}, {"z", {z.real(), z.imag()}}, {"re_g", v}, {"dg", {d[0], d[1]}}}.dump() << "\n";
    else o << fmt(v) << "\n";
  } else if (level_given) {
    akz_polylines* pl = nullptr;
    check(akz_greens_level(raw, a.level, a.resolution, &pl));
    handle<akz_polylines> ph(pl);
    o << "# akhiezer-cli level csv v1: curve,closed,x,y (e^{Re g} = " << fmt(a.level) << ")\n";
    o << "curve,closed,x,y\n";
    for (int i = 0; i < akz_polylines_count(pl); ++i) {
      std::vector<double> pts(2 * akz_polylines_size(pl, i));
      check(akz_polylines_points(pl, i, pts.data()));
      for (std::size_t j = 0; 2 * j < pts.size(); ++j)
        o << i << ',' << akz_polylines_closed(pl, i) << ',' << fmt(pts[2 * j]) << ',' << fmt(pts[2 * j + 1]) << '\n';
    }
  } else {
    throw Failure{2, "green needs one of --eval, --level, --rate-at"};
  }
  emit(a.out, o.str());
  return 0;
}

// ---- poly ----

struct PolyArgs {
  std::string bands, coeffs = "auto", weight = "akhiezer", eval, cauchy, out;
  int N = 20;
};

int run_poly(const PolyArgs& a) {
  const auto bands = parse_bands(a.bands);
  const int nb = static_cast<int>(bands.size());
  if (a.N < 0) throw Failure{2, "--N must be non-negative"};
  std::vector<double> av(a.N + 1), bv(a.N + 1);
  check(akz_recurrence(bands.data(), nb, kCoeffs.at(a.coeffs), kWeights.at(a.weight), a.N, av.data(), bv.data()));
  std::vector<double> pv, cv;
  if (!a.eval.empty()) {
    const cplx x = parse_complex(a.eval, "point");
    for (int k = 0; k <= a.N; ++k) {
      double v[2];
      check(akz_eval_pn(bands.data(), nb, k, x.real(), x.imag(), v));
      pv.insert(pv.end(), {v[0], v[1]});
    }
  }
  if (!a.cauchy.empty()) {
    const cplx z = parse_complex(a.cauchy, "point");
    cv.resize(2 * (a.N + 1));
    check(akz_cauchy(bands.data(), nb, kCoeffs.at(a.coeffs), kWeights.at(a.weight), z.real(), z.imag(), a.N,
                     cv.data()));
  }
  std::ostringstream o;
  std::string cols = "k,a,b";
  if (!pv.empty()) cols += ",p_re,p_im";
  if (!cv.empty()) cols += ",cauchy_re,cauchy_im";
  o << "# akhiezer-cli poly csv v1: " << cols << "\n" << cols << "\n";
  for (int k = 0; k <= a.N; ++k) {
    o << k << ',' << fmt(av[k]) << ',' << fmt(bv[k]);
    if (!pv.empty()) o << ',' << fmt(pv[2 * k]) << ',' << fmt(pv[2 * k + 1]);
    if (!cv.empty()) o << ',' << fmt(cv[2 * k]) << ',' << fmt(cv[2 * k + 1]);
    o << '\n';
  }
  emit(a.out, o.str());
  return 0;
}

std::vector<std::string> keys(const std::map<std::string, akz_coeffs>& m) {
  std::vector<std::string> k;
  for (const auto& [s, _] : m) k.push_back(s);
  return k;
}

std::vector<std::string> keys(const std::map<std::string, akz_weight>& m) {
  std::vector<std::string> k;
  for (const auto& [s, _] : m) k.push_back(s);
  return k;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Akhiezer iteration: shifted solves, matrix functions and band adaptation for spectra on intervals"};
  app.footer(kGenHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", akz_version());

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve (A - shift I) x = b; CSV iter,residual,rate_ref plus JSON summary");
  solve->footer(kGenHelp);
  solve->add_option("--matrix", sa.matrix, "matrix path or gen: spec")->required();
  solve->add_option("--rhs", sa.rhs, "right-hand side path or gen: spec")->capture_default_str();
  solve->add_option("--bands", sa.bands, "a1,b1[,a2,b2,...]")->required();
  solve->add_option("--shift", sa.shift, "re,im")->capture_default_str();
  solve->add_option("--tol", sa.tol, "relative residual tolerance")->capture_default_str();
  solve->add_option("--maxit", sa.maxit, "iteration limit")->capture_default_str();
  solve->add_option("--coeffs", sa.coeffs, "coefficient source")->check(CLI::IsMember(keys(kCoeffs)))->capture_default_str();
  solve->add_option("--weight", sa.weight, "orthogonality weight")->check(CLI::IsMember(keys(kWeights)))->capture_default_str();
  solve->add_option("--method", sa.method, "iteration")
      ->check(CLI::IsMember({"akhiezer", "chebyshev-modified", "chebyshev-classical"}))
      ->capture_default_str();
  solve->add_option("--out", sa.out, "CSV path (stdout when absent)");
  solve->add_option("--summary", sa.summary, "JSON summary path (stdout when --out is a file, else stderr)");
  solve->add_option("--solution", sa.solution, "write the solution vector here");
  solve->add_option("--fit", sa.fit, "iteration window lo,hi for the fitted rate (default middle third)");

  MatfunArgs ma;
  auto* matfun = app.add_subcommand("matfun", "f(A) b by contour quadrature; CSV iter,error|increment,rate_ref");
  matfun->footer(kGenHelp);
  matfun->add_option("--matrix", ma.matrix, "matrix path or gen: spec")->required();
  matfun->add_option("--rhs", ma.rhs, "right-hand side path or gen: spec")->capture_default_str();
  matfun->add_option("--bands", ma.bands, "a1,b1[,a2,b2,...]")->required();
  matfun->add_option("--function", ma.function, "exp | tanh | exp-over-x | pole-residue:<path>")->capture_default_str();
  matfun->add_option("--quad-nodes", ma.quad_nodes, "total trapezoid nodes (at least 2 per band)")->capture_default_str();
  matfun->add_option("--inflate", ma.inflate, "circle radius over half band length")->capture_default_str();
  matfun->add_option("--tol", ma.tol, "stopping tolerance")->capture_default_str();
  matfun->add_option("--maxit", ma.maxit, "expansion length limit")->capture_default_str();
  matfun->add_option("--coeffs", ma.coeffs, "coefficient source")->check(CLI::IsMember(keys(kCoeffs)))->capture_default_str();
  matfun->add_option("--weight", ma.weight, "orthogonality weight")->check(CLI::IsMember(keys(kWeights)))->capture_default_str();
  matfun->add_flag("--oracle", ma.oracle, "record errors against a dense eigendecomposition");
  matfun->add_option("--out", ma.out, "CSV path (stdout when absent)");
  matfun->add_option("--summary", ma.summary, "JSON summary path");
  matfun->add_option("--fit", ma.fit, "iteration window lo,hi for the fitted rate");

  AdaptArgs aa;
  auto* adapt = app.add_subcommand("adapt", "adapt a two-band system until p_n(A) b stops growing; JSON with trace");
  adapt->footer(kGenHelp);
  adapt->add_option("--matrix", aa.matrix, "matrix path or gen: spec")->capture_default_str();
  adapt->add_option("--rhs", aa.rhs, "right-hand side path or gen: spec")->capture_default_str();
  adapt->add_option("--variant", aa.variant, "adaptation strategy")
      ->check(CLI::IsMember({"bisection", "one-at-a-time", "rayleigh", "symmetric"}))
      ->capture_default_str();
  adapt->add_option("--bands0", aa.bands0, "initial a1,b1,a2,b2 straddling 0")->capture_default_str();
  adapt->add_option("--gamma-o", aa.cfg.gamma_o, "outward bracket factor")->capture_default_str();
  adapt->add_option("--gamma-i", aa.cfg.gamma_i, "inward bracket factor")->capture_default_str();
  adapt->add_option("--eps", aa.cfg.eps_growth, "growth below 1+eps counts as bounded")->capture_default_str();
  adapt->add_option("--growth-n", aa.cfg.growth_n, "growth window start")->capture_default_str();
  adapt->add_option("--growth-k", aa.cfg.growth_k, "growth window length")->capture_default_str();
  adapt->add_option("--max-rounds", aa.cfg.max_rounds, "round limit")->capture_default_str();
  adapt->add_option("--rayleigh-degree", aa.cfg.rayleigh_degree, "degree of the power-like map")->capture_default_str();
  adapt->add_option("--rayleigh-max-steps", aa.cfg.rayleigh_max_steps, "power steps per quotient")->capture_default_str();
  adapt->add_option("--out", aa.out, "JSON path (stdout when absent)");

  GreenArgs ga;
  auto* green = app.add_subcommand("green", "exterior Green's function queries");
  green->add_option("--bands", ga.bands, "a1,b1[,a2,b2,...]")->required();
  auto* o_eval = green->add_option("--eval", ga.eval, "Re g at re,im");
  auto* o_level = green->add_option("--level", ga.level, "polylines of e^{Re g} = rho (rho > 1)");
  auto* o_rate = green->add_option("--rate-at", ga.rate_at, "e^{-Re g} at re,im");
  o_eval->excludes(o_level)->excludes(o_rate);
  o_level->excludes(o_rate);
  green->add_option("--resolution", ga.resolution, "grid cells per side for --level")->capture_default_str();
  green->add_flag("--json", ga.json_out, "JSON instead of a bare number");
  green->add_option("--out", ga.out, "output path (stdout when absent)");

  PolyArgs pa;
  auto* poly = app.add_subcommand("poly", "recurrence coefficients, p_n values and Cauchy integrals");
  poly->add_option("--bands", pa.bands, "a1,b1[,a2,b2,...]")->required();
  poly->add_option("--N", pa.N, "highest index")->capture_default_str();
  poly->add_option("--coeffs", pa.coeffs, "coefficient source")->check(CLI::IsMember(keys(kCoeffs)))->capture_default_str();
  poly->add_option("--weight", pa.weight, "orthogonality weight")->check(CLI::IsMember(keys(kWeights)))->capture_default_str();
  poly->add_option("--eval", pa.eval, "p_0..p_N at re,im (two bands, closed form)");
  poly->add_option("--cauchy", pa.cauchy, "Cauchy integrals C_0..C_N at re,im");
  poly->add_option("--out", pa.out, "CSV path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*matfun) return run_matfun(ma);
    if (*adapt) return run_adapt(aa);
    if (*green) return run_green(ga, o_level->count() > 0);
    if (*poly) return run_poly(pa);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
