// Runs the command-line tool as a subprocess; ctest passes the binary path in AKZ_CLI.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int rc = -1;
  std::string out;
};

const fs::path work_dir = [] {
  auto d = fs::temp_directory_path() / ("akz_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}();

const fs::path& workdir() { return work_dir; }

Result run(const std::string& args) {
  const char* cli = std::getenv("AKZ_CLI");
  REQUIRE_MESSAGE(cli, "AKZ_CLI must point at the akhiezer binary");
  const std::string cmd = "cd '" + workdir().string() + "' && '" + cli + "' " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& name) { return json::parse(slurp(name)); }

std::vector<std::string> lines(const std::string& name) {
  std::vector<std::string> out;
  std::ifstream in(workdir() / name);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Cleanup {
  ~Cleanup() { fs::remove_all(workdir()); }
} cleanup;

} // namespace

TEST_CASE("green --rate-at") {
  const auto r = run("green --bands -2,-0.5,0.5,6 --rate-at 0,0");
  CHECK(r.rc == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.864258).epsilon(1e-6));
}

TEST_CASE("green --level writes vertices on the level set") {
  REQUIRE(run("green --bands -2,-0.5,0.5,6 --level 1.5 --out level.csv").rc == 0);
  const auto L = lines("level.csv");
  REQUIRE(L.size() > 20);
  CHECK(L[0].rfind("# akhiezer-cli level csv v1", 0) == 0);
  CHECK(L[1] == "curve,closed,x,y");
  for (std::size_t i = 2; i < L.size(); i += 1 + L.size() / 8) {
    std::string x, y, tmp;
    std::stringstream ss(L[i]);
    std::getline(ss, tmp, ',');
    std::getline(ss, tmp, ',');
    std::getline(ss, x, ',');
    std::getline(ss, y, ',');
    const auto e = run("green --bands -2,-0.5,0.5,6 --eval " + x + "," + y);
    REQUIRE(e.rc == 0);
    CHECK(std::fabs(std::exp(std::stod(e.out)) / 1.5 - 1.0) < 1e-3);
  }
}

TEST_CASE("solve: Chebyshev rate and the two-band reference line") {
  REQUIRE(run("solve --matrix gen:uniform-diag:200:1,3 --bands 1,3 --method chebyshev-modified --out cheb.csv "
              "--summary cheb.json")
              .rc == 0);
  const auto c = load("cheb.json");
  CHECK(c["reference_rate"].get<double>() == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-12));
  CHECK(c["termination"] == "converged");

  const std::string two_band = "solve --matrix gen:uniform-diag:200:-2,-0.5,0.5,6 --rhs gen:A-times-ones "
                           "--bands -2,-0.5,0.5,6 ";
  REQUIRE(run(two_band + "--out two_band.csv --summary two_band.json").rc == 0);
  const auto s = load("two_band.json");
  CHECK(s["fitted_rate"].get<double>() == doctest::Approx(s["reference_rate"].get<double>()).epsilon(0.1));
  const auto L = lines("two_band.csv");
  CHECK(L[0].rfind("# akhiezer-cli solve csv v1", 0) == 0);
  CHECK(L[1] == "iter,residual,rate_ref");

  // deterministic output
  REQUIRE(run(two_band + "--out two_band2.csv --summary two_band2.json").rc == 0);
  CHECK(slurp("two_band.csv") == slurp("two_band2.csv"));
}

TEST_CASE("exit codes and no partial output") {
  CHECK(run("solve --matrix missing.mtx --bands 1,3 --out missing.csv --summary missing.json").rc == 2);
  CHECK_FALSE(fs::exists(workdir() / "missing.csv"));
  CHECK_FALSE(fs::exists(workdir() / "missing.json"));
  CHECK(run("matfun --matrix gen:perturbed:100:-2,-0.5,0.5,6 --bands -2,-0.5,0.5,6 --function exp --quad-nodes 3 "
            "--out q.csv")
            .rc == 2);
  CHECK_FALSE(fs::exists(workdir() / "q.csv"));
  CHECK(run("solve --matrix gen:uniform-diag:20:1,3").rc == 2);
  CHECK(run("nonsense").rc == 2);
  CHECK(run("solve --matrix gen:uniform-diag:200:-2,-0.5,0.5,6 --bands -2,-0.5,0.5,6 --maxit 5 --out mx.csv").rc == 1);
  CHECK(fs::exists(workdir() / "mx.csv"));
}

TEST_CASE("matfun with the dense oracle") {
  REQUIRE(run("matfun --matrix gen:perturbed:200:-2,-0.5,0.5,6:0.01 --bands -2,-0.5,0.5,6 --function exp "
              "--quad-nodes 800 --oracle --out exp.csv --summary exp.json")
              .rc == 0);
  const auto L = lines("exp.csv");
  REQUIRE(L.size() > 23);
  // columns start with iter,error
  const double e20 = std::stod(L[22].substr(L[22].find(',') + 1));
  CHECK(e20 < 1e-10);
}

TEST_CASE("adapt: trace and idempotence") {
  REQUIRE(run("adapt --variant bisection --out adapt.json").rc == 0);
  const auto a = load("adapt.json");
  REQUIRE(a["trace"].size() > 1);
  CHECK(a["trace"][0]["action"] == "initial");
  CHECK(a["converged"] == true);
  std::string bands;
  for (const auto& e : a["bands"]) {
    std::ostringstream os;
    os.precision(17);
    os << e.get<double>();
    bands += (bands.empty() ? "" : ",") + os.str();
  }
  REQUIRE(run("adapt --variant bisection --bands0 " + bands + " --out adapt2.json").rc == 0);
  CHECK(load("adapt2.json")["trace"].size() == 1);
}

TEST_CASE("poly") {
  const auto r = run("poly --bands -2,-0.5,0.5,6 --N 5 --eval 0.3,0.1");
  CHECK(r.rc == 0);
  CHECK(r.out.find("k,a,b,p_re,p_im") != std::string::npos);
}
