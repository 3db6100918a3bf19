#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "krein/errors.hpp"
#include "oracles.hpp"

using namespace krein;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("krein_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run krein_run(const fs::path& dir, const std::string& config, std::vector<std::string> args) {
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << config;
  std::vector<std::string> full{"--config", cfg.string(), "--out", dir.string()};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(full, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(std::stod(cell));
  return out;
}

const char* kComplexFd = R"("model": {"kind": "fd1d", "n": 128},
  "potential": {"kind": "smooth", "polynomial": [[0.6, -0.2], [0, 0.5]]})";

}  // namespace

TEST_CASE("config parsing rejects unknown keys in every section") {
  CHECK_NOTHROW(cli::parse_cli_config("{}"));
  for (const char* text :
       {R"({"modle": {}})", R"({"model": {"kind": "fd1d", "size": 3}})", R"({"potential": {"kind": "zero", "v": 1}})",
        R"({"boundary_operator": {"kind": "scalar", "value": 1, "beta": 2}})", R"({"region": {"re": [0, 1], "im": [0, 1], "x": 1}})",
        R"({"output": {"format": "csv", "digits": 3}})", R"({"rhs": {"kind": "ones", "seed": 1}})",
        R"({"suite": {"sed": 1}})", R"({"boundary_operator": {"kind": "modes", "entries": [{"k": 0, "j": 0, "w": 1}]}})"}) {
    INFO(std::string(text));
    CHECK_THROWS_AS(cli::parse_cli_config(text), Error);
  }
}

TEST_CASE("config parsing validates values") {
  const cli::CliConfig c = cli::parse_cli_config(R"({"model": {"kind": "disk_interior", "n": 32, "k_max": 2},
      "boundary_operator": {"kind": "modes", "entries": [{"k": 1, "j": -1, "value": [0, 2]}]},
      "lambda": [-1, [-2, 3]], "region": {"re": [0, 50], "im": [-1, 1], "grid": [11, 3]}, "output": {"format": "json"}})");
  CHECK(c.model.kind == "disk_interior");
  CHECK(c.boundary.entries.size() == 1);
  CHECK(c.boundary.entries[0].value == Complex(0.0, 2.0));
  REQUIRE(c.lambdas.size() == 2);
  CHECK(c.lambdas[1] == Complex(-2.0, 3.0));
  REQUIRE(c.region);
  CHECK(c.region->re_max == 50.0);
  CHECK(c.grid == ScanGrid{11, 3});
  CHECK(c.output.format == "json");
  for (const char* text : {R"({"lambda": -1})", R"({"lambda": [[1, 2, 3]]})",
                           R"({"region": {"re": [1, 0], "im": [0, 1]}})", R"({"output": {"format": "xml"}})",
                           R"({"boundary_operator": {"kind": "scalar"}})", R"({"boundary_operator": {"kind": "dirichlet"}})",
                           R"({"potential": {"kind": "zero"}, "model": {"potential": {"kind": "zero"}}})",
                           R"({"potential": {"kind": "power", "alpha": 0.6, "p": 2}})", "[1, 2]", "{"}) {
    INFO(std::string(text));
    CHECK_THROWS_AS(cli::parse_cli_config(text), Error);
  }
}

TEST_CASE("weyl on the free interval matches the closed form") {
  const fs::path dir = scratch("weyl");
  const Run r = krein_run(dir, R"({"model": {"kind": "fd1d", "n": 256}, "lambda": [-1, -9]})", {"weyl"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(slurp(dir / "weyl.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("# krein.weyl schema 1", 0) == 0);
  CHECK(rows[1] == "re_lambda,im_lambda,re_m0_0,im_m0_0,re_m0_1,im_m0_1,re_m1_0,im_m1_0,re_m1_1,im_m1_1,norm");
  const std::vector<double> row = fields(rows[2]);
  REQUIRE(row.size() == 11);
  CHECK(row[2] == doctest::Approx(1.3130).epsilon(1e-4));
  CHECK(row[4] == doctest::Approx(0.8509).epsilon(1e-4));
  const CMatrix exact = oracle::interval_weyl(Complex(1.0));
  CHECK(std::abs(row[2] - exact(0, 0).real()) <= 1e-4);
  CHECK(std::abs(row[4] - exact(0, 1).real()) <= 1e-4);
  CHECK(std::abs(row[10] - (exact(0, 0) + exact(0, 1)).real()) <= 1e-4);
}

TEST_CASE("weyl edge cases") {
  const fs::path dir = scratch("weyl_edges");
  Run r = krein_run(dir, R"({"lambda": []})", {"weyl"});
  CHECK(r.code == cli::kOk);
  CHECK(lines(slurp(dir / "weyl.csv")).size() == 2);

  r = krein_run(dir, R"({"lambda": [-1, 3]})", {"weyl"});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("threshold") != std::string::npos);
  CHECK(r.err.find("-0.5") != std::string::npos);

  r = krein_run(dir, R"({"lambda": [[-1, 2]]})", {"--allow-uncertified", "weyl"});
  CHECK(r.code == cli::kOk);

  r = krein_run(dir, R"({"model": {"kind": "fd1d", "n": 1}, "lambda": [-1]})", {"weyl"});
  CHECK(r.code == cli::kConfigError);

  r = krein_run(dir, R"({"lambda": [0]})", {"--allow-uncertified", "weyl"});
  CHECK(r.code == cli::kSolverFailure);

  r = krein_run(dir, R"({"lambda": [-1]})", {"--jobs", "x", "weyl"});
  CHECK(r.code == cli::kConfigError);

  r = krein_run(dir, R"({"lambda": [-2], "output": {"format": "json"}})", {"weyl"});
  CHECK(r.code == cli::kOk);
  CHECK(slurp(dir / "weyl.json").find("\"schema\": \"krein.weyl\"") != std::string::npos);
}

TEST_CASE("resolve with B = 0 equals the Neumann route byte for byte") {
  const fs::path dir = scratch("resolve_zero");
  const std::string body = std::string("{") + kComplexFd + R"(, "lambda": [-3, -20], "rhs": {"kind": "random"},)";
  REQUIRE(krein_run(dir, body + R"("boundary_operator": {"kind": "zero"}})", {"--seed", "5", "resolve"}).code == 0);
  const std::string krein_route = slurp(dir / "resolve.csv");
  REQUIRE(krein_run(dir, body + R"("boundary_operator": {"kind": "neumann"}})", {"--seed", "5", "resolve"}).code == 0);
  CHECK(slurp(dir / "resolve.csv") == krein_route);
  CHECK(lines(krein_route).size() == 2 + 2 * 128 + 3);
}

TEST_CASE("resolve residuals on random boundary operators") {
  const fs::path dir = scratch("resolve_random");
  const std::string config = std::string("{") + kComplexFd +
                             R"(, "lambda": [-3, -20, -200], "rhs": {"kind": "random"},
      "boundary_operator": {"kind": "random", "scale": 2}})";
  for (const char* seed : {"1", "2", "3"}) {
    REQUIRE(krein_run(dir, config, {"--seed", seed, "resolve"}).code == 0);
    int residuals = 0;
    for (const std::string& line : lines(slurp(dir / "resolve.csv"))) {
      if (line.rfind("# residual,", 0) != 0) continue;
      const std::vector<double> v = fields(line.substr(11));
      REQUIRE(v.size() == 4);
      CHECK(v[2] <= 1e-8);
      CHECK(v[3] <= 1e-8);
      ++residuals;
    }
    CHECK(residuals == 3);
  }
}

TEST_CASE("resolve at a Robin eigenvalue is a spectral singularity") {
  const fs::path dir = scratch("resolve_singular");
  const std::string b = R"("model": {"kind": "fd1d", "n": 128}, "boundary_operator": {"kind": "scalar", "value": 2})";
  REQUIRE(krein_run(dir, "{" + b + R"(, "region": {"re": [-5, 60], "im": [-1, 1], "grid": [131, 5]}})", {"eigs"}).code ==
          0);
  const auto rows = lines(slurp(dir / "eigs.csv"));
  REQUIRE(rows.size() >= 3);
  const std::string lambda = rows[2].substr(0, rows[2].find(','));
  const Run r = krein_run(dir, "{" + b + R"(, "lambda": [)" + lambda + "]}", {"--allow-uncertified", "resolve"});
  CHECK(r.code == cli::kSpectralSingularity);
  CHECK(r.err.find("BirmanSchwingerSingular") != std::string::npos);
}

TEST_CASE("eigs with B = 0 is empty") {
  const fs::path dir = scratch("eigs_zero");
  const Run r = krein_run(dir, std::string("{") + kComplexFd + R"(, "region": {"re": [-40, 120], "im": [-15, 15]}})",
                          {"eigs"});
  CHECK(r.code == cli::kOk);
  const auto rows = lines(slurp(dir / "eigs.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == "re,im");
  CHECK(krein_run(dir, "{}", {"eigs"}).code == cli::kConfigError);
}

TEST_CASE("eigs output is a function of config and seed") {
  const fs::path dir = scratch("eigs_seed");
  const std::string config = std::string("{") + kComplexFd +
                             R"(, "boundary_operator": {"kind": "random"}, "region": {"re": [-40, 60], "im": [-10, 10], "grid": [51, 11]}})";
  REQUIRE(krein_run(dir, config, {"--seed", "7", "eigs"}).code == 0);
  const std::string a = slurp(dir / "eigs.csv");
  REQUIRE(krein_run(dir, config, {"--seed", "7", "eigs"}).code == 0);
  CHECK(slurp(dir / "eigs.csv") == a);
  REQUIRE(krein_run(dir, config, {"--seed", "8", "eigs"}).code == 0);
  CHECK(slurp(dir / "eigs.csv") != a);
}

TEST_CASE("decay on the free interval") {
  const fs::path dir = scratch("decay");
  const Run r = krein_run(dir, R"({"model": {"kind": "fd1d", "n": 256}})", {"decay"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(slurp(dir / "decay.csv"));
  REQUIRE(rows.size() >= 2 + 8 + 1);
  CHECK(rows[0] == "# krein.decay schema 1");
  CHECK(rows[1] == "model,lambda,weyl_norm");
  const std::string& footer = rows.back();
  REQUIRE(footer.rfind("exponent=", 0) == 0);
  CHECK(std::stod(footer.substr(9)) == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(krein_run(dir, R"({"lambda": [[-4, 1]]})", {"decay"}).code == cli::kConfigError);
}

TEST_CASE("verify writes the report files and maps failures to exit 1") {
  const fs::path dir = scratch("verify");
  const std::string small = R"({"suite": {"models": [{"kind": "fd1d", "n": 256}], "random_pairs": 3,
      "identity_samples": 3, "decay_lambdas": [-64, -256, -1024]}})";
  Run r = krein_run(dir, small, {"--seed", "3", "--jobs", "2", "verify"});
  REQUIRE(r.code == cli::kOk);
  for (const char* f : {"report.json", "report.csv", "decay.csv", "timing.json"}) CHECK(fs::exists(dir / f));
  const VerificationReport report = report_from_json(slurp(dir / "report.json"));
  CHECK(report.seed == 3);
  CHECK(report.timings.empty());
  CHECK(r.out.find(" 0 failed") != std::string::npos);

  r = krein_run(dir, R"({"suite": {"models": [{"kind": "fd1d", "n": 64}], "random_pairs": 3,
      "identity_samples": 3, "tolerances": {"*": 0}}})", {"verify"});
  CHECK(r.code == cli::kVerificationFailed);
  CHECK(r.err.find("FAIL ") != std::string::npos);
}

TEST_CASE("usage errors") {
  std::ostringstream out, err;
  CHECK(cli::run({}, out, err) == cli::kConfigError);
  CHECK(cli::run({"frobnicate"}, out, err) == cli::kConfigError);
  CHECK(cli::run({"--config", "/nonexistent/krein.json", "weyl"}, out, err) == cli::kConfigError);
  CHECK(cli::run({"weyl"}, out, err) == cli::kConfigError);
  CHECK(cli::run({"--help"}, out, err) == cli::kOk);
  CHECK(out.str().find("verify") != std::string::npos);
}
