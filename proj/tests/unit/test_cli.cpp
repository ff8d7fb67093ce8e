#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ncmetric/cli.hpp"

using namespace ncm;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ncmetric");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ncmetric_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes by error kind") {
  CHECK(cli::exit_code_for(ErrorKind::MappingViolation) == cli::kExitViolation);
  CHECK(cli::exit_code_for(ErrorKind::NestingViolation) == cli::kExitViolation);
  CHECK(cli::exit_code_for(ErrorKind::InvalidSpec) == cli::kExitInput);
  CHECK(cli::exit_code_for(ErrorKind::PointOutsideDomain) == cli::kExitInput);
  CHECK(cli::exit_code_for(ErrorKind::NotInHalfPlane) == cli::kExitInput);
  CHECK(cli::exit_code_for(ErrorKind::MaxIterExceeded) == cli::kExitNumerical);
  CHECK(cli::exit_code_for(ErrorKind::SingularMatrix) == cli::kExitNumerical);
}

TEST_CASE("help and parse errors") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"delta", "--help"}).code == 0);
  CHECK(run_cli({}).code == cli::kExitInput);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitInput);
  CHECK(run_cli({"delta", "--tol", "abc"}).code == cli::kExitInput);
}

TEST_CASE("delta with explicit points") {
  const Outcome o = run_cli({"delta", "--domain", "ball", "--a", "0", "--c", "0.5", "--b", "-0.5"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  const double expected = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(j.at("results").at("closed_ball").at("value").get<double>() - expected) < 1e-15);
  CHECK(std::abs(j.at("results").at("kernel").at("value").get<double>() - expected) < 1e-15);
  CHECK(std::abs(j.at("results").at("ray").at("value").get<double>() - expected) < 5e-6);
  CHECK(std::abs(j.at("tilde").at("value").get<double>() - expected) < 1e-15);

  const Outcome hp = run_cli({"delta", "--domain", R"({"variant":"halfplane"})", "--a", "[0,1]", "--b", "1"});
  REQUIRE(hp.code == 0);
  CHECK(std::abs(nlohmann::json::parse(hp.out).at("results").at("closed_halfplane").at("value").get<double>() - 0.5) <
        1e-15);

  CHECK(run_cli({"delta", "--domain", "ball", "--a", "1.5", "--c", "0"}).code == cli::kExitInput);
  CHECK(run_cli({"delta", "--domain", "torus", "--a", "0"}).code == cli::kExitInput);
  CHECK(run_cli({"delta", "--domain", "ball", "--a", "/no/such/file.json"}).code == cli::kExitInput);
}

TEST_CASE("delta sweep writes a CSV table") {
  const auto path = scratch("delta.csv");
  const Outcome o = run_cli({"delta", "--domain", "halfplane", "--levels", "1,2", "--samples", "3", "--seed", "5",
                             "--out", path.string()});
  REQUIRE(o.code == 0);
  const auto rows = read_csv(slurp(path));
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"level", "method", "value", "bracket_lo", "bracket_hi", "iterations"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == 6);
  const std::string first = slurp(path);
  REQUIRE(run_cli({"delta", "--domain", "halfplane", "--levels", "1,2", "--samples", "3", "--seed", "5", "--out",
                   path.string()})
              .code == 0);
  CHECK(slurp(path) == first);
}

TEST_CASE("distance") {
  const Outcome o = run_cli({"distance", "--domain", "ball", "--a", "0", "--c", "0.5", "--refinements", "8"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(std::abs(j.at("tilde").at("value").get<double>() - 1.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(j.at("dtilde_upper").at("value").get<double>() <= std::atanh(0.5) + 1e-3);
  CHECK(std::abs(j.at("d_upper").at("value").get<double>() - std::atanh(0.5)) < 1e-4);
}

TEST_CASE("contract") {
  CHECK(run_cli({"contract", "--function", R"({"variant":"moebius_ball","alpha":[0.3,0.1]})", "--samples", "20",
                 "--equality"})
            .code == 0);
  CHECK(run_cli({"contract", "--function", R"({"variant":"polynomial","coeffs":[0,0,0.5]})", "--samples", "20"}).code ==
        0);
  const Outcome bad =
      run_cli({"contract", "--function", R"({"variant":"affine","beta":3,"gamma":0})", "--samples", "20"});
  CHECK(bad.code == cli::kExitViolation);
  CHECK(run_cli({"contract", "--function", R"({"variant":"moebius_ball","alpha":2})"}).code == cli::kExitInput);
}

TEST_CASE("convolve Bernoulli squared matches the arcsine density") {
  const auto path = scratch("arcsine.csv");
  const Outcome o = run_cli({"convolve", "--law", "bernoulli", "--rho-t", "2", "--xmin", "-2.5", "--xmax", "2.5",
                             "--eps", "1e-3", "--points", "501", "--out", path.string()});
  REQUIRE(o.code == 0);
  const auto rows = read_csv(slurp(path));
  REQUIRE(rows.size() == 502);
  CHECK(rows[0] == std::vector<std::string>{"x", "density", "residual", "iterations", "error"});
  double worst = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = std::stod(rows[i][0]), density = std::stod(rows[i][1]);
    if (std::abs(x) <= 1.8) worst = std::max(worst, std::abs(density - 1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x))));
  }
  CHECK(worst <= 3e-3);
  CHECK(run_cli({"convolve", "--law", "cauchy"}).code == cli::kExitInput);
  CHECK(run_cli({"convolve", "--eps", "0"}).code == cli::kExitInput);
}

TEST_CASE("counterexample output") {
  const Outcome o = run_cli({"counterexample", "--samples", "50"});
  CHECK(o.code == 0);
  CHECK(o.out.find("level4 [[0, 0, 3, 0], [0, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0]] inside true") !=
        std::string::npos);
  CHECK(o.out.find("level2 [[0, 3], [0, 0]] inside false") != std::string::npos);
}

TEST_CASE("props through the executable") {
  const std::string exe = NCMETRIC_CLI_PATH;
  const auto a = scratch("props_a.txt"), b = scratch("props_b.txt");
  const std::string base = "\"" + exe + "\" props --seed 7 --filter matcore/ --out ";
  const int first = std::system((base + "\"" + a.string() + "\"").c_str());
  const int second = std::system((base + "\"" + b.string() + "\"").c_str());
  REQUIRE(WIFEXITED(first));
  REQUIRE(WIFEXITED(second));
  CHECK(WEXITSTATUS(first) == 0);
  CHECK(WEXITSTATUS(second) == 0);
  CHECK_FALSE(slurp(a).empty());
  CHECK(slurp(a) == slurp(b));

  const int bad = std::system(("\"" + exe + "\" delta --domain ball --a 2 > /dev/null 2>&1").c_str());
  REQUIRE(WIFEXITED(bad));
  CHECK(WEXITSTATUS(bad) == cli::kExitInput);
}
