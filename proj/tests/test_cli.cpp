#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run cli(const std::string& args) {
  const std::string cmd = std::string(NLSP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "nlsp_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ptrig emits a flat JSON object") {
  auto r = cli("ptrig --fn pi --p 2");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["value"].get<double>() == std::numbers::pi);
  CHECK(j["fn"] == "pi");

  r = cli("ptrig --fn sin --p 2 --t 1.0");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(0.8414709848).epsilon(1e-10));

  r = cli("ptrig --fn pi --p 10");
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(2.5329).epsilon(1e-4));
}

TEST_CASE("usage and domain errors exit with 2") {
  CHECK(cli("ptrig --fn pi --p 1.5").code == 2);
  CHECK(cli("ptrig --fn tan --p 2").code == 2);
  CHECK(cli("ptrig --fn sin --p 2").code == 2);
  CHECK(cli("lambda --p 2 --alpha 1").code == 2);
  CHECK(cli("lambda --p 2 --r 3 --alpha 1").code == 2);
  CHECK(cli("lambda-curve --p 2 --r 2 --alpha-range 0:1").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("h-table CSV and the divergent row") {
  auto r = cli("h-table --p 3 --r 1.5 --m-grid 0:1:11");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "m,H,lambda_candidate,est_error");
  const double expect = 3.0469919990461722 / std::cbrt(2.0);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(rows == 11);
  CHECK(r.out.find('\r') == std::string::npos);

  r = cli("h-table --p 2 --r 2 --m-grid 0:1:3");
  CHECK(r.code == 0);
  CHECK(r.out.find("\n0,inf,") != std::string::npos);
  CHECK(r.out.find("\n1,3.14159265358979") != std::string::npos);
  CHECK(cli("h-table --p 2 --r 2 --m-grid 0:1:3 --strict").code == 2);
}

TEST_CASE("lambda reports the result and both methods") {
  auto r = cli("lambda --p 2 --r 2 --alpha 0 --n-cells 512");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["lambda"].get<double>() == doctest::Approx(2.4674).epsilon(1e-4));
  CHECK(j["sign_class"] == "positive");

  r = cli("lambda --p 2 --r 2 --alpha 20 --n-cells 512 --method both");
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["sign_class"] == "sign_changing");
  CHECK(j["lambda_shoot"].get<double>() == doctest::Approx(9.8696044).epsilon(1e-8));

  r = cli("lambda --p 3 --r 2 --alpha 1 --method shoot --n-cells 256");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["method"] == "shooting");
}

TEST_CASE("solver failure exits with 3") {
  CHECK(cli("lambda --p 3 --r 2 --alpha 1 --max-iter 2").code == 3);
}

TEST_CASE("minimizer dump and gnuplot files") {
  const auto dir = scratch();
  const auto dump = dir / "u.csv";
  const auto out = dir / "res.json";
  auto r = cli("lambda --p 2 --r 2 --alpha 1 --n-cells 64 --dump-minimizer " + dump.string() + " --out " +
               out.string() + " --gnuplot");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(nlohmann::json::parse(slurp(out))["n_cells"] == 64);
  const std::string csv = slurp(dump);
  CHECK(csv.rfind("x,y\n-1,0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 66);
  CHECK(std::filesystem::exists(dir / "res.dat"));
  CHECK(slurp(dir / "res.plt").find("plot \"res.dat\"") != std::string::npos);
}

TEST_CASE("curve output is byte-identical across thread counts") {
  const std::string args = "lambda-curve --p 2 --r 1 --alpha-range 0:8:9 --n-cells 128";
  const auto one = cli(args + " --threads 1");
  const auto three = cli(args + " --threads 3");
  REQUIRE(one.code == 0);
  CHECK(one.out == three.out);
  CHECK(one.out.rfind("alpha,lambda,moment,sign_class,odd_defect\n", 0) == 0);
  CHECK(cli(args + " --threads 0").code == 2);
}

TEST_CASE("alpha-c reports the closed form when r = p") {
  auto r = cli("alpha-c --p 2 --r 2 --n-cells 128 --tol 1e-5");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["alpha_c"].get<double>() == doctest::Approx(7.402203).epsilon(1e-5));
  CHECK(j["closed_form"].get<double>() == doctest::Approx(3 * std::numbers::pi * std::numbers::pi / 4));
  CHECK(j.contains("relative_deviation"));
}

TEST_CASE("rescale and alpha-zero") {
  auto r = cli("rescale --p 2 --r 2 --lambda 8 --alpha 1 --a -2 --b 2");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["lambda"].get<double>() == doctest::Approx(2.0));
  CHECK(j["alpha"].get<double>() == doctest::Approx(4.0));
  CHECK(cli("rescale --p 2 --r 2 --lambda 8 --alpha 1 --a 2 --b 2").code == 2);

  r = cli("alpha-zero --p 2 --r 2 --n-cells 256");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["alpha_star"].get<double>() ==
        doctest::Approx(-std::numbers::pi * std::numbers::pi / 4).epsilon(1e-3));
}

TEST_CASE("verify prints one line per check") {
  auto r = cli("verify --suite ptrig");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    CHECK(line.size() > 5);
    CHECK(line.substr(line.size() - 4) == "PASS");
  }
  CHECK(n >= 3);
  CHECK(cli("verify --suite hfun --fast").code == 0);
  CHECK(cli("verify --suite nope").code == 2);
}
