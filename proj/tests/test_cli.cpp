#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "betafreeze/cli.hpp"

using namespace betafreeze;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"betafreeze"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("zeros subcommand", "[cli]") {
  const auto csv = run_cli({"zeros", "--n", "3"});
  REQUIRE(csv.code == 0);
  const auto l = lines_of(csv.out);
  REQUIRE(l.size() == 5);
  CHECK(l[0].rfind("# fixed_point_residual=", 0) == 0);
  CHECK(l[1] == "index,zero");
  CHECK(l[3] == "2,0");
  CHECK(std::stod(l[2].substr(2)) == Catch::Approx(std::sqrt(1.5)).epsilon(1e-15));

  const auto json = run_cli({"zeros", "--n", "4", "--format", "json"});
  REQUIRE(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j.at("n") == 4);
  CHECK(j.at("zeros").size() == 4);
  CHECK(j.at("fixed_point_residual").get<double>() <= 1e-12);
  CHECK(j.contains("potential_gap"));
}

TEST_CASE("verify subcommand", "[cli]") {
  for (const char* n : {"2", "17", "60", "120"}) {
    const auto r = run_cli({"verify", "--n", n});
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
  }
}

TEST_CASE("sample subcommand", "[cli]") {
  const auto r = run_cli({"sample", "--n", "3", "--k", "2", "--trials", "4", "--seed", "8"});
  REQUIRE(r.code == 0);
  const auto l = lines_of(r.out);
  REQUIRE(l.size() == 2 + 12);
  CHECK(l[0][0] == '#');
  CHECK(l[1] == "trial,i,lambda_i");
  CHECK(l[2].rfind("1,1,", 0) == 0);
  CHECK(l.back().rfind("4,3,", 0) == 0);
  CHECK(run_cli({"sample", "--n", "3", "--k", "2", "--trials", "4", "--seed", "8"}).out == r.out);
}

TEST_CASE("bounds subcommand", "[cli]") {
  const auto r = run_cli({"bounds", "--n", "2", "--k", "1e4", "--eps", "0.05", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("prop_total").get<double>() == Catch::Approx(prop_bound(2, 1e4, 0.05).total).epsilon(1e-15));
  CHECK(j.contains("di_bound"));
  const auto csv = run_cli({"bounds", "--n", "2", "--k", "1e6", "--c", "1"});
  CHECK(csv.code == 0);
  CHECK(lines_of(csv.out).size() == 2);
  CHECK(run_cli({"bounds", "--n", "2", "--k", "1e4", "--eps", "0.05", "--c", "1"}).code == 2);
}

TEST_CASE("tail and clt subcommands", "[cli]") {
  const auto t = run_cli({"tail", "--n", "2", "--k", "100", "--eps", "0.1", "--trials", "3000",
                          "--seed", "4", "--workers", "2"});
  REQUIRE(t.code == 0);
  const auto l = lines_of(t.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "# betafreeze tail trials=3000 seed=4 workers=2 confidence=0.98999999999999999");
  CHECK(l[1] == "N,k,eps,norm,threshold,trials,hits,p_hat,ci_low,ci_high");
  // Worker count changes the provenance line only.
  const auto one = run_cli({"tail", "--n", "2", "--k", "100", "--eps", "0.1", "--trials", "3000",
                            "--seed", "4", "--workers", "1"});
  CHECK(lines_of(one.out)[2] == l[2]);

  const auto c = run_cli({"clt", "--n", "2", "--k", "1000", "--trials", "2000", "--seed", "1"});
  REQUIRE(c.code == 0);
  CHECK(lines_of(c.out)[1] == "N,k,trials,mean_norm,cov_rel_err");
}

TEST_CASE("seed from environment", "[cli]") {
  ::setenv("BETAFREEZE_SEED", "77", 1);
  const auto env = run_cli({"tail", "--n", "2", "--k", "50", "--eps", "0.1", "--trials", "500"});
  const auto flag = run_cli({"tail", "--n", "2", "--k", "50", "--eps", "0.1", "--trials", "500", "--seed", "77"});
  CHECK(env.code == 0);
  CHECK(env.out == flag.out);
  ::setenv("BETAFREEZE_SEED", "not-a-number", 1);
  CHECK(run_cli({"tail", "--n", "2", "--k", "50", "--eps", "0.1", "--trials", "10"}).code == 2);
  ::unsetenv("BETAFREEZE_SEED");
}

TEST_CASE("sweep subcommand and output files", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "betafreeze_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = (dir / "grid.json").string();
  std::ofstream(cfg) << R"({"n": [2, 3], "k": [100, 1000], "c": [1.0], "trials": 400, "seed": 2})";
  const auto out1 = (dir / "a.csv").string();
  const auto out2 = (dir / "b.csv").string();
  CHECK(run_cli({"sweep", "--config", cfg.c_str(), "--out", out1.c_str()}).code == 0);
  CHECK(run_cli({"sweep", "--config", cfg.c_str(), "--out", out2.c_str()}).code == 0);
  const auto a = slurp(out1);
  CHECK(a == slurp(out2));
  CHECK(lines_of(a).size() == 6);
  CHECK(lines_of(a)[1] == kSweepHeader);

  std::ofstream(cfg) << R"({"n": [2], "k": [1.0], "c": [1.0]})";
  CHECK(run_cli({"sweep", "--config", cfg.c_str()}).code == 2);
  std::ofstream(cfg) << "{not json";
  CHECK(run_cli({"sweep", "--config", cfg.c_str()}).code == 2);
  CHECK(run_cli({"sweep", "--config", (dir / "missing.json").string().c_str()}).code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"zeros"}).code == 2);
  CHECK(run_cli({"zeros", "--n", "1"}).code == 2);
  CHECK(run_cli({"zeros", "--n", "abc"}).code == 2);
  CHECK(run_cli({"tail", "--n", "2", "--k", "10", "--trials", "5"}).code == 2);
  CHECK(run_cli({"tail", "--n", "2", "--k", "10", "--eps", "0.1", "--norm", "l3"}).code == 2);
  CHECK(run_cli({"zeros", "--n", "150", "--tol", "1e-30"}).code == 3);
}

TEST_CASE("installed binary is byte-reproducible", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "betafreeze_bin_test";
  std::filesystem::create_directories(dir);
  const std::string bin = BETAFREEZE_CLI_PATH;
  const std::string args = " tail --n 3 --k 200 --eps 0.05 --trials 2000 --seed 5 --workers 2";
  const auto a = dir / "a.csv", b = dir / "b.csv";
  REQUIRE(std::system((bin + args + " --out " + a.string()).c_str()) == 0);
  REQUIRE(std::system((bin + args + " > " + b.string()).c_str()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
  CHECK(std::system((bin + " zeros --n 1 2>/dev/null").c_str()) != 0);
  std::filesystem::remove_all(dir);
}
