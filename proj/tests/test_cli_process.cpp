// Exit-code and output contract of the command-line tool, exercised through
// real child processes. The binary path arrives in AOIMAC_CLI (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

std::string cli_path() {
  const char* env = std::getenv("AOIMAC_CLI");
  REQUIRE_MESSAGE(env != nullptr, "AOIMAC_CLI must point at the aoimac binary");
  return env;
}

int run_cmd(const std::string& args, const std::string& env_prefix = {}) {
  const std::string cmd = env_prefix + cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "aoimac_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("infeasible optimization exits 4") {
  CHECK(run_cmd("optimize --lambda 0.95 --delta 0.6 --mpr strong") == 4);
  CHECK(run_cmd("optimize --lambda 0.3 --delta 0.6 --mpr strong") == 0);
}

TEST_CASE("unknown figure id exits 2") {
  CHECK(run_cmd("sweep fig99") == 2);
  CHECK(run_cmd("nosuchcommand") == 2);
}

TEST_CASE("config errors map to the documented exit codes") {
  const auto dir = scratch_dir();

  const auto missing = dir / "missing_lambda.json";
  write_file(missing, R"({"policy": "PRA", "delta": 0.6})");
  CHECK(run_cmd("simulate --config " + missing.string()) == 3);

  const auto broken = dir / "broken.json";
  write_file(broken, "{broken");
  CHECK(run_cmd("simulate --config " + broken.string()) == 2);

  CHECK(run_cmd("simulate --config " + (dir / "does_not_exist.json").string()) == 2);
  CHECK(run_cmd("validate --lambda-grid '' --horizon 100") == 3);
}

TEST_CASE("simulate output is byte-identical across runs") {
  const auto dir = scratch_dir();
  const std::string flags =
      "simulate --policy PRA --mpr strong --lambda 0.3 --delta 0.6 --q1 1 --q2 1 "
      "--horizon 5000 --seed 42 --out ";
  CHECK(run_cmd(flags + (dir / "a.csv").string()) == 0);
  CHECK(run_cmd(flags + (dir / "b.csv").string()) == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.find("scenario,policy,mpr") == 0);
  CHECK(a.find(",42,") != std::string::npos);
}

TEST_CASE("flags override config file values") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "base.json";
  write_file(cfg, R"({"policy": "PRA", "lambda": 0.3, "delta": 0.6,
                      "horizon": 300, "seeds": [3]})");
  CHECK(run_cmd("simulate --config " + cfg.string() + " --lambda 0.2 --out " +
                (dir / "ovr.csv").string()) == 0);
  const std::string csv = slurp(dir / "ovr.csv");
  CHECK(csv.find("PRA,strong,0.2,0.6,") != std::string::npos);
}

TEST_CASE("seed resolution: flag beats environment beats built-in") {
  const auto dir = scratch_dir();
  const std::string base =
      "simulate --policy PRA --mpr strong --lambda 0.2 --delta 0.5 --horizon 200 --out ";

  CHECK(run_cmd(base + (dir / "env.csv").string(), "AOIMAC_SEED=777 ") == 0);
  CHECK(slurp(dir / "env.csv").find(",777,") != std::string::npos);

  CHECK(run_cmd(base + (dir / "flag.csv").string() + " --seed 31", "AOIMAC_SEED=777 ") == 0);
  const std::string flagged = slurp(dir / "flag.csv");
  CHECK(flagged.find(",31,") != std::string::npos);
  CHECK(flagged.find(",777,") == std::string::npos);
}

TEST_CASE("unachievable validation tolerance exits 1") {
  // a tolerance far below Monte Carlo noise must fail the suite
  CHECK(run_cmd("validate --tolerance 1e-9 --horizon 20000") == 1);
}

TEST_CASE("analyze emits closed-form rows") {
  const auto dir = scratch_dir();
  CHECK(run_cmd("analyze --policy PRA --mpr strong --lambda 0.3 --delta 0.6 --q1 1 --q2 1 "
                "--out " +
                (dir / "an.csv").string()) == 0);
  const std::string csv = slurp(dir / "an.csv");
  CHECK(csv.find("mu,stable") != std::string::npos);
  CHECK(csv.find("2.312983957") != std::string::npos);
}

TEST_CASE("optimize reports the boundary case") {
  const auto dir = scratch_dir();
  CHECK(run_cmd("optimize --lambda 0.7 --delta 0.9 --mpr weak --out " +
                (dir / "opt.csv").string()) == 0);
  const std::string csv = slurp(dir / "opt.csv");
  CHECK(csv.find("Boundary") != std::string::npos);
  CHECK(csv.find("0.5466772616") != std::string::npos);
  CHECK(csv.find("6.090543") != std::string::npos);
}
