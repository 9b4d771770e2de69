#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(CFQKD_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "cfqkd_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("exit-code contract") {
  CHECK(run_cli("run -n 0").exit_code == 2);
  CHECK(run_cli("run -r 1.5 -n 1000").exit_code == 2);
  CHECK(run_cli("run -s bogus -n 1000").exit_code == 2);
  CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
  CHECK(run_cli("run -n 1000 --seed 5").exit_code == 0);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("seed reproducibility across process invocations") {
  const auto a = run_cli("run -r 0.5 -n 20000 --seed 9 --format text");
  const auto b = run_cli("run -r 0.5 -n 20000 --seed 9 --format text");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto c = run_cli("run -r 0.5 -n 20000 --seed 10 --format text");
  CHECK(a.out != c.out);
}

TEST_CASE("summary schema golden file") {
  const auto res = run_cli("run -r 0.5 -s simple-ir -n 10000 --seed 42 --format text");
  CHECK(res.exit_code == 0);
  const std::string golden =
      read_file(fs::path(CFQKD_GOLDEN_DIR) / "run_r05_simple_ir_seed42.txt");
  CHECK(res.out == golden);
}

TEST_CASE("json summary carries the documented field set") {
  const auto res = run_cli("run -r 0.3 -n 5000 --seed 1 --format json");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.out);
  for (const char* field :
       {"reflectivity", "round_trip_phase", "strategy", "seed", "error_fraction",
        "rounds", "d1_clicks", "d2_clicks", "d3_clicks", "loss_events", "sifted_count",
        "sift_rate", "d3_anomalies", "d2_pol_anomalies", "agreed_sifted",
        "eve_known_agreed", "eve_info_fraction", "counterfactual_sifted",
        "counterfactual_fraction", "counterfactual_detections", "qci_counts", "qber",
        "qber_sample", "key_length"}) {
    INFO(field);
    CHECK(j.contains(field));
  }
  CHECK(j.size() == 24);
  CHECK(j["strategy"] == "none");
  CHECK(j["rounds"] == 5000);
}

TEST_CASE("round log emits one record per round") {
  const auto dir = temp_dir();
  const auto log = dir / "rounds.jsonl";
  const auto res = run_cli("run -n 200 --seed 3 --round-log " + log.string() + " -o " +
                           (dir / "summary.txt").string());
  CHECK(res.exit_code == 0);
  std::ifstream f(log);
  std::string line;
  int lines = 0;
  while (std::getline(f, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("outcome"));
    CHECK(j.contains("sifted"));
    ++lines;
  }
  CHECK(lines == 200);
}

TEST_CASE("oracle grid output") {
  SUBCASE("single point contains the balanced-splitter identification efficiency") {
    const auto res = run_cli("oracle --grid-start 0.5 --grid-stop 0.5");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("0.375") != std::string::npos);
  }
  SUBCASE("default sweep writes 21-row tables that normalize") {
    const auto dir = temp_dir();
    CHECK(run_cli("oracle -o " + dir.string()).exit_code == 0);
    std::ifstream qci(dir / "qci.csv");
    std::string line;
    std::getline(qci, line);  // header
    CHECK(line == "R,T,p1,p2,p3,p4");
    int rows = 0;
    while (std::getline(qci, line)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double r, t, p1, p2, p3, p4;
      ls >> r >> t >> p1 >> p2 >> p3 >> p4;
      CHECK(p1 + p2 + p3 + p4 == doctest::Approx(1.0).epsilon(1e-12));
      ++rows;
    }
    CHECK(rows == 21);
    CHECK(fs::exists(dir / "detection.csv"));
    CHECK(fs::exists(dir / "attack.csv"));
  }
  SUBCASE("boundary points carry zero sift rate") {
    const auto res = run_cli("oracle --grid-start 0 --grid-stop 1 --grid-step 1");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("simple-ir,0,") != std::string::npos);
  }
}

TEST_CASE("compare verdicts") {
  CHECK(run_cli("compare -r 0.5 -s simple-ir -n 200000 --seed 7").exit_code == 0);
  CHECK(run_cli("compare -r 0.5 -s qci-probe -n 200000 --seed 8").exit_code == 0);
  // sabotaged interference phase must be flagged
  CHECK(run_cli("compare -r 0.5 --phase 0 -n 50000 --seed 9").exit_code == 1);
  // too few rounds for a meaningful comparison
  CHECK(run_cli("compare -n 100").exit_code == 2);
}

TEST_CASE("nocloning reports") {
  SUBCASE("balanced splitter") {
    const auto res = run_cli("nocloning -r 0.5");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("reduced_overlap_B = 0.25") != std::string::npos);
    CHECK(res.out.find("verdict = not distinguishable without disturbance") !=
          std::string::npos);
  }
  SUBCASE("R = 0 flips the verdict") {
    const auto res = run_cli("nocloning -r 0");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("verdict = distinguishable without disturbance") !=
          std::string::npos);
  }
  SUBCASE("custom orthogonal product states") {
    const auto dir = temp_dir();
    std::ofstream(dir / "s0.txt") << "0 0 1 0\n0 1 0 0\n";
    std::ofstream(dir / "s1.txt") << "0 1 1 0\n0 0 0 0\n";
    const auto res = run_cli("nocloning --state0 " + (dir / "s0.txt").string() +
                             " --state1 " + (dir / "s1.txt").string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("reduced_overlap_B = 0") != std::string::npos);
    CHECK(res.out.find("verdict = distinguishable") != std::string::npos);
  }
  SUBCASE("malformed state file") {
    const auto dir = temp_dir();
    std::ofstream(dir / "bad.txt") << "0 garbage\n";
    const auto res = run_cli("nocloning --state0 " + (dir / "bad.txt").string() +
                             " --state1 " + (dir / "bad.txt").string());
    CHECK(res.exit_code == 2);
  }
}

TEST_CASE("sweep emits one row per grid point") {
  const auto res = run_cli("sweep --grid-start 0.3 --grid-stop 0.7 --grid-step 0.2 -n 50000");
  CHECK(res.exit_code == 0);
  int rows = 0;
  std::istringstream ss(res.out);
  std::string line;
  std::getline(ss, line);
  CHECK(line.rfind("R,strategy", 0) == 0);
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("config file with command-line override") {
  const auto dir = temp_dir();
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "reflectivity=0.3\nrounds=4000\nseed=5\n";
  const auto base = run_cli("run --config " + cfg.string() + " --format json");
  CHECK(base.exit_code == 0);
  auto j = nlohmann::json::parse(base.out);
  CHECK(j["reflectivity"] == 0.3);
  CHECK(j["rounds"] == 4000);
  // the command line wins on conflict
  const auto over = run_cli("run --config " + cfg.string() + " -r 0.7 --format json");
  CHECK(nlohmann::json::parse(over.out)["reflectivity"] == 0.7);
}

TEST_CASE("output directory environment override") {
  const auto dir = temp_dir();
  const auto res = run_cli("run -n 1000 --seed 2 -o summary.txt",
                           "CFQKD_OUTPUT_DIR=" + dir.string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "summary.txt"));
}
