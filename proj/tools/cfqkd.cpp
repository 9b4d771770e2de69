// cfqkd: simulator and analysis harness for a counterfactual QKD protocol.
//
// Subcommands:
//   run        Monte Carlo session, summary to stdout or file
//   oracle     closed-form probability tables over an R grid (CSV)
//   compare    run a session and cross-check it against the closed forms
//   nocloning  Schmidt and reduced-density report for the security criterion
//   sweep      Monte Carlo sweep over an R grid (CSV)

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "cfqkd/nocloning.hpp"
#include "cfqkd/oracle.hpp"
#include "cfqkd/report_io.hpp"

namespace fs = std::filesystem;
using namespace cfqkd;

namespace {

// CFQKD_OUTPUT_DIR re-roots relative output paths.
fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("CFQKD_OUTPUT_DIR")) {
    return fs::path(dir) / p;
  }
  return p;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (step <= 0.0 || stop < start) throw ConfigError("bad grid parameters");
  std::vector<double> grid;
  for (double r = start; r <= stop + 1e-9; r += step) {
    grid.push_back(std::min(std::max(r, 0.0), 1.0));
  }
  return grid;
}

// Flat key=value configuration file; keys are the long option names. Values
// given on the command line win over the file.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw ConfigError("unknown config key: " + key);
    }
    if (opt->count() > 0) continue;  // command line wins
    opt->add_result(value);
    opt->run_callback();
  }
}

struct RunOptions {
  double reflectivity = 0.5;
  double phase = std::numbers::pi;
  std::string strategy = "none";
  long rounds = 1000000;
  std::uint64_t seed = 1;
  double error_fraction = 0.5;
  int workers = 1;
  std::string format = "text";
  std::string out;        // empty -> stdout
  std::string round_log;  // empty -> none
  std::string config;     // empty -> none
};

void add_run_options(CLI::App* sub, RunOptions& opt) {
  sub->add_option("-r,--reflectivity", opt.reflectivity, "Beamsplitter reflectivity R");
  sub->add_option("--phase", opt.phase, "Round-trip phase on arm b (radians)");
  sub->add_option("-s,--strategy", opt.strategy,
                  "Adversary: none|simple-ir|modified-ir|qci-probe");
  sub->add_option("-n,--rounds", opt.rounds, "Number of protocol rounds");
  sub->add_option("--seed", opt.seed, "Session seed");
  sub->add_option("-f,--error-fraction", opt.error_fraction,
                  "Fraction of the sifted key spent on error estimation");
  sub->add_option("-w,--workers", opt.workers, "Worker threads");
  sub->add_option("--config", opt.config, "Flat key=value configuration file");
}

SessionParams to_params(const RunOptions& opt) {
  SessionParams p;
  p.cfg.bs = BeamSplitter::from_reflectivity(opt.reflectivity);
  p.cfg.round_trip_phase = opt.phase;
  const auto strat = strategy_from_name(opt.strategy);
  if (!strat) throw ConfigError("unknown strategy: " + opt.strategy);
  p.strategy = *strat;
  if (opt.rounds < 1) throw ConfigError("rounds must be >= 1");
  p.n_rounds = opt.rounds;
  p.seed = opt.seed;
  p.error_fraction = opt.error_fraction;
  p.workers = opt.workers;
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p = resolve_output(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot open output file: " + p.string());
  f << text;
}

int cmd_run(const RunOptions& opt) {
  SessionParams params = to_params(opt);
  std::ofstream log;
  if (!opt.round_log.empty()) {
    const fs::path p = resolve_output(opt.round_log);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    log.open(p);
    if (!log) throw ConfigError("cannot open round log: " + p.string());
    params.observer = [&log](const RoundRecord& r) {
      log << round_to_json(r).dump() << "\n";
    };
  }
  const SessionReport rep = run_session(params);
  if (opt.format == "json") {
    emit(report_to_json(rep).dump(2) + "\n", opt.out);
  } else if (opt.format == "text") {
    emit(report_to_text(rep), opt.out);
  } else {
    throw ConfigError("unknown format: " + opt.format);
  }
  return 0;
}

int cmd_compare(const RunOptions& opt) {
  if (opt.rounds < 10000) {
    throw ConfigError("compare needs at least 10000 rounds");
  }
  const SessionReport rep = run_session(to_params(opt));
  const oracle::Verdict verdict = oracle::cross_validate(rep);
  emit(verdict_to_text(verdict), opt.out);
  return verdict.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual QKD protocol simulator"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run a Monte Carlo session");
  add_run_options(run, run_opt);
  run->add_option("--format", run_opt.format, "Summary format: text|json");
  run->add_option("-o,--out", run_opt.out, "Summary output file (default stdout)");
  run->add_option("--round-log", run_opt.round_log, "Per-round JSONL log file");

  struct {
    double start = 0.0, stop = 1.0, step = 0.05;
    std::string out_dir;
  } grid_opt;
  CLI::App* orc = app.add_subcommand("oracle", "Emit closed-form tables over an R grid");
  orc->add_option("--grid-start", grid_opt.start, "Grid start");
  orc->add_option("--grid-stop", grid_opt.stop, "Grid stop");
  orc->add_option("--grid-step", grid_opt.step, "Grid step");
  orc->add_option("-o,--out-dir", grid_opt.out_dir,
                  "Directory for detection.csv, attack.csv, qci.csv (default stdout)");

  RunOptions cmp_opt;
  CLI::App* cmp = app.add_subcommand("compare", "Cross-check a session against the closed forms");
  add_run_options(cmp, cmp_opt);
  cmp->add_option("-o,--out", cmp_opt.out, "Verdict output file (default stdout)");

  struct {
    double reflectivity = 0.5;
    std::string state0, state1;
  } nc_opt;
  CLI::App* ncl = app.add_subcommand("nocloning", "Security-criterion report");
  ncl->add_option("-r,--reflectivity", nc_opt.reflectivity,
                  "Evaluate the protocol state pair at this R");
  ncl->add_option("--state0", nc_opt.state0, "Custom state file for |Psi_0>");
  ncl->add_option("--state1", nc_opt.state1, "Custom state file for |Psi_1>");

  struct {
    double start = 0.0, stop = 1.0, step = 0.05;
    std::string strategy = "none";
    long rounds = 100000;
    std::uint64_t seed = 1;
    std::string out;
  } sweep_opt;
  CLI::App* swp = app.add_subcommand("sweep", "Monte Carlo sweep over an R grid");
  swp->add_option("--grid-start", sweep_opt.start, "Grid start");
  swp->add_option("--grid-stop", sweep_opt.stop, "Grid stop");
  swp->add_option("--grid-step", sweep_opt.step, "Grid step");
  swp->add_option("-s,--strategy", sweep_opt.strategy, "Adversary strategy");
  swp->add_option("-n,--rounds", sweep_opt.rounds, "Rounds per grid point");
  swp->add_option("--seed", sweep_opt.seed, "Base seed");
  swp->add_option("-o,--out", sweep_opt.out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      if (!run_opt.config.empty()) apply_config_file(run, run_opt.config);
      return cmd_run(run_opt);
    }
    if (cmp->parsed()) {
      if (!cmp_opt.config.empty()) apply_config_file(cmp, cmp_opt.config);
      return cmd_compare(cmp_opt);
    }

    if (orc->parsed()) {
      const auto grid = make_grid(grid_opt.start, grid_opt.stop, grid_opt.step);
      if (grid_opt.out_dir.empty()) {
        std::cout << "# detection\n";
        write_detection_csv(std::cout, grid);
        std::cout << "# attack\n";
        write_attack_csv(std::cout, grid);
        std::cout << "# qci\n";
        write_qci_csv(std::cout, grid);
      } else {
        const fs::path dir = resolve_output(grid_opt.out_dir);
        fs::create_directories(dir);
        std::ofstream det(dir / "detection.csv"), att(dir / "attack.csv"),
            qci(dir / "qci.csv");
        write_detection_csv(det, grid);
        write_attack_csv(att, grid);
        write_qci_csv(qci, grid);
      }
      return 0;
    }

    if (ncl->parsed()) {
      using nocloning::BipartiteState;
      BipartiteState psi0, psi1;
      if (!nc_opt.state0.empty() || !nc_opt.state1.empty()) {
        if (nc_opt.state0.empty() || nc_opt.state1.empty()) {
          throw ConfigError("provide both --state0 and --state1");
        }
        std::ifstream f0(nc_opt.state0), f1(nc_opt.state1);
        if (!f0) throw ConfigError("cannot open " + nc_opt.state0);
        if (!f1) throw ConfigError("cannot open " + nc_opt.state1);
        psi0 = nocloning::parse_state(f0);
        psi1 = nocloning::parse_state(f1);
      } else {
        psi0 = BipartiteState::protocol_state(0, nc_opt.reflectivity);
        psi1 = BipartiteState::protocol_state(1, nc_opt.reflectivity);
      }
      const auto schmidt0 = nocloning::schmidt_decompose(psi0);
      const auto schmidt1 = nocloning::schmidt_decompose(psi1);
      const auto [verdict, ov] = nocloning::distinguishable_without_disturbance(psi0, psi1);
      std::cout << "schmidt_coefficients_0 =";
      for (int i = 0; i < schmidt0.coefficients.size(); ++i) {
        std::cout << ' ' << schmidt0.coefficients(i);
      }
      std::cout << "\nschmidt_coefficients_1 =";
      for (int i = 0; i < schmidt1.coefficients.size(); ++i) {
        std::cout << ' ' << schmidt1.coefficients(i);
      }
      std::cout << "\nreduced_overlap_B = " << ov << "\n";
      std::cout << "verdict = "
                << (verdict ? "distinguishable without disturbance"
                            : "not distinguishable without disturbance")
                << "\n";
      return 0;
    }

    if (swp->parsed()) {
      const auto grid = make_grid(sweep_opt.start, sweep_opt.stop, sweep_opt.step);
      const auto strat = strategy_from_name(sweep_opt.strategy);
      if (!strat) throw ConfigError("unknown strategy: " + sweep_opt.strategy);
      std::ostringstream csv;
      csv << "R,strategy,rounds,sift_rate,oracle_sift_rate,qber,d3_anomaly_rate,"
             "eve_info,counterfactual_fraction,max_abs_z,pass\n";
      bool all_pass = true;
      std::uint64_t point = 0;
      for (double r : grid) {
        SessionParams p;
        p.cfg.bs = BeamSplitter::from_reflectivity(r);
        p.strategy = *strat;
        p.n_rounds = sweep_opt.rounds;
        p.seed = derive_stream_seed(sweep_opt.seed, point++);
        const SessionReport rep = run_session(p);
        const auto verdict = oracle::cross_validate(rep);
        double max_z = 0.0;
        for (const auto& c : verdict.checks) {
          if (std::isfinite(c.z)) max_z = std::max(max_z, std::abs(c.z));
          if (!c.pass) max_z = std::max(max_z, 1e9);
        }
        all_pass = all_pass && verdict.pass;
        csv << r << ',' << strategy_name(*strat) << ',' << rep.rounds << ','
            << rep.sift_rate << ',' << oracle::sift_rate(r, *strat) << ','
            << (rep.qber ? *rep.qber : 0.0) << ','
            << static_cast<double>(rep.d3_anomalies) / rep.rounds << ','
            << (rep.eve_info_fraction ? *rep.eve_info_fraction : 0.0) << ','
            << rep.counterfactual_fraction << ',' << max_z << ','
            << (verdict.pass ? 1 : 0) << "\n";
      }
      emit(csv.str(), sweep_opt.out);
      return all_pass ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
