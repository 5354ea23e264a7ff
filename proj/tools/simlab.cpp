// simlab: BER, z_DC, ESR and analysis sweeps from a config file, plus the
// invariant suite.
#include "wptim/experiment_harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (key = value)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "CSV output path (default: config `output`, else stdout)");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

int emit(const std::string& csv, const std::string& path) {
  if (path.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "simlab: cannot write " << path << "\n";
    return 1;
  }
  f << csv;
  return f.good() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-harvesting link-level simulator"};
  app.require_subcommand(1);
  Common c;
  auto* ber = app.add_subcommand("ber", "simulated and union-bound BER at the IR and Eve");
  auto* zdc = app.add_subcommand("zdc", "harvested z_DC versus power split and subbands");
  auto* esr = app.add_subcommand("esr", "ergodic secrecy rate versus SNR");
  auto* analysis = app.add_subcommand("analysis", "analytic versus simulated ABER");
  auto* check = app.add_subcommand("validate", "run the invariant suite");
  for (auto* cmd : {ber, zdc, esr, analysis}) add_common(cmd, c, true);
  add_common(check, c, false);
  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      wptim::ValidationOptions opts;
      if (!c.config.empty()) opts.seed = wptim::load_config(c.config).seed;
      if (c.seed) opts.seed = *c.seed;
      const auto results = wptim::validate(opts);
      const auto report = wptim::format_report(results);
      if (const int rc = emit(report, c.out)) return rc;
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
      return 0;
    }

    auto config = wptim::load_config(c.config);
    if (c.seed) config.seed = *c.seed;
    const std::string out = c.out.empty() ? config.output : c.out;
    if (ber->parsed()) return emit(wptim::ber_csv(wptim::run_ber_sweep(config, c.threads)), out);
    if (zdc->parsed()) return emit(wptim::zdc_csv(wptim::run_zdc_sweep(config, c.threads)), out);
    if (esr->parsed()) return emit(wptim::esr_csv(wptim::run_esr_sweep(config, c.threads)), out);
    if (analysis->parsed()) return emit(wptim::analysis_csv(wptim::run_ber_sweep(config, c.threads)), out);
  } catch (const std::exception& e) {
    std::cerr << "simlab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
