#include "experiment.hpp"

#include "wpcn/errors.hpp"
#include "wpcn/joint.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

namespace ex = wpcn::experiment;

constexpr int kExitConfig = 2;
constexpr int kExitAllFailed = 3;

struct Common {
  std::string config;
  std::string out;
  std::string format = "csv";
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--out", c.out, "report path (default: config output_path, else stdout)");
  cmd->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "replace the config seeds with this one");
}

ex::ExperimentConfig resolve(const Common& c, ex::ExperimentConfig cfg) {
  if (c.seed) {
    cfg.seeds = {*c.seed};
    cfg.source["seeds"] = {*c.seed};
  }
  return cfg;
}

int finish(const ex::Report& report, const ex::ExperimentConfig& cfg, const Common& c) {
  const std::string path = c.out.empty() ? cfg.output_path : c.out;
  ex::emit_report(report, cfg.users, c.format == "json" ? ex::Format::kJson : ex::Format::kCsv,
                  path);
  for (const auto& r : report.records) {
    if (!r.ok) std::cerr << r.scenario_id << ": " << r.error << '\n';
  }
  return report.all_failed() ? kExitAllFailed : 0;
}

int run_convergence(double tau, const std::string& out_path) {
  const wpcn::ChannelSet ch = wpcn::fixture_channels();
  const wpcn::SystemParams prm;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "init,iteration,rho,gamma\n";
  const std::pair<const char*, wpcn::BeamInit> inits[] = {
      {"channel-weighted", wpcn::BeamInit::kChannelWeighted}, {"uniform", wpcn::BeamInit::kUniform}};
  for (const auto& [name, init] : inits) {
    wpcn::AlternatingOptions opts;
    opts.init = init;
    const wpcn::AlternatingResult res = wpcn::alternating_optimize(tau, ch, prm, opts);
    for (std::size_t i = 0; i < res.rho_trace.size(); ++i) {
      const double rho = res.rho_trace[i];
      out << name << ',' << i << ',' << ex::format_number(rho) << ','
          << ex::format_number(1.0 / rho) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min throughput solvers for multi-antenna wireless powered networks"};
  app.require_subcommand(1);

  Common solve_args;
  auto* solve = app.add_subcommand("solve", "run one scenario (one record per seed)");
  add_common(solve, solve_args, true);

  Common sweep_args;
  auto* sweep = app.add_subcommand("sweep", "run the sweep described in the config");
  add_common(sweep, sweep_args, true);

  Common table_args;
  auto* table1 = app.add_subcommand("table1", "fixture, optimal solver, tau = 0.5");
  add_common(table1, table_args, false);

  double conv_tau = 0.5;
  std::string conv_out;
  auto* conv = app.add_subcommand("convergence", "rho per alternating iteration, both initializations");
  conv->add_option("--tau", conv_tau, "time split")->check(CLI::Range(0.0, 1.0));
  conv->add_option("--out", conv_out, "CSV path (default stdout)");

  std::string fixture_out;
  auto* fixture = app.add_subcommand("fixture", "export the reference channel matrix as CSV");
  fixture->add_option("--out", fixture_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) {
      const auto cfg = resolve(solve_args, ex::load_config(solve_args.config));
      return finish(ex::run_scenario(cfg, solve_args.workers), cfg, solve_args);
    }
    if (*sweep) {
      const auto cfg = resolve(sweep_args, ex::load_config(sweep_args.config));
      return finish(ex::run_sweep(cfg, sweep_args.workers), cfg, sweep_args);
    }
    if (*table1) {
      auto cfg = table_args.config.empty() ? ex::table1_config() : ex::load_config(table_args.config);
      cfg = resolve(table_args, std::move(cfg));
      return finish(ex::run_scenario(cfg, table_args.workers), cfg, table_args);
    }
    if (*conv) return run_convergence(conv_tau, conv_out);
    if (*fixture) {
      const wpcn::ChannelSet ch = wpcn::fixture_channels();
      if (fixture_out.empty()) {
        wpcn::write_channels_csv(std::cout, ch.downlink);
      } else {
        std::ofstream file(fixture_out);
        if (!file) throw std::runtime_error("cannot write '" + fixture_out + "'");
        wpcn::write_channels_csv(file, ch.downlink);
      }
      return 0;
    }
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
