#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "siadmm/error.hpp"
#include "siadmm/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replications;
  std::optional<double> rho;
  std::optional<long> n;
  std::optional<std::uint64_t> budget;
  std::optional<double> eta;
  std::optional<double> T;
  std::optional<double> gamma_bar;
  std::vector<double> Gamma;
  std::optional<long> max_outer;
  bool wall_clock = false;
  bool no_trajectories = false;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--replications", o.replications, "number of replications");
  sub->add_option("--rho", o.rho, "penalty parameter");
  sub->add_option("--n", o.n, "problem dimension");
  sub->add_option("--budget", o.budget, "sample budget");
  sub->add_option("--eta", o.eta, "schedule ratio in (0, 1)");
  sub->add_option("--T", o.T, "initial batch scale");
  sub->add_option("--gamma-bar", o.gamma_bar, "l1 weight");
  sub->add_option("--Gamma", o.Gamma, "DSA ball parameter(s)");
  sub->add_option("--max-outer", o.max_outer, "outer iteration cap");
  sub->add_flag("--wall-clock", o.wall_clock, "fill the wall_ms column of trajectories");
  sub->add_flag("--no-trajectories", o.no_trajectories, "skip per-replication CSVs");
}

siadmm::ExperimentConfig resolve(const std::string& kind, const Overrides& o) {
  using siadmm::ExperimentConfig;
  ExperimentConfig c = o.config.empty() ? ExperimentConfig::defaults(kind)
                                        : siadmm::load_config(o.config, kind);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out_dir = *o.out;
  if (o.replications) c.replications = *o.replications;
  if (o.rho) c.rho = *o.rho;
  if (o.n) c.instance.n = *o.n;
  if (o.budget) c.budget = *o.budget;
  if (o.eta) {
    c.eta = *o.eta;
    c.eta_boundary = false;
  }
  if (o.T) c.T = *o.T;
  if (o.gamma_bar) c.instance.gamma_bar = *o.gamma_bar;
  if (!o.Gamma.empty()) c.dsa_gammas = o.Gamma;
  if (o.max_outer) c.max_outer = *o.max_outer;
  if (o.wall_clock) c.wall_clock_columns = true;
  if (o.no_trajectories) c.write_trajectories = false;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic inexact ADMM experiments"};
  app.require_subcommand(1);
  Overrides o;
  std::string chosen;
  for (const auto& kind : siadmm::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    add_flags(sub, o);
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    const auto cfg = resolve(chosen, o);
    const auto res = siadmm::run_experiment(cfg);
    std::cout << res.summary.dump(2) << std::endl;
    if (chosen == "contraction-test" && !res.passed) return 1;
    return 0;
  } catch (const siadmm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const siadmm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
