#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "sqg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Forced fractional SQG simulator and estimate checker"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    sub->add_option("--threads", threads, "worker threads for ensembles")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* simulate = add("simulate", "integrate one trajectory and write its ledger");
  auto* verify = add("verify", "check the a-priori bounds on a simulated trajectory");
  auto* holder = add("holder", "Holder seminorm and weighted-modulus runs");
  auto* converge = add("converge", "paired subcritical/critical runs as gamma -> 1");
  auto* lowerbounds = add("lowerbounds", "empirical constants of the pointwise lemmas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sqg::exit_config;
  }

  sqg::CommandOptions opts{out, seed, threads, &std::cerr};
  return sqg::run_guarded([&] {
    const auto config = sqg::load_config(config_path);
    if (simulate->parsed()) return sqg::cmd_simulate(config, opts);
    if (verify->parsed()) return sqg::cmd_verify(config, opts);
    if (holder->parsed()) return sqg::cmd_holder(config, opts);
    if (converge->parsed()) return sqg::cmd_converge(config, opts);
    if (lowerbounds->parsed()) return sqg::cmd_lowerbounds(config, opts);
    return static_cast<int>(sqg::exit_config);
  });
}
