#include <iostream>

#include <CLI11.hpp>

#include "symdyn/cli/commands.hpp"
#include "symdyn/error.hpp"

int main(int argc, char** argv) {
  using namespace symdyn::cli;
  CLI::App app{"Finite-level thermodynamic formalism for subshifts and factor maps"};
  app.require_subcommand(1);
  std::string config;
  RunOptions opts;
  std::size_t n_max = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  for (const auto& name : subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--n-max", n_max, "override run.n_max")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_flag("--force", opts.force, "ignore the enumeration budget");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommand(name);
  opts.out_dir = out_dir;
  if (sub->count("--n-max")) opts.n_max = n_max;
  if (sub->count("--seed")) opts.seed = seed;
  try {
    const ExperimentConfig cfg = load_config(config);
    const RunResult result = run_subcommand(name, cfg, opts);
    emit(result, opts);
    std::cout << name << ": " << result.verdict << "\n";
    if (result.verdict == "REFUSED") std::cerr << result.report["summary"]["reason"].get<std::string>() << "\n";
    return static_cast<int>(result.exit);
  } catch (const symdyn::Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  }
}
