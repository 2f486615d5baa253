#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pathfec/experiment.hpp"

namespace {

struct Args {
  std::string config;
  std::string method;
  std::string axis;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
};

int dispatch(const std::string& cmd, const Args& args) {
  using namespace pathfec;
  ExperimentConfig cfg = ExperimentConfig::parse_file(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.trials) cfg.trials.max_trials = *args.trials;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) {
      std::cerr << "error: cannot open output file " << args.out << "\n";
      return 2;
    }
    out = &file;
  }

  if (cmd == "exponent")
    run_exponent(cfg, *out);
  else if (cmd == "allocate")
    run_allocate(cfg, args.method.empty() ? "dp" : args.method, *out);
  else if (cmd == "evaluate")
    run_evaluate(cfg, args.method, *out);
  else if (cmd == "simulate")
    run_simulate(cfg, args.method, *out);
  else
    run_sweep(cfg, args.axis, *out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Erasure-coded multipath loss analysis"};
  app.require_subcommand(1);

  Args args;
  for (const char* name :
       {"exponent", "allocate", "evaluate", "simulate", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config, "config file (JSON)")
        ->required();
    sub->add_option("--method", args.method, "allocation method");
    sub->add_option("--axis", args.axis, "sweep axis");
    sub->add_option("--seed", args.seed, "RNG seed override");
    sub->add_option("--trials", args.trials, "Monte Carlo trial cap override");
    sub->add_option("--out", args.out, "output path (default stdout)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    return dispatch(cmd, args);
  } catch (const pathfec::EnumerationLimitError& e) {
    std::cerr << "error: enumeration_limit_exceeded: " << e.what() << "\n";
    return 4;
  } catch (const pathfec::InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return 3;
  } catch (const pathfec::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
