#include <iostream>

#include <CLI11.hpp>

#include "fdsme/errors.hpp"
#include "fdsme/runner.hpp"
#include "fdsme/verify.hpp"

int main(int argc, char** argv) {
  using namespace fdsme;
  CLI::App app{"Stochastic LLG / Schrodinger map laboratory"};
  app.require_subcommand(1);
  CliOptions opt;

  auto common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", opt.config, "JSON run configuration");
    if (need_config) c->required();
    sub->add_option("--seed", opt.seed, "override ensemble.master_seed");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", opt.strict, "treat inconclusive verdicts as failures");
    sub->add_option("--out", opt.out, "output directory");
  };

  auto* run = app.add_subcommand("run", "integrate one ensemble and evaluate its checks");
  common(run, true);
  auto* sweep = app.add_subcommand("sweep", "run every viscosity in sweep.nu");
  common(sweep, true);
  auto* verify = app.add_subcommand("verify", "built-in verification suites");
  common(verify, false);
  verify->add_option("suite", opt.suite, "identities | conservation | stationary | sbm | bound | transforms | all")
      ->check(CLI::IsMember([] {
        auto names = suite_names();
        names.push_back("all");
        return names;
      }()));
  auto* bound = app.add_subcommand("bound", "lower bound on the probability of non-trivial trajectories");
  common(bound, false);
  bound->add_option("--alpha", opt.alpha, "cosine amplitude (ignored with --config)");
  bound->add_option("--k", opt.k, "cosine periods (ignored with --config)");
  auto* transform = app.add_subcommand("transform", "curve and Hashimoto transforms of one trajectory");
  common(transform, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return command_run(opt, std::cout);
    if (sweep->parsed()) return command_sweep(opt, std::cout);
    if (verify->parsed()) return command_verify(opt, std::cout);
    if (bound->parsed()) return command_bound(opt, std::cout);
    if (transform->parsed()) return command_transform(opt, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const TrajectoryError& e) {
    std::cerr << "runtime error (trajectory " << e.trajectory() << ", t = " << e.time()
              << "): " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
