// Command-line front end; links only the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "translev.h"

namespace {

int status_to_exit(translev_status status) {
  switch (status) {
    case TRANSLEV_OK: return 0;
    case TRANSLEV_ERR_TOLERANCE: return 1;
    case TRANSLEV_ERR_CONFIG: return 2;
    case TRANSLEV_ERR_INVALID: return 2;
    default: return 3;
  }
}

struct CommonArgs {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "experiment config JSON file")->required();
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--threads", args.threads, "path-level worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "override noise.seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
}

int open_experiment(const CommonArgs& args, translev_experiment** out) {
  translev_status st = translev_experiment_create_from_file(args.config.c_str(), out);
  if (st != TRANSLEV_OK) {
    std::fprintf(stderr, "error: %s\n", translev_last_error());
    return status_to_exit(st);
  }
  if (args.seed_set) {
    st = translev_experiment_set_seed(*out, args.seed);
    if (st != TRANSLEV_OK) {
      std::fprintf(stderr, "error: %s\n", translev_last_error());
      return status_to_exit(st);
    }
  }
  st = translev_experiment_set_threads(*out, args.threads);
  if (st != TRANSLEV_OK) {
    std::fprintf(stderr, "error: %s\n", translev_last_error());
    return status_to_exit(st);
  }
  return -1;
}

int run_and_report(const CommonArgs& args, const char* what,
                   translev_status (*runner)(translev_experiment*, const char*)) {
  translev_experiment* experiment = nullptr;
  const int early = open_experiment(args, &experiment);
  if (early >= 0) return early;
  std::printf("%s: config %s -> %s\n", what, translev_experiment_hash(experiment),
              args.out.c_str());
  const translev_status st = runner(experiment, args.out.c_str());
  if (st != TRANSLEV_OK) std::fprintf(stderr, "%s: %s\n", what, translev_last_error());
  translev_experiment_free(experiment);
  return status_to_exit(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"translev: Levy-driven SDEs and their translation-invariant SPDE solutions"};
  app.require_subcommand(1);

  CommonArgs sim_args, ver_args, ineq_args, hyp_args;
  std::string suite = "all";

  CLI::App* sim = app.add_subcommand("simulate", "run Monte Carlo paths and emit trajectories");
  add_common(sim, sim_args);
  CLI::App* ver = app.add_subcommand("verify", "correspondence / ito / uniqueness suites");
  add_common(ver, ver_args);
  ver->add_option("--suite", suite, "correspondence|ito|uniqueness|all");
  CLI::App* ineq = app.add_subcommand("inequalities", "numerical inequality certification");
  add_common(ineq, ineq_args);
  CLI::App* hyp = app.add_subcommand("hypotheses", "coefficient hypothesis report");
  add_common(hyp, hyp_args);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return run_and_report(sim_args, "simulate", translev_run_simulate);
  if (ver->parsed()) {
    translev_experiment* experiment = nullptr;
    const int early = open_experiment(ver_args, &experiment);
    if (early >= 0) return early;
    std::printf("verify[%s]: config %s -> %s\n", suite.c_str(),
                translev_experiment_hash(experiment), ver_args.out.c_str());
    const translev_status st =
        translev_run_verify(experiment, suite.c_str(), ver_args.out.c_str());
    if (st != TRANSLEV_OK) std::fprintf(stderr, "verify: %s\n", translev_last_error());
    translev_experiment_free(experiment);
    return status_to_exit(st);
  }
  if (ineq->parsed()) return run_and_report(ineq_args, "inequalities", translev_run_inequalities);
  if (hyp->parsed()) return run_and_report(hyp_args, "hypotheses", translev_run_hypotheses);
  return 2;
}
