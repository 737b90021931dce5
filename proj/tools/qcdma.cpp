// Command-line front end: one subcommand per experiment.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcdma/experiment.hpp"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kValueFlags[] = {
    {"--n", "n", "LFSR exponent(s), S = 2^n - 1 (comma separated sweep)"},
    {"--users", "users", "user count(s) N (comma separated sweep)"},
    {"--trials", "trials", "Monte Carlo trials per cell (loss, fidelity)"},
    {"--runs", "runs", "runs per cell (crosstalk)"},
    {"--bits-per-user", "bits_per_user", "time bins per user"},
    {"--bits", "bits", "explicit bit strings, one per user (density trace)"},
    {"--seed", "seed", "master RNG seed"},
    {"--samples-per-chip", "samples_per_chip", "time samples per chip"},
    {"--filter-rule", "filter_rule", "wide | narrow | brickwall"},
    {"--background", "background", "silent | random (fidelity)"},
    {"--topology", "topology", "chain | ring"},
    {"--states", "states", "time-bin states: zero,one,plus,minus"},
    {"--stride", "stride", "keep every stride-th sample of a density trace"},
    {"--format", "format", "csv | json | text-table"},
    {"--out", "out", "output file (default stdout)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for spread-spectrum add/drop multiplexing of single photons"};
  app.require_subcommand(1, 1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"loss-table", "photon-loss probability over an (n, N) grid"},
      {"crosstalk-table", "crosstalk probability over an (n, N) grid"},
      {"fidelity-table", "time-bin state fidelity and infidelity"},
      {"density-trace", "photon-number density at every receiver for one run"},
      {"code-check", "verify m-sequence correlation identities"},
      {"codes", "export the spreading codes of a family"},
  };

  std::string config_path;
  std::map<std::string, std::string> values;
  bool in_phase = false;
  bool allow_large = false;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::vector<std::pair<CLI::Option*, std::string>>> options;

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs[name] = sub;
    sub->add_option("--config", config_path, "key: value configuration file");
    for (const Flag& f : kValueFlags) {
      options[name].emplace_back(sub->add_option(f.name, values[f.key], f.help), f.key);
    }
    options[name].emplace_back(sub->add_flag("--in-phase", in_phase, "give every photon the same phase"),
                               "in_phase");
    options[name].emplace_back(sub->add_flag("--allow-large", allow_large, "permit n > 15"), "allow_large");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::string chosen;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) chosen = name;
    }
    qcdma::ExperimentSpec spec = config_path.empty() ? qcdma::ExperimentSpec{} : qcdma::load_config(config_path);
    spec.kind = qcdma::parse_experiment_kind(chosen);
    // Flags given on the command line override the configuration file.
    for (const auto& [opt, key] : options[chosen]) {
      if (opt->count() == 0) continue;
      if (key == "in_phase") {
        spec.in_phase = in_phase;
      } else if (key == "allow_large") {
        spec.allow_large = allow_large;
      } else {
        qcdma::apply_setting(spec, key, values[key]);
      }
    }
    spec.validate();

    bool ok = true;
    if (spec.out.empty()) {
      ok = qcdma::run_experiment(spec, std::cout);
    } else {
      std::ofstream file(spec.out);
      if (!file) {
        std::fprintf(stderr, "error: cannot write output file '%s'\n", spec.out.c_str());
        return 2;
      }
      ok = qcdma::run_experiment(spec, file);
      file.flush();
      if (!file) {
        std::fprintf(stderr, "error: failed while writing '%s'\n", spec.out.c_str());
        return 2;
      }
    }
    if (!ok) {
      std::fprintf(stderr, "error: self-check failed\n");
      return 3;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
