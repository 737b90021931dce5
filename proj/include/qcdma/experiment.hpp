#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qcdma/metrics.hpp"
#include "qcdma/network.hpp"
#include "qcdma/optics.hpp"

namespace qcdma {

enum class ExperimentKind { loss_table, crosstalk_table, fidelity_table, density_trace, code_check, codes };
enum class OutputFormat { csv, json, text };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);
std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view text);

/// Everything needed to reproduce one invocation. Defaults reproduce a
/// five-user row at n = 10 with the standard trial counts.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::loss_table;
  std::vector<int> exponents{10};
  std::vector<int> users{5};
  int trials = 200;
  int runs = 128;
  int bits_per_user = 8;
  /// Explicit bit strings for density traces, one per user; empty draws
  /// random bits from the seed.
  std::vector<std::string> bits;
  std::uint64_t seed = 0;
  int samples_per_chip = 2;
  FilterRule filter_rule = FilterRule::wide;
  Background background = Background::silent;
  Topology topology = Topology::chain;
  std::vector<TimeBinLabel> states{TimeBinLabel::zero, TimeBinLabel::one, TimeBinLabel::plus,
                                   TimeBinLabel::minus};
  bool in_phase = false;
  bool allow_large = false;
  /// Keep every stride-th sample in density traces.
  int stride = 1;
  OutputFormat format = OutputFormat::csv;
  std::string out;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  NetworkConfig network(int exponent, int user_count) const;
};

nlohmann::json to_json(const ExperimentSpec& spec);

/// Applies one `key = value` setting. Keys accept '-' or '_' separators.
/// Throws std::invalid_argument naming the key on unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// Parses a plain-text configuration: one `key: value` (or `key = value`)
/// per line, '#' starts a comment, blank lines are ignored.
ExperimentSpec load_config(const std::filesystem::path& path);
ExperimentSpec parse_config(std::istream& in);

/// Per-user bit strings for a density trace: the explicit strings of the
/// spec or, when none are given, seeded random bits.
std::vector<std::vector<int>> trace_bits(const ExperimentSpec& spec, int users);

/// Runs the experiment and writes its artifact, headed by the full effective
/// spec, to `out`. Returns false when a self-check inside the experiment
/// (code identities) fails.
bool run_experiment(const ExperimentSpec& spec, std::ostream& out);

}  // namespace qcdma
