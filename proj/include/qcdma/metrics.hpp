#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qcdma/network.hpp"
#include "qcdma/signal.hpp"

namespace qcdma {

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int samples = 0;
};

/// Sample mean and standard error (sample std / sqrt n), summed in order.
Estimate summarize(std::span<const double> values);

enum class Metric { photon_loss, crosstalk, fidelity, infidelity };

struct MetricResult {
  Metric metric = Metric::photon_loss;
  std::optional<TimeBinLabel> state;
  int spreading_factor = 0;
  int users = 0;
  int trials = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;

  /// e.g. "photon_loss", "crosstalk", "fidelity_plus".
  std::string name() const;
};

using LossResult = MetricResult;
using CrosstalkResult = MetricResult;

struct FidelityResult {
  TimeBinLabel state;
  MetricResult fidelity;
  MetricResult infidelity;
};

/// Per trial one packet is placed in a uniformly random channel and bin and
/// the trial value is 1 - (energy delivered to its own receiver).
LossResult photon_loss_probability(const NetworkConfig& config, int trials, std::uint64_t seed);

/// Per run every user sends bits_per_user random bits; a uniformly chosen
/// (channel, bin) pair holding a 0 is inspected and the run value is the
/// photon-number density integrated over that bin of that receiver.
CrosstalkResult crosstalk_probability(const NetworkConfig& config, int runs, std::uint64_t seed);

enum class Background { silent, random };

std::string_view to_string(Background b);
Background parse_background(std::string_view text);

/// Per trial the state enters a uniformly random channel with a random
/// global phase; the delivered waveform at that channel's receiver is
/// normalized and compared with the input. With a random background every
/// other user sends a random time-bin state whose leakage into the receiver
/// adds coherently. Trial draws are shared across states.
std::vector<FidelityResult> state_fidelity_sweep(const NetworkConfig& config,
                                                 std::span<const TimeBinLabel> states, int trials,
                                                 std::uint64_t seed, Background background = Background::silent);

struct DensityTrace {
  TimeGrid grid;
  /// One sampled sum_j |phi_j(t)|^2 per receiver.
  std::vector<Eigen::VectorXd> channels;
  /// Receivers x bins matrix of per-bin integrals.
  Eigen::MatrixXd bin_integrals;
};

DensityTrace photon_number_density(const PropagationResult& result);

}  // namespace qcdma
