#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "qcdma/codes.hpp"
#include "qcdma/optics.hpp"
#include "qcdma/signal.hpp"

namespace qcdma {

/// Order in which a photon meets the add and drop stages.
///  chain: user p is added at stage p and crosses the downstream add stages
///         p+1..N, then every drop stage 1..N in order.
///  ring:  every photon crosses all N-1 foreign add stages and all N-1
///         foreign drop stages before its own drop (2N - 2 lossy stages).
enum class Topology { chain, ring };

std::string_view to_string(Topology t);
Topology parse_topology(std::string_view text);

struct NetworkConfig {
  int users = 5;
  int exponent = 10;
  int samples_per_chip = 2;
  int bits_per_user = 8;
  double bin_duration = 1.0;
  FilterRule filter_rule = FilterRule::wide;
  Topology topology = Topology::chain;
  /// Every packet gets phase zero instead of a uniform random phase.
  bool in_phase = false;

  int spreading_factor() const { return (1 << exponent) - 1; }
  double packet_width() const { return kPacketWidthRatio * bin_duration; }
  /// Grid of one user's full bit stream.
  TimeGrid grid() const;
  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

nlohmann::json to_json(const NetworkConfig& config);

struct PhotonRecord {
  int user = 0;
  int bin = 0;
  double phase = 0.0;
  double initial = 0.0;
  /// Energy reflected away at add stages, leaked on insertion, or
  /// transmitted past the photon's own drop stage and lost downstream.
  double lost = 0.0;
  /// Energy still on the bus when propagation stopped.
  double residual = 0.0;
  /// Energy routed to each receiver.
  std::vector<double> delivered;
  /// Lossy foreign stages crossed before reaching the photon's own receiver.
  int foreign_stages = 0;
  /// Bus state when propagation stopped, in the photon's window.
  Wavefunction wavefunction;

  double delivered_total() const;
  /// lost + delivered + residual - initial.
  double ledger_error() const;
};

struct PropagationOptions {
  /// Receives R(c_k * photon) at each drop stage k it is asked for.
  std::function<void(int receiver, const Amplitudes& component)> on_delivery;
  /// Only deliver waveforms to this receiver (-1: all receivers).
  int deliver_only = -1;
  /// Stop after this receiver's drop stage (-1: cross every stage).
  int stop_after = -1;
};

struct StagePlan {
  /// Foreign add stages after the photon's own insertion.
  std::vector<int> mux;
  /// Drop stages in crossing order.
  std::vector<int> demux;
};

/// Codes, modulator waveforms and filter kernels for one configuration,
/// built once and shared read-only by every trial. Each photon propagates on
/// its own window of `photon_bins` bins (its code repeats every bin).
class Network {
 public:
  explicit Network(const NetworkConfig& config, int photon_bins = 1);

  const NetworkConfig& config() const { return config_; }
  const CodeFamily& family() const { return family_; }
  const FbgFilter& filter() const { return filter_; }
  const TimeGrid& photon_grid() const { return kernel_.grid(); }
  const StageKernel& kernel() const { return kernel_; }
  const Eigen::VectorXd& chips(int user) const { return chips_.at(static_cast<std::size_t>(user)); }

  StagePlan plan(int user) const;

  /// Inserts `photon` at `user`'s add stage and carries it through the link.
  PhotonRecord propagate_photon(const Wavefunction& photon, int user,
                                const PropagationOptions& options = {}) const;

 private:
  NetworkConfig config_;
  CodeFamily family_;
  FbgFilter filter_;
  StageKernel kernel_;
  std::vector<Eigen::VectorXd> chips_;
};

struct PropagationResult {
  TimeGrid grid;
  std::vector<PhotonRecord> photons;
  /// Per receiver, sum over photons of |delivered component|^2 on `grid`.
  std::vector<Eigen::VectorXd> density;
};

/// Sends every 1-bit of every user's bit string through the network. Phases
/// are drawn from `seed` in (user, bin) order unless config.in_phase.
PropagationResult propagate(const NetworkConfig& config, const std::vector<std::vector<int>>& bits,
                            std::uint64_t seed);

/// Loss ceiling for a photon crossing 2N - 2 stages that each lose 1/S.
double ideal_loss_bound(int users, int spreading_factor);

/// Run manifest: configuration, seed and the per-photon ledger.
nlohmann::json run_manifest(const NetworkConfig& config, std::uint64_t seed, const PropagationResult& result);

}  // namespace qcdma
