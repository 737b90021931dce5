#include "qcdma/network.hpp"

#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "qcdma/parallel.hpp"

namespace qcdma {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::chain: return "chain";
    case Topology::ring: return "ring";
  }
  return "?";
}

Topology parse_topology(std::string_view text) {
  if (text == "chain") return Topology::chain;
  if (text == "ring") return Topology::ring;
  throw std::invalid_argument("unknown topology '" + std::string(text) + "'");
}

TimeGrid NetworkConfig::grid() const {
  return TimeGrid::make(spreading_factor(), samples_per_chip, bits_per_user, bin_duration);
}

void NetworkConfig::validate() const {
  if (exponent < 2 || exponent > 20) throw std::invalid_argument("exponent n must be in [2, 20]");
  if (users < 1) throw std::invalid_argument("users must be at least 1");
  if (users > spreading_factor()) {
    throw std::invalid_argument("users (" + std::to_string(users) + ") exceeds the spreading factor S = " +
                                std::to_string(spreading_factor()));
  }
  if (samples_per_chip < 1) throw std::invalid_argument("samples per chip must be positive");
  if (bits_per_user < 1) throw std::invalid_argument("bits per user must be positive");
  if (!(bin_duration > 0.0)) throw std::invalid_argument("bin duration must be positive");
}

nlohmann::json to_json(const NetworkConfig& c) {
  return {{"users", c.users},
          {"n", c.exponent},
          {"S", c.spreading_factor()},
          {"samples_per_chip", c.samples_per_chip},
          {"bits_per_user", c.bits_per_user},
          {"bin_duration", c.bin_duration},
          {"packet_width", c.packet_width()},
          {"filter_rule", to_string(c.filter_rule)},
          {"topology", to_string(c.topology)},
          {"in_phase", c.in_phase}};
}

double PhotonRecord::delivered_total() const {
  double sum = 0.0;
  for (double d : delivered) sum += d;
  return sum;
}

double PhotonRecord::ledger_error() const { return lost + delivered_total() + residual - initial; }

namespace {

const NetworkConfig& checked(const NetworkConfig& config) {
  config.validate();
  return config;
}

}  // namespace

Network::Network(const NetworkConfig& config, int photon_bins)
    : config_(checked(config)),
      family_(build_family(LfsrSpec::canonical(config.exponent), config.users)),
      filter_(matched_filter(config.filter_rule, config.packet_width())),
      kernel_(config.grid().with_bins(photon_bins), filter_) {
  chips_.reserve(family_.members.size());
  for (const Code& code : family_.members) {
    chips_.push_back(Modulator(code, config_.samples_per_chip).waveform(kernel_.grid()));
  }
}

StagePlan Network::plan(int user) const {
  const int n = config_.users;
  if (user < 0 || user >= n) throw std::invalid_argument("user index out of range");
  StagePlan p;
  if (config_.topology == Topology::chain) {
    for (int q = user + 1; q < n; ++q) p.mux.push_back(q);
    for (int k = 0; k < n; ++k) p.demux.push_back(k);
  } else {
    for (int j = 1; j < n; ++j) p.mux.push_back((user + j) % n);
    for (int j = 1; j <= n; ++j) p.demux.push_back((user + j) % n);
  }
  return p;
}

PhotonRecord Network::propagate_photon(const Wavefunction& photon, int user,
                                       const PropagationOptions& options) const {
  if (!(photon.grid == kernel_.grid())) throw std::invalid_argument("photon window does not match the network grid");
  const StagePlan stages = plan(user);

  PhotonRecord rec;
  rec.user = user;
  rec.initial = photon.norm_squared();
  rec.delivered.assign(static_cast<std::size_t>(config_.users), 0.0);

  Amplitudes amp = photon.amplitudes;
  rec.lost += kernel_.insert(amp, chips(user));
  for (int q : stages.mux) {
    rec.lost += kernel_.pass(amp, chips(q));
    ++rec.foreign_stages;
  }

  bool own_reached = false;
  Amplitudes component;
  for (int k : stages.demux) {
    const bool want = options.on_delivery && (options.deliver_only < 0 || options.deliver_only == k);
    const double energy = kernel_.pass(amp, chips(k), want ? &component : nullptr);
    if (want) options.on_delivery(k, component);
    rec.delivered[static_cast<std::size_t>(k)] += energy;
    if (k == user) own_reached = true;
    if (!own_reached) ++rec.foreign_stages;
    if (k == options.stop_after) break;
  }

  rec.wavefunction = Wavefunction(kernel_.grid(), std::move(amp));
  const double remaining = rec.wavefunction.norm_squared();
  const bool complete = options.stop_after < 0 || stages.demux.back() == options.stop_after;
  if (complete) {
    // Nothing lies beyond the last drop stage.
    rec.lost += remaining;
  } else {
    rec.residual = remaining;
  }
  return rec;
}

PropagationResult propagate(const NetworkConfig& config, const std::vector<std::vector<int>>& bits,
                            std::uint64_t seed) {
  config.validate();
  if (static_cast<int>(bits.size()) != config.users) {
    throw std::invalid_argument("need one bit string per user");
  }
  for (const auto& row : bits) {
    if (static_cast<int>(row.size()) != config.bits_per_user) {
      throw std::invalid_argument("every bit string must hold bits_per_user bits");
    }
    for (int b : row) {
      if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
    }
  }

  const Network net(config);
  const TimeGrid grid = config.grid();
  const TimeGrid window = net.photon_grid();
  const Wavefunction packet = gaussian_packet(window, 0.5 * config.bin_duration, config.packet_width());

  // Phases are drawn serially so they do not depend on the worker count.
  Rng rng = trial_rng(seed, 0);
  std::uniform_real_distribution<double> uniform_phase(0.0, 2.0 * std::numbers::pi);
  std::vector<std::vector<double>> phase(bits.size(), std::vector<double>(config.bits_per_user, 0.0));
  for (int u = 0; u < config.users; ++u) {
    for (int b = 0; b < config.bits_per_user; ++b) {
      if (bits[u][b] == 1 && !config.in_phase) phase[u][b] = uniform_phase(rng);
    }
  }

  PropagationResult out;
  out.grid = grid;
  out.density.assign(static_cast<std::size_t>(config.users), Eigen::VectorXd::Zero(grid.size()));
  std::vector<std::vector<PhotonRecord>> per_bin(static_cast<std::size_t>(config.bits_per_user));
  const auto len = Eigen::Index{grid.samples_per_bin()};

  // Photons of different bins never share samples, so bins run concurrently
  // and each bin accumulates its users in a fixed order.
  parallel_for(static_cast<std::size_t>(config.bits_per_user), [&](std::size_t bin) {
    const auto b = static_cast<int>(bin);
    for (int u = 0; u < config.users; ++u) {
      if (bits[u][b] != 1) continue;
      Wavefunction photon(window, packet.amplitudes * std::polar(1.0, phase[u][b]));
      PropagationOptions opts;
      opts.on_delivery = [&](int receiver, const Amplitudes& c) {
        out.density[static_cast<std::size_t>(receiver)].segment(grid.bin_begin(b), len) +=
            c.cwiseAbs2();
      };
      PhotonRecord rec = net.propagate_photon(photon, u, opts);
      rec.bin = b;
      rec.phase = phase[u][b];
      per_bin[bin].push_back(std::move(rec));
    }
  });

  for (int u = 0; u < config.users; ++u) {
    for (auto& records : per_bin) {
      for (auto& rec : records) {
        if (rec.user == u) out.photons.push_back(std::move(rec));
      }
    }
  }
  return out;
}

double ideal_loss_bound(int users, int spreading_factor) {
  if (users < 1 || spreading_factor < 1) throw std::invalid_argument("users and S must be positive");
  return static_cast<double>(2 * users - 2) / spreading_factor;
}

nlohmann::json run_manifest(const NetworkConfig& config, std::uint64_t seed, const PropagationResult& result) {
  nlohmann::json photons = nlohmann::json::array();
  for (const auto& p : result.photons) {
    photons.push_back({{"user", p.user + 1},
                       {"bin", p.bin},
                       {"phase", p.phase},
                       {"initial", p.initial},
                       {"lost", p.lost},
                       {"residual", p.residual},
                       {"delivered", p.delivered},
                       {"foreign_stages", p.foreign_stages}});
  }
  return {{"config", to_json(config)}, {"seed", seed}, {"photons", std::move(photons)}};
}

}  // namespace qcdma
