#include "qcdma/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "qcdma/parallel.hpp"

namespace qcdma {
namespace {

MetricResult make_result(Metric metric, const NetworkConfig& config, std::span<const double> values,
                         std::uint64_t seed) {
  const Estimate e = summarize(values);
  MetricResult r;
  r.metric = metric;
  r.spreading_factor = config.spreading_factor();
  r.users = config.users;
  r.trials = e.samples;
  r.mean = e.mean;
  r.standard_error = e.standard_error;
  r.seed = seed;
  return r;
}

double draw_phase(Rng& rng, bool in_phase) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double value = phase(rng);
  return in_phase ? 0.0 : value;
}

}  // namespace

Estimate summarize(std::span<const double> values) {
  Estimate e;
  e.samples = static_cast<int>(values.size());
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - e.mean) * (v - e.mean);
    const double var = sq / static_cast<double>(values.size() - 1);
    e.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

std::string MetricResult::name() const {
  std::string base;
  switch (metric) {
    case Metric::photon_loss: base = "photon_loss"; break;
    case Metric::crosstalk: base = "crosstalk"; break;
    case Metric::fidelity: base = "fidelity"; break;
    case Metric::infidelity: base = "infidelity"; break;
  }
  if (state) base += "_" + std::string(to_string(*state));
  return base;
}

LossResult photon_loss_probability(const NetworkConfig& config, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const Network net(config);
  const Wavefunction packet =
      gaussian_packet(net.photon_grid(), 0.5 * config.bin_duration, config.packet_width());

  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(values.size(), [&](std::size_t i) {
    Rng rng = trial_rng(seed, i);
    const int user = std::uniform_int_distribution<int>(0, config.users - 1)(rng);
    // The bin only labels the trial: every bin sees the same code pattern.
    std::uniform_int_distribution<int>(0, config.bits_per_user - 1)(rng);
    const double phase = draw_phase(rng, config.in_phase);
    const Wavefunction photon(net.photon_grid(), packet.amplitudes * std::polar(1.0, phase));
    PropagationOptions opts;
    opts.stop_after = user;
    const PhotonRecord rec = net.propagate_photon(photon, user, opts);
    values[i] = std::clamp(1.0 - rec.delivered[static_cast<std::size_t>(user)], 0.0, 1.0);
  });
  return make_result(Metric::photon_loss, config, values, seed);
}

CrosstalkResult crosstalk_probability(const NetworkConfig& config, int runs, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  const Network net(config);
  const Wavefunction packet =
      gaussian_packet(net.photon_grid(), 0.5 * config.bin_duration, config.packet_width());
  const int users = config.users;
  const int bins = config.bits_per_user;

  std::vector<double> values(static_cast<std::size_t>(runs));
  parallel_for(values.size(), [&](std::size_t i) {
    Rng rng = trial_rng(seed, i);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> bits(static_cast<std::size_t>(users * bins));
    std::vector<std::pair<int, int>> empty;
    constexpr int kMaxDraws = 1000;
    for (int draw = 0; draw < kMaxDraws && empty.empty(); ++draw) {
      for (auto& b : bits) b = coin(rng) ? 1 : 0;
      for (int u = 0; u < users; ++u) {
        for (int b = 0; b < bins; ++b) {
          if (bits[static_cast<std::size_t>(u * bins + b)] == 0) empty.emplace_back(u, b);
        }
      }
    }
    if (empty.empty()) throw std::runtime_error("no empty channel bin after repeated draws");
    const auto [receiver, bin] =
        empty[std::uniform_int_distribution<std::size_t>(0, empty.size() - 1)(rng)];

    double received = 0.0;
    for (int u = 0; u < users; ++u) {
      if (bits[static_cast<std::size_t>(u * bins + bin)] != 1) continue;
      const double phase = draw_phase(rng, config.in_phase);
      const Wavefunction photon(net.photon_grid(), packet.amplitudes * std::polar(1.0, phase));
      PropagationOptions opts;
      opts.stop_after = receiver;
      received += net.propagate_photon(photon, u, opts).delivered[static_cast<std::size_t>(receiver)];
    }
    values[i] = std::clamp(received, 0.0, 1.0);
  });
  return make_result(Metric::crosstalk, config, values, seed);
}

std::string_view to_string(Background b) { return b == Background::silent ? "silent" : "random"; }

Background parse_background(std::string_view text) {
  if (text == "silent") return Background::silent;
  if (text == "random") return Background::random;
  throw std::invalid_argument("unknown background '" + std::string(text) + "'");
}

std::vector<FidelityResult> state_fidelity_sweep(const NetworkConfig& config,
                                                 std::span<const TimeBinLabel> states, int trials,
                                                 std::uint64_t seed, Background background) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const Network net(config, 2);
  const TimeGrid& window = net.photon_grid();
  constexpr std::array kLabels = {TimeBinLabel::zero, TimeBinLabel::one, TimeBinLabel::plus,
                                  TimeBinLabel::minus};

  std::vector<FidelityResult> out;
  for (TimeBinLabel label : states) {
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(values.size(), [&](std::size_t i) {
      Rng rng = trial_rng(seed, i);
      const int user = std::uniform_int_distribution<int>(0, config.users - 1)(rng);
      const double phase = draw_phase(rng, config.in_phase);
      const Wavefunction input = make_timebin_state(label, window, phase).wavefunction;

      Wavefunction output(window);
      PropagationOptions opts;
      opts.deliver_only = user;
      opts.stop_after = user;
      opts.on_delivery = [&](int, const Amplitudes& c) { output.amplitudes += c; };
      net.propagate_photon(input, user, opts);

      if (background == Background::random) {
        std::uniform_int_distribution<std::size_t> pick(0, kLabels.size() - 1);
        for (int q = 0; q < config.users; ++q) {
          if (q == user) continue;
          const TimeBinLabel other = kLabels[pick(rng)];
          const double other_phase = draw_phase(rng, config.in_phase);
          net.propagate_photon(make_timebin_state(other, window, other_phase).wavefunction, q, opts);
        }
      }
      values[i] = std::clamp(fidelity(input, output), 0.0, 1.0);
    });

    FidelityResult r{label, make_result(Metric::fidelity, config, values, seed), {}};
    r.fidelity.state = label;
    r.infidelity = r.fidelity;
    r.infidelity.metric = Metric::infidelity;
    r.infidelity.mean = 1.0 - r.fidelity.mean;
    out.push_back(std::move(r));
  }
  return out;
}

DensityTrace photon_number_density(const PropagationResult& result) {
  DensityTrace trace;
  trace.grid = result.grid;
  trace.channels = result.density;
  trace.bin_integrals.resize(static_cast<Eigen::Index>(result.density.size()), result.grid.bins);
  for (std::size_t k = 0; k < result.density.size(); ++k) {
    trace.bin_integrals.row(static_cast<Eigen::Index>(k)) = bin_integrals(result.density[k], result.grid).transpose();
  }
  return trace;
}

}  // namespace qcdma
