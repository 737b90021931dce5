#include "qcdma/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qcdma/fft.hpp"

namespace qcdma {

double FbgFilter::reflectance(double f) const {
  const double d = f - center_freq;
  if (shape == FilterShape::brickwall) return std::abs(d) <= sigma ? 1.0 : 0.0;
  return std::exp(-d * d / (4.0 * sigma * sigma));
}

double FbgFilter::transmittance(double f) const {
  const double r = reflectance(f);
  return std::sqrt(std::max(0.0, 1.0 - r * r));
}

std::string_view to_string(FilterRule rule) {
  switch (rule) {
    case FilterRule::wide: return "wide";
    case FilterRule::narrow: return "narrow";
    case FilterRule::brickwall: return "brickwall";
  }
  return "?";
}

FilterRule parse_filter_rule(std::string_view text) {
  if (text == "wide") return FilterRule::wide;
  if (text == "narrow") return FilterRule::narrow;
  if (text == "brickwall") return FilterRule::brickwall;
  throw std::invalid_argument("unknown filter rule '" + std::string(text) + "'");
}

double packet_spectral_width(double sigma_t) { return 1.0 / (4.0 * std::numbers::pi * sigma_t); }

FbgFilter matched_filter(FilterRule rule, double packet_width) {
  constexpr double kRatio = 8.0 * std::numbers::pi / 5.0;
  const double sigma_f = packet_spectral_width(packet_width);
  switch (rule) {
    case FilterRule::wide: return {0.0, kRatio * sigma_f, FilterShape::gaussian};
    case FilterRule::narrow: return {0.0, sigma_f / kRatio, FilterShape::gaussian};
    case FilterRule::brickwall: return {0.0, 6.0 * sigma_f, FilterShape::brickwall};
  }
  throw std::invalid_argument("unknown filter rule");
}

Modulator::Modulator(Code code, int samples_per_chip)
    : code_(std::move(code)), samples_per_chip_(samples_per_chip) {
  if (samples_per_chip_ < 1) throw std::invalid_argument("samples per chip must be positive");
}

Eigen::VectorXd Modulator::waveform(const TimeGrid& grid) const {
  if (grid.chips_per_bin != code_.length() || grid.samples_per_chip != samples_per_chip_) {
    throw std::invalid_argument("bin boundaries do not align with the modulator's chips");
  }
  const auto per_bin = Eigen::Index{grid.samples_per_bin()};
  Eigen::VectorXd one_bin(per_bin);
  for (int j = 0; j < code_.length(); ++j) {
    one_bin.segment(Eigen::Index{j} * samples_per_chip_, samples_per_chip_).setConstant(code_[j]);
  }
  return one_bin.replicate(grid.bins, 1);
}

Wavefunction spread(const Wavefunction& w, const Modulator& m) {
  Wavefunction out = w;
  out.amplitudes.array() *= m.waveform(w.grid).array().cast<std::complex<double>>();
  return out;
}

Wavefunction spread(const Wavefunction& w, const Modulator& m, int bin_index) {
  if (bin_index < 0 || bin_index >= w.grid.bins) throw std::invalid_argument("bin index outside the grid");
  const Eigen::VectorXd chips = m.waveform(w.grid.with_bins(1));
  Wavefunction out = w;
  out.amplitudes.segment(w.grid.bin_begin(bin_index), chips.size()).array() *=
      chips.array().cast<std::complex<double>>();
  return out;
}

SplitResult fbg_split(const Wavefunction& w, const FbgFilter& filter) {
  const Spectrum s = spectrum(w);
  const Eigen::VectorXd f = frequency_axis(w.grid);
  Spectrum reflected{s.values, s.df};
  Spectrum transmitted{s.values, s.df};
  for (Eigen::Index m = 0; m < f.size(); ++m) {
    reflected.values[m] *= filter.reflectance(f[m]);
    transmitted.values[m] *= filter.transmittance(f[m]);
  }
  return {inverse_spectrum(reflected, w.grid), inverse_spectrum(transmitted, w.grid)};
}

MuxStageResult mux_stage(std::span<const Wavefunction> bus, const Wavefunction& new_photon,
                         const Modulator& m, const FbgFilter& filter) {
  MuxStageResult out;
  out.bus.reserve(bus.size() + 1);
  out.losses.reserve(bus.size() + 1);
  for (const Wavefunction& photon : bus) {
    if (!(photon.grid == new_photon.grid)) throw std::invalid_argument("bus photon on a different grid");
    SplitResult parts = fbg_split(spread(photon, m), filter);
    out.losses.push_back(parts.reflected.norm_squared());
    out.bus.push_back(despread(parts.transmitted, m));
  }
  SplitResult parts = fbg_split(new_photon, filter);
  out.losses.push_back(parts.transmitted.norm_squared());
  out.bus.push_back(spread(parts.reflected, m));
  return out;
}

DemuxStageResult demux_stage(std::span<const Wavefunction> bus, const Modulator& m,
                             const FbgFilter& filter) {
  DemuxStageResult out;
  out.delivered.reserve(bus.size());
  out.remaining.reserve(bus.size());
  for (const Wavefunction& photon : bus) {
    SplitResult parts = fbg_split(despread(photon, m), filter);
    out.delivered.push_back(std::move(parts.reflected));
    out.remaining.push_back(spread(parts.transmitted, m));
  }
  return out;
}

StageKernel::StageKernel(const TimeGrid& grid, const FbgFilter& filter) : grid_(grid) {
  const Eigen::VectorXd f = frequency_axis(grid);
  reflect_.resize(f.size());
  transmit_.resize(f.size());
  for (Eigen::Index m = 0; m < f.size(); ++m) {
    reflect_[m] = filter.reflectance(f[m]);
    transmit_[m] = filter.transmittance(f[m]);
  }
}

double StageKernel::pass(Amplitudes& photon, const Eigen::VectorXd& chips, Amplitudes* reflected) const {
  const auto n = static_cast<double>(photon.size());
  // Energy of a DFT-domain vector X in units of sum |phi|^2 dt.
  const double energy_scale = grid_.dt() / n;
  Amplitudes spread_in = photon.array() * chips.array().cast<std::complex<double>>();
  Amplitudes freq;
  fft::forward(spread_in, freq);

  Amplitudes band = freq.array() * reflect_.array().cast<std::complex<double>>();
  const double reflected_energy = band.squaredNorm() * energy_scale;
  if (reflected != nullptr) {
    fft::backward(band, *reflected);
    *reflected /= n;
  }
  band = freq.array() * transmit_.array().cast<std::complex<double>>();
  fft::backward(band, spread_in);
  photon = spread_in.array() * (chips.array() / n).cast<std::complex<double>>();
  return reflected_energy;
}

double StageKernel::insert(Amplitudes& photon, const Eigen::VectorXd& chips) const {
  const auto n = static_cast<double>(photon.size());
  Amplitudes freq;
  fft::forward(photon, freq);
  Amplitudes band = freq.array() * transmit_.array().cast<std::complex<double>>();
  const double leaked = band.squaredNorm() * grid_.dt() / n;
  band = freq.array() * reflect_.array().cast<std::complex<double>>();
  Amplitudes time;
  fft::backward(band, time);
  photon = time.array() * (chips.array() / n).cast<std::complex<double>>();
  return leaked;
}

}  // namespace qcdma
