#include "qcdma/signal.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qcdma/fft.hpp"

namespace qcdma {
namespace {

void require_same_grid(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid) || a.amplitudes.size() != b.amplitudes.size()) {
    throw std::invalid_argument("wavefunctions live on different time grids");
  }
}

}  // namespace

TimeGrid TimeGrid::make(int chips_per_bin, int samples_per_chip, int bins, double bin_duration) {
  if (chips_per_bin < 1 || samples_per_chip < 1 || bins < 1) {
    throw std::invalid_argument("time grid needs positive chip, sample and bin counts");
  }
  if (!(bin_duration > 0.0)) throw std::invalid_argument("bin duration must be positive");
  return TimeGrid{chips_per_bin, samples_per_chip, bins, bin_duration};
}

Wavefunction::Wavefunction(const TimeGrid& g, Amplitudes a) : grid(g), amplitudes(std::move(a)) {
  if (amplitudes.size() != grid.size()) {
    throw std::invalid_argument("amplitude count does not match the grid");
  }
}

double Wavefunction::norm_squared() const { return squared_norm(amplitudes, grid.dt()); }

Wavefunction gaussian_packet(const TimeGrid& grid, double center, double width, double phase) {
  if (!(width > 0.0)) throw std::invalid_argument("packet width must be positive");
  const double span = grid.duration();
  if (center < 0.0 || center > span) throw std::invalid_argument("packet centre lies outside the grid");
  const double scale = std::numbers::sqrt2 * width;
  const double outside = 0.5 * std::erfc(center / scale) + 0.5 * std::erfc((span - center) / scale);
  if (outside > 1e-6) {
    throw std::invalid_argument("packet truncated: " + std::to_string(outside) +
                                " of its mass lies outside the grid");
  }

  const double peak = std::pow(2.0 * std::numbers::pi * width * width, -0.25);
  const std::complex<double> rotation = std::polar(1.0, phase);
  Wavefunction w(grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double x = grid.time(k) - center;
    w.amplitudes[k] = rotation * (peak * std::exp(-x * x / (4.0 * width * width)));
  }
  w.amplitudes /= std::sqrt(w.norm_squared());
  return w;
}

std::string_view to_string(TimeBinLabel label) {
  switch (label) {
    case TimeBinLabel::zero: return "zero";
    case TimeBinLabel::one: return "one";
    case TimeBinLabel::plus: return "plus";
    case TimeBinLabel::minus: return "minus";
  }
  return "?";
}

TimeBinLabel parse_timebin_label(std::string_view text) {
  if (text == "zero" || text == "0") return TimeBinLabel::zero;
  if (text == "one" || text == "1") return TimeBinLabel::one;
  if (text == "plus" || text == "+") return TimeBinLabel::plus;
  if (text == "minus" || text == "-") return TimeBinLabel::minus;
  throw std::invalid_argument("unknown time-bin state '" + std::string(text) + "'");
}

TimeBinState make_timebin_state(TimeBinLabel label, const TimeGrid& grid, double phase) {
  if (grid.bins < 2) throw std::invalid_argument("time-bin states need a grid of at least two bins");
  const double t = grid.bin_duration;
  const double width = kPacketWidthRatio * t;
  const Wavefunction early = gaussian_packet(grid, 0.5 * t, width, phase);
  const Wavefunction late = gaussian_packet(grid, 1.5 * t, width, phase);
  switch (label) {
    case TimeBinLabel::zero: return {label, early};
    case TimeBinLabel::one: return {label, late};
    case TimeBinLabel::plus:
    case TimeBinLabel::minus: {
      const double sign = label == TimeBinLabel::plus ? 1.0 : -1.0;
      Wavefunction w(grid, (early.amplitudes + sign * late.amplitudes) / std::numbers::sqrt2);
      // The two packets overlap only in their far tails; renormalize anyway.
      w.amplitudes /= std::sqrt(w.norm_squared());
      return {label, std::move(w)};
    }
  }
  throw std::invalid_argument("unknown time-bin label");
}

Wavefunction encode_bitstring(std::span<const int> bits, const TimeGrid& grid) {
  if (static_cast<std::size_t>(grid.bins) != bits.size()) {
    throw std::invalid_argument("grid bin count must equal the number of bits");
  }
  const TimeGrid one_bin = grid.with_bins(1);
  const Wavefunction packet =
      gaussian_packet(one_bin, 0.5 * grid.bin_duration, kPacketWidthRatio * grid.bin_duration);
  Wavefunction w(grid);
  const auto len = Eigen::Index{grid.samples_per_bin()};
  for (std::size_t b = 0; b < bits.size(); ++b) {
    if (bits[b] != 0 && bits[b] != 1) throw std::invalid_argument("bits must be 0 or 1");
    if (bits[b] == 1) w.amplitudes.segment(grid.bin_begin(static_cast<int>(b)), len) = packet.amplitudes;
  }
  return w;
}

std::complex<double> overlap(const Wavefunction& a, const Wavefunction& b) {
  require_same_grid(a, b);
  // Eigen's dot conjugates its first argument.
  return a.amplitudes.dot(b.amplitudes) * a.grid.dt();
}

double fidelity(const Wavefunction& input, const Wavefunction& output) {
  require_same_grid(input, output);
  const double out_norm = output.norm_squared();
  if (out_norm < 1e-12) throw std::domain_error("output carries no photon amplitude");
  return std::norm(overlap(output, input)) / out_norm;
}

Spectrum spectrum(const Wavefunction& w) {
  Spectrum s;
  fft::forward(w.amplitudes, s.values);
  s.values *= w.grid.dt();
  s.df = w.grid.df();
  return s;
}

Wavefunction inverse_spectrum(const Spectrum& s, const TimeGrid& grid) {
  if (s.values.size() != grid.size()) throw std::invalid_argument("spectrum length does not match the grid");
  Wavefunction w(grid);
  fft::backward(s.values, w.amplitudes);
  w.amplitudes *= grid.df();
  return w;
}

Eigen::VectorXd frequency_axis(const TimeGrid& grid) {
  const Eigen::Index n = grid.size();
  const double df = grid.df();
  Eigen::VectorXd f(n);
  for (Eigen::Index m = 0; m < n; ++m) f[m] = static_cast<double>(m < (n + 1) / 2 ? m : m - n) * df;
  return f;
}

Eigen::VectorXd bin_integrals(const Eigen::VectorXd& density, const TimeGrid& grid) {
  if (density.size() != grid.size()) throw std::invalid_argument("density length does not match the grid");
  Eigen::VectorXd out(grid.bins);
  const auto len = Eigen::Index{grid.samples_per_bin()};
  for (int b = 0; b < grid.bins; ++b) out[b] = density.segment(grid.bin_begin(b), len).sum() * grid.dt();
  return out;
}

void write_waveform_csv(std::ostream& os, const Wavefunction& w) {
  os << "t,re,im,density\n";
  char line[128];
  for (Eigen::Index k = 0; k < w.amplitudes.size(); ++k) {
    const auto a = w.amplitudes[k];
    std::snprintf(line, sizeof line, "%.9g,%.12g,%.12g,%.12g\n", w.grid.time(k), a.real(), a.imag(),
                  std::norm(a));
    os << line;
  }
}

}  // namespace qcdma
