#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace qcdma {

using Amplitudes = Eigen::VectorXcd;

/// Uniform sampling of `bins` consecutive time bins, each carrying
/// `chips_per_bin` chips of `samples_per_chip` samples. The step is defined
/// as bin_duration / samples_per_bin so that dt * samples_per_bin == T.
struct TimeGrid {
  int chips_per_bin = 1;
  int samples_per_chip = 2;
  int bins = 1;
  double bin_duration = 1.0;

  static TimeGrid make(int chips_per_bin, int samples_per_chip, int bins,
                       double bin_duration = 1.0);

  int samples_per_bin() const { return chips_per_bin * samples_per_chip; }
  Eigen::Index size() const { return Eigen::Index{samples_per_bin()} * bins; }
  double dt() const { return bin_duration / samples_per_bin(); }
  double duration() const { return bin_duration * bins; }
  double time(Eigen::Index k) const { return static_cast<double>(k) * dt(); }
  double df() const { return 1.0 / (static_cast<double>(size()) * dt()); }
  Eigen::Index bin_begin(int bin) const { return Eigen::Index{samples_per_bin()} * bin; }

  /// Same layout with a different number of bins.
  TimeGrid with_bins(int count) const { return make(chips_per_bin, samples_per_chip, count, bin_duration); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Sampled single-photon probability amplitude on a grid.
struct Wavefunction {
  TimeGrid grid;
  Amplitudes amplitudes;

  Wavefunction() = default;
  explicit Wavefunction(const TimeGrid& g) : grid(g), amplitudes(Amplitudes::Zero(g.size())) {}
  Wavefunction(const TimeGrid& g, Amplitudes a);

  double norm_squared() const;
};

/// Discrete sum |a_k|^2 dt over any complex Eigen expression.
template <typename Derived>
double squared_norm(const Eigen::MatrixBase<Derived>& a, double dt) {
  return a.squaredNorm() * dt;
}

/// (2 pi sigma^2)^(-1/4) e^(i phase) e^(-(t - center)^2 / (4 sigma^2)), rescaled
/// so the discrete norm is exactly one. Throws if more than 1e-6 of the
/// analytic mass falls outside the grid or sigma <= 0.
Wavefunction gaussian_packet(const TimeGrid& grid, double center, double width, double phase = 0.0);

/// Packet width used for every emitted photon, 0.1 T.
inline constexpr double kPacketWidthRatio = 0.1;

enum class TimeBinLabel { zero, one, plus, minus };

std::string_view to_string(TimeBinLabel label);
TimeBinLabel parse_timebin_label(std::string_view text);

struct TimeBinState {
  TimeBinLabel label;
  Wavefunction wavefunction;
};

/// |0> is a packet centred at T/2, |1> at 3T/2, |+-> = (|0> +- |1>)/sqrt 2.
/// The grid must span at least two bins.
TimeBinState make_timebin_state(TimeBinLabel label, const TimeGrid& grid, double phase = 0.0);

/// One unit-norm packet centred in every bin whose bit is 1; grid.bins must
/// equal bits.size().
Wavefunction encode_bitstring(std::span<const int> bits, const TimeGrid& grid);

/// sum_k conj(a_k) b_k dt. Throws std::invalid_argument on a grid mismatch.
std::complex<double> overlap(const Wavefunction& a, const Wavefunction& b);

/// |<output/|output| , input>|^2. Throws std::domain_error when the output
/// norm is below 1e-12.
double fidelity(const Wavefunction& input, const Wavefunction& output);

/// Continuous-transform scaling: values = dt * DFT(amplitudes), so that
/// sum |phi|^2 dt == sum |Phi|^2 df.
struct Spectrum {
  Amplitudes values;
  double df = 0.0;
};

Spectrum spectrum(const Wavefunction& w);
Wavefunction inverse_spectrum(const Spectrum& s, const TimeGrid& grid);

/// Signed DFT frequencies m * df with the upper half folded to negative.
Eigen::VectorXd frequency_axis(const TimeGrid& grid);

/// Integral of a sampled density over each bin of the grid.
Eigen::VectorXd bin_integrals(const Eigen::VectorXd& density, const TimeGrid& grid);

/// CSV columns t,re,im,density with a header row.
void write_waveform_csv(std::ostream& os, const Wavefunction& w);

}  // namespace qcdma
