#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qcdma/codes.hpp"
#include "qcdma/signal.hpp"

namespace qcdma {

enum class FilterShape { gaussian, brickwall };

/// Fiber Bragg grating as a lossless two-port: amplitude reflectance R(f)
/// and transmittance T(f) = sqrt(1 - R(f)^2).
///
/// Gaussian: R(f) = exp(-(f - fc)^2 / (4 sigma^2)), so |R|^2 has standard
/// deviation sigma. Brick-wall: R = 1 for |f - fc| <= sigma, else 0.
struct FbgFilter {
  double center_freq = 0.0;
  double sigma = 1.0;
  FilterShape shape = FilterShape::gaussian;

  double reflectance(double f) const;
  double transmittance(double f) const;
};

/// How the grating width follows the photon's spectral width.
///  wide:      sigma = (8 pi / 5) sigma_f
///  narrow:    sigma = (5 / (8 pi)) sigma_f
///  brickwall: rectangular passband of half-width 6 sigma_f
enum class FilterRule { wide, narrow, brickwall };

std::string_view to_string(FilterRule rule);
FilterRule parse_filter_rule(std::string_view text);

/// Standard deviation of |Phi(f)|^2 for a packet of temporal width sigma_t.
double packet_spectral_width(double sigma_t);

FbgFilter matched_filter(FilterRule rule, double packet_width);

/// Ideal 0/pi phase modulator driven by one code, S chips per bin, the code
/// restarting at every bin boundary.
class Modulator {
 public:
  Modulator(Code code, int samples_per_chip);

  const Code& code() const { return code_; }
  int samples_per_chip() const { return samples_per_chip_; }

  /// +-1 per sample across every bin of the grid. Throws if the grid's chip
  /// layout does not match the code.
  Eigen::VectorXd waveform(const TimeGrid& grid) const;

 private:
  Code code_;
  int samples_per_chip_;
};

/// Multiplies every sample of every bin by its chip value.
Wavefunction spread(const Wavefunction& w, const Modulator& m);
/// Same, restricted to one bin.
Wavefunction spread(const Wavefunction& w, const Modulator& m, int bin_index);

/// Chips square to one, so despreading is the same multiplication.
inline Wavefunction despread(const Wavefunction& w, const Modulator& m) { return spread(w, m); }
inline Wavefunction despread(const Wavefunction& w, const Modulator& m, int bin_index) {
  return spread(w, m, bin_index);
}

struct SplitResult {
  Wavefunction reflected;
  Wavefunction transmitted;
};

SplitResult fbg_split(const Wavefunction& w, const FbgFilter& filter);

struct MuxStageResult {
  /// Bus photons in input order followed by the inserted photon.
  std::vector<Wavefunction> bus;
  /// Energy lost by each photon of `bus`, same indexing.
  std::vector<double> losses;
};

/// One add stage. Each bus photon is multiplied by the stage code, its FBG
/// reflection is sent back up the input fiber (lost) and its transmission is
/// multiplied by the code again. The new photon is reflected onto the bus,
/// its transmission leaking out as insertion loss, and leaves spread by the
/// stage code.
MuxStageResult mux_stage(std::span<const Wavefunction> bus, const Wavefunction& new_photon,
                         const Modulator& m, const FbgFilter& filter);

struct DemuxStageResult {
  /// Reflected components routed to this stage's receiver, one per photon.
  std::vector<Wavefunction> delivered;
  /// Transmitted components, re-spread, continuing down the bus.
  std::vector<Wavefunction> remaining;
};

/// One drop stage: bus photons are despread by the stage code and split; the
/// intended photon concentrates in the grating band, others leak into it.
DemuxStageResult demux_stage(std::span<const Wavefunction> bus, const Modulator& m,
                             const FbgFilter& filter);

/// Precomputed filter responses for one grid. Applies stages in place on raw
/// amplitudes and only synthesizes a reflected waveform when asked for it.
class StageKernel {
 public:
  StageKernel(const TimeGrid& grid, const FbgFilter& filter);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::VectorXd& reflectance() const { return reflect_; }

  /// photon <- chips * T(chips * photon). Returns the reflected energy and
  /// writes R(chips * photon) to `reflected` when non-null.
  double pass(Amplitudes& photon, const Eigen::VectorXd& chips, Amplitudes* reflected = nullptr) const;

  /// photon <- chips * R(photon). Returns the transmitted (leaked) energy.
  double insert(Amplitudes& photon, const Eigen::VectorXd& chips) const;

 private:
  TimeGrid grid_;
  Eigen::VectorXd reflect_;
  Eigen::VectorXd transmit_;
};

}  // namespace qcdma
