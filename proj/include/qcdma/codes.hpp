#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

namespace qcdma {

/// Chip values, each +1 or -1.
using ChipVector = Eigen::VectorXi;

/// Fibonacci LFSR description. Tap t feeds register t-1 (1-based) into the
/// XOR feedback; the register shifts toward index n-1, which is the output.
struct LfsrSpec {
  int n = 0;
  std::vector<int> taps;
  std::vector<std::uint8_t> seed;

  /// Built-in primitive taps for n and the seed [1,0,...,0].
  static LfsrSpec canonical(int n);
};

/// Feedback taps of one primitive polynomial for 2 <= n <= 16.
const std::vector<int>& primitive_taps(int n);

/// One spreading code: an m-sequence of length 2^n - 1 rotated by `shift`.
class Code {
 public:
  /// Throws std::invalid_argument unless chips are +-1, the length is
  /// 2^n - 1, and the chip sum is +-1.
  Code(ChipVector chips, int exponent, int shift = 0);

  const ChipVector& chips() const { return chips_; }
  int length() const { return static_cast<int>(chips_.size()); }
  int exponent() const { return exponent_; }
  int shift() const { return shift_; }
  int operator[](int k) const { return chips_[k]; }

  friend bool operator==(const Code& a, const Code& b) {
    return a.shift_ == b.shift_ && a.exponent_ == b.exponent_ && a.chips_ == b.chips_;
  }

 private:
  ChipVector chips_;
  int exponent_;
  int shift_;
};

struct CodeFamily {
  LfsrSpec spec;
  Code base;
  std::vector<Code> members;

  int exponent() const { return spec.n; }
  int spreading_factor() const { return base.length(); }
};

/// Output bits of one full LFSR period. Throws on an all-zero seed or when the
/// state cycle is shorter than 2^n - 1 (non-primitive feedback).
std::vector<std::uint8_t> lfsr_period_bits(const LfsrSpec& spec);

/// Number of steps until the register returns to its seed.
std::int64_t lfsr_period(const LfsrSpec& spec);

/// m-sequence with bit b mapped to chip 1 - 2b.
Code generate_mseq(const LfsrSpec& spec);

/// Rotates left by i (mod S): result[k] = code[(k + i) mod S].
Code cyclic_shift(const Code& code, std::int64_t i);

/// Sum of chip products. Throws std::invalid_argument on a length mismatch.
int correlation(const Code& a, const Code& b);

/// Users 0..count-1 receive shifts 0..count-1. Throws if count exceeds S.
CodeFamily build_family(const LfsrSpec& spec, int count);

/// Full S x S correlation matrix over every shift of the sequence.
Eigen::MatrixXi correlation_matrix(const LfsrSpec& spec);

void write_code_text(std::ostream& os, const Code& code);
nlohmann::json code_to_json(const Code& code, const LfsrSpec& spec);

}  // namespace qcdma
