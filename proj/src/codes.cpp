#include "qcdma/codes.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qcdma {
namespace {

// One primitive trinomial/pentanomial per register count (Fibonacci form).
const std::array<std::vector<int>, 17> kPrimitiveTaps = {{
    {},
    {},
    {2, 1},
    {3, 2},
    {4, 3},
    {5, 3},
    {6, 5},
    {7, 6},
    {8, 6, 5, 4},
    {9, 5},
    {10, 7},
    {11, 9},
    {12, 6, 4, 1},
    {13, 4, 3, 1},
    {14, 5, 3, 1},
    {15, 14},
    {16, 15, 13, 4},
}};

std::int64_t full_period(int n) { return (std::int64_t{1} << n) - 1; }

std::uint32_t pack_state(const LfsrSpec& spec) {
  if (spec.n < 2 || spec.n > 30) {
    throw std::invalid_argument("LFSR register count must be in [2, 30], got " +
                                std::to_string(spec.n));
  }
  if (static_cast<int>(spec.seed.size()) != spec.n) {
    throw std::invalid_argument("LFSR seed length must equal n");
  }
  std::uint32_t state = 0;
  for (int i = 0; i < spec.n; ++i) {
    if (spec.seed[i] > 1) throw std::invalid_argument("LFSR seed must be binary");
    state |= static_cast<std::uint32_t>(spec.seed[i]) << i;
  }
  if (state == 0) throw std::invalid_argument("LFSR seed must not be all zero");
  return state;
}

std::uint32_t tap_mask(const LfsrSpec& spec) {
  if (spec.taps.empty()) throw std::invalid_argument("LFSR needs at least one tap");
  std::uint32_t mask = 0;
  for (int t : spec.taps) {
    if (t < 1 || t > spec.n) {
      throw std::invalid_argument("LFSR tap " + std::to_string(t) + " outside 1.." +
                                  std::to_string(spec.n));
    }
    mask |= std::uint32_t{1} << (t - 1);
  }
  return mask;
}

// Shifts toward the output register and returns the emitted bit.
std::uint8_t step(std::uint32_t& state, std::uint32_t mask, int n) {
  const auto out = static_cast<std::uint8_t>((state >> (n - 1)) & 1u);
  const auto feedback = static_cast<std::uint32_t>(__builtin_parity(state & mask));
  state = ((state << 1) | feedback) & ((std::uint32_t{1} << n) - 1);
  return out;
}

}  // namespace

LfsrSpec LfsrSpec::canonical(int n) {
  LfsrSpec spec;
  spec.n = n;
  spec.taps = primitive_taps(n);
  spec.seed.assign(static_cast<std::size_t>(n), 0);
  spec.seed[0] = 1;
  return spec;
}

const std::vector<int>& primitive_taps(int n) {
  if (n < 2 || n > 16) {
    throw std::invalid_argument("no built-in primitive polynomial for n = " + std::to_string(n));
  }
  return kPrimitiveTaps[static_cast<std::size_t>(n)];
}

Code::Code(ChipVector chips, int exponent, int shift)
    : chips_(std::move(chips)), exponent_(exponent), shift_(shift) {
  if (exponent_ < 2 || exponent_ > 30 || chips_.size() != full_period(exponent_)) {
    throw std::invalid_argument("code length must be 2^n - 1");
  }
  if (!((chips_.array() == 1) || (chips_.array() == -1)).all()) {
    throw std::invalid_argument("code chips must be +1 or -1");
  }
  if (std::abs(chips_.sum()) != 1) {
    throw std::invalid_argument("code is not balanced (chip sum must be +-1)");
  }
  if (shift_ < 0 || shift_ >= chips_.size()) {
    throw std::invalid_argument("code shift out of range");
  }
}

std::int64_t lfsr_period(const LfsrSpec& spec) {
  const std::uint32_t seed = pack_state(spec);
  const std::uint32_t mask = tap_mask(spec);
  const std::int64_t limit = full_period(spec.n);
  std::uint32_t state = seed;
  for (std::int64_t k = 1; k <= limit; ++k) {
    step(state, mask, spec.n);
    if (state == seed) return k;
    if (state == 0) return 0;
  }
  // The cycle never returns to the seed within 2^n - 1 steps.
  return 0;
}

std::vector<std::uint8_t> lfsr_period_bits(const LfsrSpec& spec) {
  const std::int64_t period = lfsr_period(spec);
  const std::int64_t expected = full_period(spec.n);
  if (period != expected) {
    throw std::invalid_argument("LFSR taps are not primitive: period " + std::to_string(period) +
                                " != " + std::to_string(expected));
  }
  std::uint32_t state = pack_state(spec);
  const std::uint32_t mask = tap_mask(spec);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(expected));
  for (auto& b : bits) b = step(state, mask, spec.n);
  return bits;
}

Code generate_mseq(const LfsrSpec& spec) {
  const auto bits = lfsr_period_bits(spec);
  ChipVector chips(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t k = 0; k < bits.size(); ++k) chips[static_cast<Eigen::Index>(k)] = 1 - 2 * bits[k];
  return Code(std::move(chips), spec.n, 0);
}

Code cyclic_shift(const Code& code, std::int64_t i) {
  const std::int64_t len = code.length();
  const std::int64_t r = ((i % len) + len) % len;
  ChipVector chips(len);
  const auto head = static_cast<Eigen::Index>(len - r);
  chips.head(head) = code.chips().tail(head);
  chips.tail(static_cast<Eigen::Index>(r)) = code.chips().head(static_cast<Eigen::Index>(r));
  return Code(std::move(chips), code.exponent(), static_cast<int>((code.shift() + r) % len));
}

int correlation(const Code& a, const Code& b) {
  if (a.length() != b.length()) {
    throw std::invalid_argument("correlation of codes with different lengths");
  }
  return a.chips().dot(b.chips());
}

CodeFamily build_family(const LfsrSpec& spec, int count) {
  Code base = generate_mseq(spec);
  if (count < 0 || count > base.length()) {
    throw std::invalid_argument("cannot assign " + std::to_string(count) +
                                " users distinct shifts of a length-" +
                                std::to_string(base.length()) + " code");
  }
  std::vector<Code> members;
  members.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) members.push_back(cyclic_shift(base, i));
  return CodeFamily{spec, std::move(base), std::move(members)};
}

Eigen::MatrixXi correlation_matrix(const LfsrSpec& spec) {
  const Code base = generate_mseq(spec);
  const int s = base.length();
  // Rows are the shifted codes; correlations are then one integer product.
  Eigen::MatrixXi rows(s, s);
  for (int i = 0; i < s; ++i) rows.row(i) = cyclic_shift(base, i).chips().transpose();
  return rows * rows.transpose();
}

void write_code_text(std::ostream& os, const Code& code) {
  for (int k = 0; k < code.length(); ++k) os << (code[k] > 0 ? "+1" : "-1") << '\n';
}

nlohmann::json code_to_json(const Code& code, const LfsrSpec& spec) {
  std::vector<int> chips(code.chips().data(), code.chips().data() + code.length());
  return nlohmann::json{
      {"n", spec.n}, {"taps", spec.taps}, {"shift", code.shift()}, {"chips", chips}};
}

}  // namespace qcdma
