#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qcdma/codes.hpp"

using namespace qcdma;

namespace {

// Bit-by-bit shift register written from the recurrence, not from the
// library's mask arithmetic: a_{k+n} = xor over taps t of a_{k+n-t}.
std::vector<int> recurrence_bits(int n, const std::vector<int>& taps, std::size_t count) {
  std::vector<int> out;
  std::vector<int> cells(static_cast<std::size_t>(n), 0);
  cells[0] = 1;
  while (out.size() < count) {
    out.push_back(cells[static_cast<std::size_t>(n - 1)]);
    int fb = 0;
    for (int t : taps) fb ^= cells[static_cast<std::size_t>(t - 1)];
    for (int i = n - 1; i > 0; --i) cells[static_cast<std::size_t>(i)] = cells[static_cast<std::size_t>(i - 1)];
    cells[0] = fb;
  }
  return out;
}

int brute_correlation(const std::vector<int>& a, const std::vector<int>& b) {
  int sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

}  // namespace

TEST(Lfsr, MatchesRecurrenceOracle) {
  for (int n = 2; n <= 12; ++n) {
    const LfsrSpec spec = LfsrSpec::canonical(n);
    const Code code = generate_mseq(spec);
    const auto bits = recurrence_bits(n, spec.taps, static_cast<std::size_t>(code.length()));
    for (int k = 0; k < code.length(); ++k) ASSERT_EQ(code[k], 1 - 2 * bits[static_cast<std::size_t>(k)]) << "n=" << n;
  }
}

TEST(Lfsr, FullPeriodForEveryTabulatedExponent) {
  for (int n = 2; n <= 16; ++n) {
    const LfsrSpec spec = LfsrSpec::canonical(n);
    EXPECT_EQ(lfsr_period(spec), (std::int64_t{1} << n) - 1) << "n=" << n;
  }
}

TEST(Lfsr, NonPrimitiveTapsGiveShortPeriod) {
  LfsrSpec spec = LfsrSpec::canonical(4);
  spec.taps = {4, 2};  // x^4 + x^2 + 1 is reducible
  const auto period = lfsr_period(spec);
  EXPECT_LT(period, 15);
  EXPECT_THROW(generate_mseq(spec), std::invalid_argument);
}

TEST(Lfsr, SmallPolynomialsGiveBalancedSequences) {
  LfsrSpec two = LfsrSpec::canonical(2);
  two.taps = {2, 1};
  const Code c2 = generate_mseq(two);
  EXPECT_EQ(c2.length(), 3);
  EXPECT_EQ(c2.chips().sum(), -1);

  LfsrSpec three = LfsrSpec::canonical(3);
  three.taps = {3, 1};
  EXPECT_EQ(lfsr_period(three), 7);
  EXPECT_EQ(generate_mseq(three).chips().sum(), -1);

  three.taps = {3, 2, 1};  // even tap count: x^3+x^2+x+1 has root 1
  EXPECT_THROW(generate_mseq(three), std::invalid_argument);
}

TEST(Lfsr, RegisterVisitsEveryNonzeroState) {
  // Every window of n consecutive outputs is a distinct nonzero word.
  for (int n = 3; n <= 10; ++n) {
    const Code code = generate_mseq(LfsrSpec::canonical(n));
    std::set<int> words;
    for (int k = 0; k < code.length(); ++k) {
      int w = 0;
      for (int j = 0; j < n; ++j) w = (w << 1) | (code[(k + j) % code.length()] < 0 ? 1 : 0);
      words.insert(w);
    }
    EXPECT_EQ(static_cast<int>(words.size()), code.length());
    EXPECT_EQ(words.count(0), 0u);
  }
}

TEST(Codes, BalanceIsPlusOrMinusOne) {
  for (int n = 3; n <= 14; ++n) {
    const Code code = generate_mseq(LfsrSpec::canonical(n));
    EXPECT_EQ(std::abs(code.chips().sum()), 1) << "n=" << n;
  }
}

TEST(Codes, CyclicShiftRotatesLeft) {
  const Code base = generate_mseq(LfsrSpec::canonical(5));
  const Code s = cyclic_shift(base, 3);
  for (int k = 0; k < base.length(); ++k) EXPECT_EQ(s[k], base[(k + 3) % base.length()]);
  EXPECT_EQ(s.shift(), 3);
  EXPECT_EQ(cyclic_shift(base, base.length()), base);
}

TEST(Codes, CorrelationMatrixExhaustiveSmallExponents) {
  for (int n = 3; n <= 6; ++n) {
    const LfsrSpec spec = LfsrSpec::canonical(n);
    const Eigen::MatrixXi c = correlation_matrix(spec);
    const int s = (1 << n) - 1;
    const Code base = generate_mseq(spec);
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < s; ++i) {
      const Code ci = cyclic_shift(base, i);
      rows.emplace_back(ci.chips().data(), ci.chips().data() + s);
    }
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const int expected = i == j ? s : -1;
        ASSERT_EQ(c(i, j), expected);
        ASSERT_EQ(brute_correlation(rows[i], rows[j]), expected);
      }
    }
  }
}

TEST(Codes, CorrelationMismatchThrows) {
  const Code a = generate_mseq(LfsrSpec::canonical(3));
  const Code b = generate_mseq(LfsrSpec::canonical(4));
  EXPECT_THROW(correlation(a, b), std::invalid_argument);
}

TEST(Codes, FamilyUsesConsecutiveShifts) {
  const CodeFamily f = build_family(LfsrSpec::canonical(8), 5);
  ASSERT_EQ(f.members.size(), 5u);
  EXPECT_EQ(f.spreading_factor(), 255);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(f.members[static_cast<std::size_t>(i)].shift(), i);
  EXPECT_THROW(build_family(LfsrSpec::canonical(3), 8), std::invalid_argument);
}

TEST(Codes, RejectsMalformedChips) {
  ChipVector bad = ChipVector::Ones(7);
  EXPECT_THROW(Code(bad, 3), std::invalid_argument);
  ChipVector zero = generate_mseq(LfsrSpec::canonical(3)).chips();
  zero[0] = 0;
  EXPECT_THROW(Code(zero, 3), std::invalid_argument);
}

TEST(Codes, TextAndJsonExport) {
  const LfsrSpec spec = LfsrSpec::canonical(3);
  const Code c = generate_mseq(spec);
  std::ostringstream os;
  write_code_text(os, c);
  std::istringstream in(os.str());
  int value = 0, k = 0;
  while (in >> value) EXPECT_EQ(value, c[k++]);
  EXPECT_EQ(k, 7);
  const auto j = code_to_json(c, spec);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["chips"].size(), 7u);
}
