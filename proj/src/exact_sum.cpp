#include "blockgs/exact_sum.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace blockgs {

namespace {

constexpr std::uint64_t kFracMask = (std::uint64_t{1} << 52) - 1;

}  // namespace

void ExactAccumulator::add(double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const int expfield = static_cast<int>((bits >> 52) & 0x7ff);
  const std::uint64_t frac = bits & kFracMask;
  if (expfield == 0x7ff) {  // NaN or Inf
    poisoned_ = true;
    return;
  }
  std::uint64_t mant;
  int pos;  // absolute bit position of the mantissa LSB; weight 2^(pos-1074)
  if (expfield == 0) {
    if (frac == 0) return;
    mant = frac;
    pos = 0;
  } else {
    mant = frac | (std::uint64_t{1} << 52);
    pos = expfield - 1;
  }
  add_piece(mant, pos, (bits >> 63) != 0);
}

void ExactAccumulator::add_product(double a, double b) {
  // Dekker/FMA two-product: hi + lo == a*b exactly (barring under/overflow of
  // the product itself, which the finite desk-scale data here stays far from).
  const double hi = a * b;
  if (!std::isfinite(hi)) {
    poisoned_ = true;
    return;
  }
  const double lo = std::fma(a, b, -hi);
  add(hi);
  add(lo);
}

void ExactAccumulator::merge(const ExactAccumulator& other) {
  unsigned __int128 carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const unsigned __int128 t =
        static_cast<unsigned __int128>(limbs_[i]) + other.limbs_[i] + static_cast<std::uint64_t>(carry);
    limbs_[i] = static_cast<std::uint64_t>(t);
    carry = t >> 64;
  }
  poisoned_ = poisoned_ || other.poisoned_;
}

void ExactAccumulator::clear() {
  limbs_.fill(0);
  poisoned_ = false;
}

void ExactAccumulator::add_at(int limb, std::uint64_t v) {
  if (v == 0) return;
  unsigned __int128 t = static_cast<unsigned __int128>(limbs_[limb]) + v;
  limbs_[limb] = static_cast<std::uint64_t>(t);
  std::uint64_t carry = static_cast<std::uint64_t>(t >> 64);
  for (int i = limb + 1; carry != 0 && i < kLimbs; ++i) {
    t = static_cast<unsigned __int128>(limbs_[i]) + carry;
    limbs_[i] = static_cast<std::uint64_t>(t);
    carry = static_cast<std::uint64_t>(t >> 64);
  }
}

void ExactAccumulator::sub_at(int limb, std::uint64_t v) {
  if (v == 0) return;
  std::uint64_t before = limbs_[limb];
  limbs_[limb] = before - v;
  bool borrow = before < v;
  for (int i = limb + 1; borrow && i < kLimbs; ++i) {
    before = limbs_[i];
    limbs_[i] = before - 1;
    borrow = before == 0;
  }
}

void ExactAccumulator::add_piece(std::uint64_t mant, int lsb_pos, bool negative) {
  const int limb = lsb_pos >> 6;
  const int shift = lsb_pos & 63;
  const unsigned __int128 piece = static_cast<unsigned __int128>(mant) << shift;
  const std::uint64_t lo = static_cast<std::uint64_t>(piece);
  const std::uint64_t hi = static_cast<std::uint64_t>(piece >> 64);
  if (!negative) {
    add_at(limb, lo);
    if (limb + 1 < kLimbs) add_at(limb + 1, hi);
  } else {
    sub_at(limb, lo);
    if (limb + 1 < kLimbs) sub_at(limb + 1, hi);
  }
}

namespace {

bool any_bit_below(const std::array<std::uint64_t, ExactAccumulator::kLimbs>& mag, int pos) {
  // true iff any bit with index < pos is set
  const int limb = pos >> 6;
  const int shift = pos & 63;
  for (int i = 0; i < limb; ++i)
    if (mag[i] != 0) return true;
  if (shift == 0) return false;
  return (mag[limb] & ((std::uint64_t{1} << shift) - 1)) != 0;
}

bool bit_at(const std::array<std::uint64_t, ExactAccumulator::kLimbs>& mag, int pos) {
  return (mag[pos >> 6] >> (pos & 63)) & 1u;
}

}  // namespace

double ExactAccumulator::round_to_double() const {
  if (poisoned_) return std::numeric_limits<double>::quiet_NaN();

  const bool negative = (limbs_[kLimbs - 1] >> 63) != 0;
  std::array<std::uint64_t, kLimbs> mag = limbs_;
  if (negative) {
    unsigned __int128 carry = 1;
    for (int i = 0; i < kLimbs; ++i) {
      const unsigned __int128 t = static_cast<unsigned __int128>(~mag[i]) + static_cast<std::uint64_t>(carry);
      mag[i] = static_cast<std::uint64_t>(t);
      carry = t >> 64;
    }
  }

  int top = kLimbs - 1;
  while (top >= 0 && mag[top] == 0) --top;
  if (top < 0) return 0.0;

  const int msb = top * 64 + (63 - std::countl_zero(mag[top]));
  const int round_pos = msb - 52 > 0 ? msb - 52 : 0;  // keep bits [round_pos, msb]
  const int width = msb - round_pos + 1;              // <= 53

  std::uint64_t mant = mag[round_pos >> 6] >> (round_pos & 63);
  if ((round_pos & 63) != 0 && (round_pos >> 6) + 1 < kLimbs)
    mant |= mag[(round_pos >> 6) + 1] << (64 - (round_pos & 63));
  mant &= (width < 64) ? ((std::uint64_t{1} << width) - 1) : ~std::uint64_t{0};

  if (round_pos > 0) {
    const bool guard = bit_at(mag, round_pos - 1);
    const bool sticky = any_bit_below(mag, round_pos - 1);
    if (guard && (sticky || (mant & 1))) ++mant;  // ties to even
  }

  const double v = std::ldexp(static_cast<double>(mant), round_pos - 1074);
  return negative ? -v : v;
}

}  // namespace blockgs
