#pragma once

#include <array>
#include <cstdint>

namespace blockgs {

/// Fixed-point accumulator spanning the full double exponent range.
///
/// The value is a 2176-bit two's-complement integer whose least significant
/// bit has weight 2^-1074 (the smallest subnormal).  Doubles and exact
/// products of doubles are added without any rounding, so the result of
/// round() depends only on the multiset of terms, not on the order they were
/// added in or on how they were split across partial accumulators that are
/// later merged.  That property is what makes distributed inner-product
/// reductions in this library independent of the process count.
///
/// Headroom above the largest double (about 78 bits) allows ~10^23 worst-case
/// additions before the top limb could wrap, far beyond anything reachable
/// here.
class ExactAccumulator {
 public:
  static constexpr int kLimbs = 34;

  /// Add one double.  NaN or infinity poisons the accumulator.
  void add(double x);

  /// Add the exact (unrounded) product a*b.
  void add_product(double a, double b);

  /// Fold another accumulator into this one.  Exact and commutative.
  void merge(const ExactAccumulator& other);

  /// Round the held value to the nearest double (ties to even).
  /// Returns NaN if poisoned.
  double round_to_double() const;

  void clear();

  bool poisoned() const { return poisoned_; }
  void set_poisoned(bool p) { poisoned_ = p; }

  /// Raw limb access, least significant first (for wire transport).
  const std::array<std::uint64_t, kLimbs>& limbs() const { return limbs_; }
  std::array<std::uint64_t, kLimbs>& limbs() { return limbs_; }

 private:
  void add_piece(std::uint64_t mant, int lsb_pos, bool negative);
  void add_at(int limb, std::uint64_t v);
  void sub_at(int limb, std::uint64_t v);

  std::array<std::uint64_t, kLimbs> limbs_{};
  bool poisoned_ = false;
};

}  // namespace blockgs
