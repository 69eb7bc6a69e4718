#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"

#include "blockgs/exact_sum.hpp"

using blockgs::ExactAccumulator;

namespace {

double accumulate_all(const std::vector<double>& xs) {
  ExactAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.round_to_double();
}

}  // namespace

TEST_SUITE("exact_sum") {

TEST_CASE("single values round-trip exactly") {
  for (double v : {0.0, 1.0, -1.0, 0.5, 3.141592653589793, 1e308, -1e308,
                   1e-308, 5e-324, -5e-324, 0x1.fffffffffffffp1023}) {
    ExactAccumulator acc;
    acc.add(v);
    CHECK(acc.round_to_double() == v);
  }
}

TEST_CASE("empty accumulator rounds to zero") {
  ExactAccumulator acc;
  CHECK(acc.round_to_double() == 0.0);
}

TEST_CASE("ties round to even") {
  // 1 + 2^-53 sits exactly between 1 and the next double: ties-to-even keeps 1.
  CHECK(accumulate_all({1.0, 0x1.0p-53}) == 1.0);
  // A crumb beyond the halfway point tips it up.
  CHECK(accumulate_all({1.0, 0x1.0p-53, 0x1.0p-105}) == 1.0 + 0x1.0p-52);
  // Same from below.
  CHECK(accumulate_all({1.0, -0x1.0p-54}) == 1.0);
  CHECK(accumulate_all({1.0, -0x1.0p-54, -0x1.0p-105}) == 1.0 - 0x1.0p-53);
}

TEST_CASE("catastrophic cancellation is exact") {
  CHECK(accumulate_all({1e16, 3.25, -1e16}) == 3.25);
  CHECK(accumulate_all({0x1.0p1000, 0x1.0p-1000, -0x1.0p1000}) == 0x1.0p-1000);
  CHECK(accumulate_all({1e308, 1e308, -1e308, -1e308}) == 0.0);
}

TEST_CASE("sum exceeding double range mid-stream still rounds correctly") {
  // The running total passes 2 * 1e308 (not a finite double) and comes back.
  CHECK(accumulate_all({1e308, 1e308, 1e308, -1e308, -1e308}) == 1e308);
}

TEST_CASE("order and partitioning never change the result") {
  std::mt19937_64 gen(2024);
  std::vector<double> xs;
  for (int i = 0; i < 300; ++i) {
    const double mag = std::ldexp(1.0, static_cast<int>(gen() % 600) - 300);
    const double frac = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    xs.push_back((gen() % 2 ? 1.0 : -1.0) * mag * (1.0 + frac));
  }
  const double reference = accumulate_all(xs);

  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(xs.begin(), xs.end(), gen);
    CHECK(accumulate_all(xs) == reference);

    // Split into a random number of partial accumulators, then merge.
    const size_t parts = 1 + gen() % 7;
    std::vector<ExactAccumulator> accs(parts);
    for (size_t i = 0; i < xs.size(); ++i) {
      accs[gen() % parts].add(xs[i]);
    }
    ExactAccumulator merged;
    for (const auto& a : accs) merged.merge(a);
    CHECK(merged.round_to_double() == reference);
  }
}

TEST_CASE("add_product holds the unrounded product") {
  // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60: the last term is lost by fl(a*b)
  // but must be visible when another term cancels the head.
  ExactAccumulator acc;
  const double a = 1.0 + 0x1.0p-30;
  acc.add_product(a, a);
  acc.add(-1.0);
  acc.add(-0x1.0p-29);
  CHECK(acc.round_to_double() == 0x1.0p-60);

  // Subnormal products underflow fl(a*b) entirely but not the accumulator.
  ExactAccumulator tiny;
  tiny.add_product(0x1.0p-600, 0x1.0p-600);
  CHECK(tiny.round_to_double() == 0.0);  // 2^-1200 < 2^-1074: rounds to zero
  tiny.add_product(0x1.0p-537, 0x1.0p-537);
  CHECK(tiny.round_to_double() == 0x1.0p-1074);  // nearest double to 2^-1074 + 2^-1200
}

TEST_CASE("product signs and negative operands") {
  ExactAccumulator acc;
  acc.add_product(-3.0, 7.0);
  acc.add_product(3.0, 7.0);
  CHECK(acc.round_to_double() == 0.0);
  acc.add_product(-5.0, -4.0);
  CHECK(acc.round_to_double() == 20.0);
}

TEST_CASE("clear resets value and poison") {
  ExactAccumulator acc;
  acc.add(42.0);
  acc.add(std::numeric_limits<double>::infinity());
  CHECK(acc.poisoned());
  acc.clear();
  CHECK(!acc.poisoned());
  CHECK(acc.round_to_double() == 0.0);
}

TEST_CASE("non-finite input poisons, and poison propagates through merge") {
  ExactAccumulator acc;
  acc.add(std::numeric_limits<double>::quiet_NaN());
  CHECK(acc.poisoned());
  CHECK(std::isnan(acc.round_to_double()));

  ExactAccumulator clean;
  clean.add(1.0);
  clean.merge(acc);
  CHECK(clean.poisoned());

  ExactAccumulator prod;
  prod.add_product(std::numeric_limits<double>::infinity(), 0.0);
  CHECK(prod.poisoned());
}

}  // TEST_SUITE
