#pragma once

#include <iosfwd>

namespace blockgs {

/// Built-in invariant suite behind `blockgs verify`: sync-count formulas,
/// distribution transparency, factorization quality on a well-conditioned
/// input, the delayed-reprojection identity, and the speedup asymptotics.
/// Prints one PASS/FAIL line per check; returns 0 iff everything passed.
int run_verify_suite(std::ostream& os);

}  // namespace blockgs
