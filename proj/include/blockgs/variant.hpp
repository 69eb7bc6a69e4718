#pragma once

#include <string>
#include <vector>

namespace blockgs {

enum class VariantId {
  Bcgs,          // classic block CGS
  BcgsIro,       // BCGSI+ (reorthogonalized)
  BcgsPipiPlus,  // BCGSPIPI+ (Pythagorean, two syncs per block)
  BcgsIp1s,      // BCGSI+P-1S (Pythagorean, one sync per block)
  BcgsIp2s,      // BCGSI+P-2S (TSQR on the U path, two syncs per block)
  BcgsI1s,       // BCGSI+1S (one sync, no Pythagorean correction)
};

enum class StabilityClass { OofU, OofUKappaSq, Unstable };

/// The hypothesis under which the variant's loss-of-orthogonality bound
/// holds: u * kappa(X)^power <= 1 (power 0: no usable bound).
struct LooAssumption {
  int kappa_power = 0;
};

const std::vector<VariantId>& all_variants();

std::string variant_name(VariantId v);

/// Case-insensitive lookup of a variant by its canonical name.
/// Throws ConfigError for unknown names.
VariantId parse_variant(const std::string& name);

/// Exact synchronization count for a factorization with q block columns.
/// Every variant degenerates to a single TSQR when q = 1.
long expected_syncs(VariantId v, long q);

StabilityClass stability_class(VariantId v);

LooAssumption loo_assumption(VariantId v);

}  // namespace blockgs
