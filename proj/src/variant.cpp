#include "blockgs/variant.hpp"

#include <algorithm>
#include <cctype>

#include "blockgs/errors.hpp"

namespace blockgs {

const std::vector<VariantId>& all_variants() {
  static const std::vector<VariantId> order = {
      VariantId::Bcgs,     VariantId::BcgsIro,  VariantId::BcgsPipiPlus,
      VariantId::BcgsIp1s, VariantId::BcgsIp2s, VariantId::BcgsI1s,
  };
  return order;
}

std::string variant_name(VariantId v) {
  switch (v) {
    case VariantId::Bcgs:
      return "BCGS";
    case VariantId::BcgsIro:
      return "BCGSI+";
    case VariantId::BcgsPipiPlus:
      return "BCGSPIPI+";
    case VariantId::BcgsIp1s:
      return "BCGSI+P-1S";
    case VariantId::BcgsIp2s:
      return "BCGSI+P-2S";
    case VariantId::BcgsI1s:
      return "BCGSI+1S";
  }
  throw Error("variant_name: unknown variant id");
}

static std::string to_upper(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

VariantId parse_variant(const std::string& name) {
  const std::string key = to_upper(name);
  for (VariantId v : all_variants()) {
    if (key == to_upper(variant_name(v))) return v;
  }
  throw ConfigError("unknown variant '" + name +
                    "' (expected one of BCGS, BCGSI+, BCGSPIPI+, BCGSI+P-1S, "
                    "BCGSI+P-2S, BCGSI+1S)");
}

long expected_syncs(VariantId v, long q) {
  if (q < 1) throw DimensionError("expected_syncs: q must be at least 1");
  if (q == 1) return 1;
  switch (v) {
    case VariantId::Bcgs:
      return 2 * q - 1;
    case VariantId::BcgsIro:
      return 4 * q - 3;
    case VariantId::BcgsPipiPlus:
      return 2 * q - 1;
    case VariantId::BcgsIp1s:
      return q;
    case VariantId::BcgsIp2s:
      return 2 * q - 1;
    case VariantId::BcgsI1s:
      return q;
  }
  throw Error("expected_syncs: unknown variant id");
}

StabilityClass stability_class(VariantId v) {
  switch (v) {
    case VariantId::Bcgs:
      return StabilityClass::Unstable;
    case VariantId::BcgsIro:
    case VariantId::BcgsPipiPlus:
    case VariantId::BcgsIp1s:
    case VariantId::BcgsIp2s:
      return StabilityClass::OofU;
    case VariantId::BcgsI1s:
      return StabilityClass::OofUKappaSq;
  }
  throw Error("stability_class: unknown variant id");
}

LooAssumption loo_assumption(VariantId v) {
  switch (v) {
    case VariantId::Bcgs:
      return {0};  // no usable bound
    case VariantId::BcgsIro:
      return {1};
    case VariantId::BcgsPipiPlus:
      return {2};
    case VariantId::BcgsIp1s:
      return {2};
    case VariantId::BcgsIp2s:
      return {1};
    case VariantId::BcgsI1s:
      return {3};
  }
  throw Error("loo_assumption: unknown variant id");
}

}  // namespace blockgs
