#include "blockgs/cost_model.hpp"

#include "blockgs/errors.hpp"

namespace blockgs {

double predicted_time(const CostModel& model, const RunCost& cost) {
  if (model.alpha < 0.0 || model.beta < 0.0 || model.gamma < 0.0) {
    throw ConfigError("cost model: alpha, beta, gamma must be nonnegative");
  }
  if (model.procs < 1) {
    throw ConfigError("cost model: process count must be at least 1");
  }
  return model.alpha * static_cast<double>(cost.sync_count) +
         model.beta * static_cast<double>(cost.words_reduced) +
         model.gamma * cost.flops / static_cast<double>(model.procs);
}

double predict_speedup(const CostModel& model, const RunCost& a,
                       const RunCost& b) {
  const double ta = predicted_time(model, a);
  const double tb = predicted_time(model, b);
  if (ta <= 0.0 || tb <= 0.0) {
    throw ConfigError("predict_speedup: model predicts zero time for a run");
  }
  return tb / ta;
}

double variant_flops(VariantId v, long n, long m, long s) {
  if (s < 1 || m < 1 || m % s != 0 || n < m) {
    throw DimensionError("variant_flops: need n >= m and m a multiple of s");
  }
  const long q = m / s;
  const double dn = static_cast<double>(n);
  const double ds = static_cast<double>(s);
  const double block_qr = 4.0 * dn * ds * ds;  // local QR plus Q assembly
  const double block_scale = dn * ds * ds;     // triangular right-solve
  auto gram_or_update = [dn](double a, double b) { return 2.0 * dn * a * b; };

  if (q == 1) return block_qr;

  double f = 0.0;
  switch (v) {
    case VariantId::Bcgs: {
      f = block_qr;
      for (long k = 1; k < q; ++k) {
        f += gram_or_update(k * ds, ds);  // S = Q^T X
        f += gram_or_update(k * ds, ds);  // U = X - Q S
        f += block_qr;
      }
      return f;
    }
    case VariantId::BcgsIro: {
      f = block_qr;
      for (long k = 1; k < q; ++k) {
        f += 2.0 * (gram_or_update(k * ds, ds) + gram_or_update(k * ds, ds) +
                    block_qr);  // two project+factor passes
      }
      return f;
    }
    case VariantId::BcgsPipiPlus: {
      f = block_qr;
      for (long k = 1; k < q; ++k) {
        // Two fused Gram products of width (k+1)s, two projection updates,
        // two triangular scales.
        f += 2.0 * gram_or_update((k + 1) * ds, ds);
        f += 2.0 * gram_or_update(k * ds, ds);
        f += 2.0 * block_scale;
      }
      return f;
    }
    case VariantId::BcgsIp1s: {
      // Prologue: block QR fused with [X_1 X_2]^T X_2, then form U_2.
      f = block_qr + gram_or_update(2.0 * ds, ds) + gram_or_update(ds, ds) +
          block_scale;
      for (long k = 1; k < q; ++k) {
        const bool has_next = k + 1 < q;
        f += has_next ? gram_or_update(k * ds + 2.0 * ds, 2.0 * ds)
                      : gram_or_update(k * ds + ds, ds);
        f += gram_or_update(k * ds, ds) + block_scale;  // form Q_{k+1}
        if (has_next) {
          f += gram_or_update((k + 1) * ds, ds) + block_scale;  // form U_{k+2}
        }
      }
      return f;
    }
    case VariantId::BcgsI1s: {
      // As BCGSI+P-1S, but U is never normalized: the prologue fuses only
      // X_1^T X_2, the wide Gram needs no T block (narrower left operand),
      // and U blocks need no scale.
      f = block_qr + gram_or_update(ds, ds) + gram_or_update(ds, ds);
      for (long k = 1; k < q; ++k) {
        const bool has_next = k + 1 < q;
        f += has_next ? gram_or_update(k * ds + ds, 2.0 * ds)
                      : gram_or_update(k * ds + ds, ds);
        f += gram_or_update(k * ds, ds) + block_scale;  // form Q_{k+1}
        if (has_next) {
          f += gram_or_update((k + 1) * ds, ds);  // form U_{k+2}, unnormalized
        }
      }
      return f;
    }
    case VariantId::BcgsIp2s: {
      // Prologue: block QR fused with X_1^T X_2, then TSQR of U_2.
      f = block_qr + gram_or_update(ds, ds) + gram_or_update(ds, ds) + block_qr;
      for (long k = 1; k < q; ++k) {
        const bool has_next = k + 1 < q;
        f += has_next ? gram_or_update(k * ds + ds, 2.0 * ds)
                      : gram_or_update(k * ds + ds, ds);
        f += gram_or_update(k * ds, ds) + block_scale;
        if (has_next) {
          f += gram_or_update((k + 1) * ds, ds) + block_qr;
        }
      }
      return f;
    }
  }
  throw Error("variant_flops: unknown variant id");
}

}  // namespace blockgs
