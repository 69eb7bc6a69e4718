#include "blockgs/bcgs.hpp"

#include <string>
#include <utility>
#include <vector>

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

namespace {

void check_shape(const DistBlockMatrix& x) {
  if (x.block_width() < 1) {
    throw DimensionError("bcgs: block width must be at least 1");
  }
  if (x.cols() == 0 || x.cols() % x.block_width() != 0) {
    throw DimensionError(
        "bcgs: column count must be a positive multiple of the block width");
  }
  if (x.global_rows() < x.cols()) {
    throw DimensionError(
        "bcgs: economic factorization needs at least as many rows as columns");
  }
}

DistBlockMatrix zeros_like(const DistBlockMatrix& x) {
  return DistBlockMatrix(x.global_rows(), x.block_width(), x.row_offset(),
                         DenseMatrix(x.local_rows(), x.cols()), x.comm());
}

/// a * b for two square upper-triangular factors; only the upper triangle is
/// formed, so entries below the diagonal are exact stored zeros.
DenseMatrix upper_product(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.cols() != b.rows()) {
    throw DimensionError("upper_product: operands must be square and conforming");
  }
  const long n = a.rows();
  DenseMatrix out(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i <= j; ++i) {
      double acc = 0.0;
      for (long k = i; k <= j; ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

/// Scatter a stacked (k*s) x s column of blocks into R(0..k-1, col_block).
void store_column_blocks(UpperTriangular& r, long col_block,
                         const DenseMatrix& scol) {
  const long s = r.block_width();
  const long kb = scol.rows() / s;
  for (long i = 0; i < kb; ++i) {
    r.set_block(i, col_block, scol.sub(i * s, (i + 1) * s, 0, s));
  }
}

std::string assumption_text(int kappa_power) {
  if (kappa_power <= 0) return "";
  const std::string k = kappa_power == 1
                            ? "kappa(X)"
                            : "kappa(X)^" + std::to_string(kappa_power);
  return "O(u) * " + k + " <= 1";
}

[[noreturn]] void rethrow_not_spd(const NotSpdError& e, const std::string& variant,
                                  const std::string& site, long block_1based,
                                  int kappa_power) {
  std::string msg = variant + ": " + site + " for block column " +
                    std::to_string(block_1based) +
                    " hit a Gram matrix that is not numerically positive "
                    "definite (" +
                    e.what() + ")";
  const std::string hyp = assumption_text(kappa_power);
  if (!hyp.empty()) msg += "; likely violated working assumption: " + hyp;
  throw NotSpdError(msg, e.pivot);
}

/// q = 1: every variant is a single TSQR.
BcgsResult single_block(const DistBlockMatrix& x, Communicator& comm) {
  auto [qb, rb] = tsqr(x, comm);
  BcgsResult out;
  out.q = std::move(qb);
  out.r = UpperTriangular(x.cols(), x.block_width());
  out.r.set_block(0, 0, rb);
  return out;
}

BcgsResult classic_impl(const DistBlockMatrix& x, Communicator& comm,
                        IntraorthKind intra) {
  const long s = x.block_width();
  const long qb = x.num_blocks();
  if (qb == 1) return single_block(x, comm);

  auto intra_qr = [&](const DistBlockMatrix& b) {
    return intra == IntraorthKind::Tsqr ? tsqr(b, comm) : cholqr(b, comm);
  };

  BcgsResult out;
  out.q = zeros_like(x);
  out.r = UpperTriangular(x.cols(), s);

  {
    std::pair<DistBlockMatrix, DenseMatrix> f;
    try {
      f = intra_qr(extract_block(x, 0, s));
    } catch (const NotSpdError& e) {
      rethrow_not_spd(e, "BCGS", "intra-block Cholesky QR", 1, 2);
    }
    set_block(out.q, 0, f.first);
    out.r.set_block(0, 0, f.second);
  }
  for (long k = 1; k < qb; ++k) {
    const long c0 = k * s;
    DenseMatrix scol = fused_gram({prefix_span(out.q, k)}, {block_span(x, k)},
                                  comm, "fused_gram:proj");
    DistBlockMatrix u = extract_block(x, c0, c0 + s);
    local_axpy_block(u, 0, s, out.q, 0, c0, scol);
    std::pair<DistBlockMatrix, DenseMatrix> f;
    try {
      f = intra_qr(u);
    } catch (const NotSpdError& e) {
      rethrow_not_spd(e, "BCGS", "intra-block Cholesky QR", k + 1, 2);
    }
    set_block(out.q, c0, f.first);
    store_column_blocks(out.r, k, scol);
    out.r.set_block(k, k, f.second);
  }
  return out;
}

BcgsResult iro_impl(const DistBlockMatrix& x, Communicator& comm) {
  const long s = x.block_width();
  const long qb = x.num_blocks();
  if (qb == 1) return single_block(x, comm);

  BcgsResult out;
  out.q = zeros_like(x);
  out.r = UpperTriangular(x.cols(), s);

  {
    auto [q1, r11] = tsqr(extract_block(x, 0, s), comm);
    set_block(out.q, 0, q1);
    out.r.set_block(0, 0, r11);
  }
  for (long k = 1; k < qb; ++k) {
    const long c0 = k * s;
    // First pass: project and factor.
    DenseMatrix s1 = fused_gram({prefix_span(out.q, k)}, {block_span(x, k)},
                                comm, "fused_gram:proj1");
    DistBlockMatrix u = extract_block(x, c0, c0 + s);
    local_axpy_block(u, 0, s, out.q, 0, c0, s1);
    auto [u1, r1] = tsqr(u, comm);
    // Second pass: reorthogonalize the fresh basis against the prefix.
    DenseMatrix s2 = fused_gram({prefix_span(out.q, k)}, {span(u1, 0, s)},
                                comm, "fused_gram:proj2");
    local_axpy_block(u1, 0, s, out.q, 0, c0, s2);
    auto [qk, r2] = tsqr(u1, comm);
    set_block(out.q, c0, qk);
    store_column_blocks(out.r, k, s1 + multiply(s2, r1));
    out.r.set_block(k, k, upper_product(r2, r1));
  }
  return out;
}

BcgsResult pipi_impl(const DistBlockMatrix& x, Communicator& comm) {
  const long s = x.block_width();
  const long qb = x.num_blocks();
  if (qb == 1) return single_block(x, comm);

  BcgsResult out;
  out.q = zeros_like(x);
  out.r = UpperTriangular(x.cols(), s);

  {
    auto [q1, r11] = tsqr(extract_block(x, 0, s), comm);
    set_block(out.q, 0, q1);
    out.r.set_block(0, 0, r11);
  }
  for (long k = 1; k < qb; ++k) {
    const long c0 = k * s;
    // [S; T] = [Q_{1:k}  X_{k+1}]^T X_{k+1}, one rendezvous.
    DenseMatrix m1 = fused_gram({prefix_span(out.q, k), block_span(x, k)},
                                {block_span(x, k)}, comm, "fused_gram:proj");
    DenseMatrix scol = m1.sub(0, c0, 0, s);
    DenseMatrix t = m1.sub(c0, c0 + s, 0, s);
    DenseMatrix sdiag;
    try {
      sdiag = pyth_chol(t, scol);
    } catch (const NotSpdError& e) {
      rethrow_not_spd(e, "BCGSPIPI+", "first-pass Pythagorean normalization",
                      k + 1, 2);
    }
    DistBlockMatrix u = extract_block(x, c0, c0 + s);
    local_axpy_block(u, 0, s, out.q, 0, c0, scol);
    scale_right_block(u, 0, s, sdiag);
    // [Y; Omega] = [Q_{1:k}  U]^T U, one rendezvous.
    DenseMatrix m2 = fused_gram({prefix_span(out.q, k), span(u, 0, s)},
                                {span(u, 0, s)}, comm, "fused_gram:reproj");
    DenseMatrix ycol = m2.sub(0, c0, 0, s);
    DenseMatrix omega = m2.sub(c0, c0 + s, 0, s);
    DenseMatrix ydiag;
    try {
      ydiag = pyth_chol(omega, ycol);
    } catch (const NotSpdError& e) {
      rethrow_not_spd(e, "BCGSPIPI+", "second-pass Pythagorean normalization",
                      k + 1, 2);
    }
    local_axpy_block(u, 0, s, out.q, 0, c0, ycol);
    scale_right_block(u, 0, s, ydiag);
    set_block(out.q, c0, u);
    store_column_blocks(out.r, k, scol + multiply(ycol, sdiag));
    out.r.set_block(k, k, upper_product(ydiag, sdiag));
  }
  return out;
}

/// How the one-sync family normalizes the projected block U_{k+1} inside the
/// main loop.
enum class SDiagMode {
  PythChol,  // chol(T - S^T S): Pythagorean correction (BCGSI+P-1S)
  SkipNorm,  // no S-side step: the projected block enters the fused product
             // unnormalized, its Gram is read off that product, and the R
             // assembly uses S_diag = I (BCGSI+1S).  Dropping the step also
             // drops the T reduction, and with it the O(u) orthogonality
             // guarantee of the corrected variants.
  TsqrPath,  // TSQR of X - QS: extra sync per block (BCGSI+P-2S)
};

BcgsResult onesync_impl(const DistBlockMatrix& x, Communicator& comm,
                        SDiagMode mode, const std::string& name,
                        int kappa_power, const RecurrenceProbe* probe) {
  const long s = x.block_width();
  const long qb = x.num_blocks();
  if (qb == 1) return single_block(x, comm);

  BcgsResult out;
  out.q = zeros_like(x);
  out.r = UpperTriangular(x.cols(), s);

  DenseMatrix scol;   // S_{1:k,k+1}, one more block per iteration
  DenseMatrix sdiag;  // S_{k+1,k+1}
  DistBlockMatrix u;  // U_{k+1}, normalized per the mode above

  // Prologue: TSQR of X_1 with the first Gram product of block 2 carried in
  // the same rendezvous (it has no data dependency on the TSQR output).
  {
    DistBlockMatrix x1 = extract_block(x, 0, s);
    if (mode == SDiagMode::TsqrPath) {
      TsqrFusedResult pro =
          tsqr_fused_gram(x1, {span(x, 0, s)}, {span(x, s, 2 * s)}, comm,
                          "reduce_factor_tree:prologue");
      set_block(out.q, 0, pro.q);
      out.r.set_block(0, 0, pro.r);
      scol = tri_solve_left_trans(pro.r, pro.fused);  // Q_1^T X_2
      u = extract_block(x, s, 2 * s);
      local_axpy_block(u, 0, s, out.q, 0, s, scol);
      auto [u2, sd] = tsqr(u, comm);
      u = std::move(u2);
      sdiag = std::move(sd);
    } else {
      // The Pythagorean mode fuses [X_1 X_2]^T X_2 so that T_2 rides along
      // with S_12's numerator; the skip-normalization mode needs only
      // X_1^T X_2 because block 2 is carried unnormalized (S_22 = I).
      const bool pyth = mode == SDiagMode::PythChol;
      TsqrFusedResult pro =
          tsqr_fused_gram(x1, {span(x, 0, pyth ? 2 * s : s)},
                          {span(x, s, 2 * s)}, comm,
                          "reduce_factor_tree:prologue");
      set_block(out.q, 0, pro.q);
      out.r.set_block(0, 0, pro.r);
      DenseMatrix x1tx2 = pro.fused.sub(0, s, 0, s);
      scol = tri_solve_left_trans(pro.r, x1tx2);  // S_12 = R_11^{-T} (X_1^T X_2)
      u = extract_block(x, s, 2 * s);
      local_axpy_block(u, 0, s, out.q, 0, s, scol);
      if (pyth) {
        DenseMatrix t2 = pro.fused.sub(s, 2 * s, 0, s);
        try {
          sdiag = pyth_chol(t2, scol);
        } catch (const NotSpdError& e) {
          rethrow_not_spd(e, name, "prologue Pythagorean normalization", 2,
                          kappa_power);
        }
        scale_right_block(u, 0, s, sdiag);
      } else {
        sdiag = DenseMatrix::identity(s);
      }
    }
  }

  for (long k = 1; k < qb; ++k) {
    const long c0 = k * s;
    const bool has_next = k + 1 < qb;
    DenseMatrix ycol, omega, z, p, t_next;

    if (has_next) {
      // Wide sync: everything the rest of this iteration and the start of
      // the next one will need, in one rendezvous.  Only the Pythagorean
      // mode consumes T_{k+2}, so only it widens the left operand by X.
      std::vector<BlockSpan> left = {prefix_span(out.q, k), span(u, 0, s)};
      if (mode == SDiagMode::PythChol) left.push_back(block_span(x, k + 1));
      DenseMatrix m = fused_gram(left, {span(u, 0, s), block_span(x, k + 1)},
                                 comm, "fused_gram:wide");
      ycol = m.sub(0, c0, 0, s);
      omega = m.sub(c0, c0 + s, 0, s);
      z = m.sub(0, c0, s, 2 * s);
      p = m.sub(c0, c0 + s, s, 2 * s);
      if (mode == SDiagMode::PythChol) {
        t_next = m.sub(c0 + s, c0 + 2 * s, s, 2 * s);
      }
    } else {
      DenseMatrix m = fused_gram({prefix_span(out.q, k), span(u, 0, s)},
                                 {span(u, 0, s)}, comm, "fused_gram:final");
      ycol = m.sub(0, c0, 0, s);
      omega = m.sub(c0, c0 + s, 0, s);
    }

    DenseMatrix ydiag;
    try {
      ydiag = pyth_chol(omega, ycol);
    } catch (const NotSpdError& e) {
      rethrow_not_spd(e, name, "second-pass Pythagorean normalization", k + 1,
                      kappa_power);
    }
    // Q_{k+1} = (U - Q_{1:k} Y) Y_diag^{-1}
    local_axpy_block(u, 0, s, out.q, 0, c0, ycol);
    scale_right_block(u, 0, s, ydiag);
    set_block(out.q, c0, u);
    store_column_blocks(out.r, k, scol + multiply(ycol, sdiag));
    out.r.set_block(k, k, upper_product(ydiag, sdiag));

    if (!has_next) break;

    // Delayed reprojection: S2 = Y_diag^{-T} (P - Y^T Z) stands in for the
    // never-communicated product Q_{k+1}^T X_{k+2}.
    DenseMatrix s2 = tri_solve_left_trans(ydiag, p - multiply_at_b(ycol, z));
    if (probe && probe->on_eval) {
      probe->on_eval(k + 1, s2, out.q.local().sub(0, out.q.local_rows(), c0, c0 + s),
                     x.local().sub(0, x.local_rows(), c0 + s, c0 + 2 * s));
    }
    scol = vstack(z, s2);  // S_{1:k+1,k+2}

    DistBlockMatrix un = extract_block(x, c0 + s, c0 + 2 * s);
    local_axpy_block(un, 0, s, out.q, 0, c0 + s, scol);
    if (mode == SDiagMode::TsqrPath) {
      auto [u2, sd] = tsqr(un, comm);
      u = std::move(u2);
      sdiag = std::move(sd);
    } else if (mode == SDiagMode::PythChol) {
      try {
        sdiag = pyth_chol(t_next, scol);
      } catch (const NotSpdError& e) {
        rethrow_not_spd(e, name, "first-pass Pythagorean normalization", k + 2,
                        kappa_power);
      }
      scale_right_block(un, 0, s, sdiag);
      u = std::move(un);
    } else {
      // SkipNorm: the projected block is carried unnormalized and the R
      // assembly uses S_diag = I.
      sdiag = DenseMatrix::identity(s);
      u = std::move(un);
    }
  }
  return out;
}

template <typename Fn>
BcgsResult with_stats(const DistBlockMatrix& x, Communicator& comm, Fn impl) {
  check_shape(x);
  const SyncStats before = comm.stats();
  BcgsResult out = impl();
  out.stats = stats_since(before, comm.stats());
  return out;
}

}  // namespace

BcgsResult bcgs_classic(const DistBlockMatrix& x, Communicator& comm,
                        IntraorthKind intra) {
  return with_stats(x, comm, [&] { return classic_impl(x, comm, intra); });
}

BcgsResult bcgs_iro(const DistBlockMatrix& x, Communicator& comm) {
  return with_stats(x, comm, [&] { return iro_impl(x, comm); });
}

BcgsResult bcgs_pipi_plus(const DistBlockMatrix& x, Communicator& comm) {
  return with_stats(x, comm, [&] { return pipi_impl(x, comm); });
}

BcgsResult bcgs_ip_1s(const DistBlockMatrix& x, Communicator& comm,
                      const RecurrenceProbe* probe) {
  return with_stats(x, comm, [&] {
    return onesync_impl(x, comm, SDiagMode::PythChol, "BCGSI+P-1S", 2, probe);
  });
}

BcgsResult bcgs_ip_2s(const DistBlockMatrix& x, Communicator& comm) {
  return with_stats(x, comm, [&] {
    return onesync_impl(x, comm, SDiagMode::TsqrPath, "BCGSI+P-2S", 1, nullptr);
  });
}

BcgsResult bcgs_i_1s(const DistBlockMatrix& x, Communicator& comm) {
  return with_stats(x, comm, [&] {
    return onesync_impl(x, comm, SDiagMode::SkipNorm, "BCGSI+1S", 3, nullptr);
  });
}

BcgsResult run_variant(VariantId v, const DistBlockMatrix& x, Communicator& comm,
                       const BcgsOptions& opts) {
  switch (v) {
    case VariantId::Bcgs:
      return bcgs_classic(x, comm, opts.classic_intra);
    case VariantId::BcgsIro:
      return bcgs_iro(x, comm);
    case VariantId::BcgsPipiPlus:
      return bcgs_pipi_plus(x, comm);
    case VariantId::BcgsIp1s:
      return bcgs_ip_1s(x, comm, opts.probe);
    case VariantId::BcgsIp2s:
      return bcgs_ip_2s(x, comm);
    case VariantId::BcgsI1s:
      return bcgs_i_1s(x, comm);
  }
  throw Error("run_variant: unknown variant id");
}

}  // namespace blockgs
