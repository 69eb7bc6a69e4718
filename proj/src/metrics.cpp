#include "blockgs/metrics.hpp"

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

double loss_of_orthogonality(const DenseMatrix& q) {
  DenseMatrix g = gram(q, q);
  for (long i = 0; i < g.rows(); ++i) {
    g(i, i) -= 1.0;
  }
  return two_norm(g);
}

ResidualResult residual(const DenseMatrix& x, const DenseMatrix& q,
                        const DenseMatrix& r) {
  if (q.rows() != x.rows() || r.cols() != x.cols() || q.cols() != r.rows()) {
    throw DimensionError("residual: factor shapes do not conform with X");
  }
  const DenseMatrix diff = x - multiply(q, r);
  const double num = diff.frobenius_norm();
  const double den = x.frobenius_norm();
  if (den == 0.0) {
    return {num, true};  // X == 0: report the absolute reconstruction norm
  }
  return {num / den, false};
}

}  // namespace blockgs
