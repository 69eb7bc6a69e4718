#include "blockgs/dense_kernels.hpp"

#include <cmath>
#include <string>

#include "blockgs/errors.hpp"

namespace blockgs {

void gram_accumulate(const DenseMatrix& a, const DenseMatrix& b,
                     std::vector<ExactAccumulator>& accs) {
  if (a.rows() != b.rows()) {
    throw DimensionError("gram_accumulate: row counts differ");
  }
  size_t want = static_cast<size_t>(a.cols()) * static_cast<size_t>(b.cols());
  if (accs.size() != want) {
    throw DimensionError("gram_accumulate: accumulator grid has wrong size");
  }
  for (long j = 0; j < b.cols(); ++j) {
    for (long i = 0; i < a.cols(); ++i) {
      ExactAccumulator& acc = accs[static_cast<size_t>(j) * a.cols() + i];
      for (long k = 0; k < a.rows(); ++k) {
        acc.add_product(a(k, i), b(k, j));
      }
    }
  }
}

DenseMatrix gram(const DenseMatrix& a, const DenseMatrix& b) {
  std::vector<ExactAccumulator> accs(static_cast<size_t>(a.cols()) *
                                     static_cast<size_t>(b.cols()));
  gram_accumulate(a, b, accs);
  return round_accumulators(a.cols(), b.cols(), accs);
}

DenseMatrix round_accumulators(long rows, long cols,
                               const std::vector<ExactAccumulator>& accs) {
  if (accs.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw DimensionError("round_accumulators: grid size mismatch");
  }
  DenseMatrix out(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      const ExactAccumulator& acc = accs[static_cast<size_t>(j) * rows + i];
      if (acc.poisoned()) {
        throw NonFiniteError("reduction saw a NaN or infinity");
      }
      out(i, j) = acc.round_to_double();
    }
  }
  return out;
}

DenseMatrix chol_factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("chol_factor: matrix must be square");
  }
  long n = a.rows();
  // Work on the symmetrized input so tiny asymmetries from rounding cannot
  // steer the factorization.
  DenseMatrix s(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) {
      s(i, j) = 0.5 * (a(i, j) + a(j, i));
    }
  }
  DenseMatrix g(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i <= j; ++i) {
      double acc = s(i, j);
      for (long k = 0; k < i; ++k) {
        acc -= g(k, i) * g(k, j);
      }
      if (i == j) {
        if (!(acc > 0.0)) {
          throw NotSpdError("cholesky pivot " + std::to_string(j + 1) +
                                " is not strictly positive",
                            static_cast<int>(j + 1));
        }
        g(j, j) = std::sqrt(acc);
      } else {
        g(i, j) = acc / g(i, i);
      }
    }
  }
  return g;
}

DenseMatrix tri_solve_right(const DenseMatrix& b, const DenseMatrix& g) {
  if (g.rows() != g.cols() || b.cols() != g.rows()) {
    throw DimensionError("tri_solve_right: shape mismatch");
  }
  long n = g.rows();
  DenseMatrix w(b.rows(), n);
  for (long j = 0; j < n; ++j) {
    if (g(j, j) == 0.0) {
      throw SingularError("triangular factor has a zero at diagonal entry " +
                              std::to_string(j + 1),
                          static_cast<int>(j + 1));
    }
    for (long i = 0; i < b.rows(); ++i) {
      double acc = b(i, j);
      for (long k = 0; k < j; ++k) {
        acc -= w(i, k) * g(k, j);
      }
      w(i, j) = acc / g(j, j);
    }
  }
  return w;
}

DenseMatrix tri_solve_left_trans(const DenseMatrix& g, const DenseMatrix& b) {
  if (g.rows() != g.cols() || b.rows() != g.rows()) {
    throw DimensionError("tri_solve_left_trans: shape mismatch");
  }
  long n = g.rows();
  DenseMatrix w(n, b.cols());
  for (long i = 0; i < n; ++i) {
    if (g(i, i) == 0.0) {
      throw SingularError("triangular factor has a zero at diagonal entry " +
                              std::to_string(i + 1),
                          static_cast<int>(i + 1));
    }
    for (long j = 0; j < b.cols(); ++j) {
      double acc = b(i, j);
      for (long k = 0; k < i; ++k) {
        acc -= g(k, i) * w(k, j);
      }
      w(i, j) = acc / g(i, i);
    }
  }
  return w;
}

QrResult householder_qr(const DenseMatrix& x) {
  long m = x.rows();
  long n = x.cols();
  long p = std::min(m, n);
  DenseMatrix a = x;
  std::vector<double> taus(static_cast<size_t>(p), 0.0);
  std::vector<std::vector<double>> vs(static_cast<size_t>(p));

  for (long k = 0; k < p; ++k) {
    // Scaled column norm of a(k:m, k).
    double mx = 0.0;
    for (long i = k; i < m; ++i) mx = std::max(mx, std::fabs(a(i, k)));
    if (mx == 0.0) continue;  // column already zero; R(k,k) = 0
    double ssq = 0.0;
    for (long i = k; i < m; ++i) {
      double t = a(i, k) / mx;
      ssq += t * t;
    }
    double sigma = mx * std::sqrt(ssq);
    double alpha = a(k, k) >= 0.0 ? -sigma : sigma;
    std::vector<double> v(static_cast<size_t>(m - k));
    v[0] = a(k, k) - alpha;
    for (long i = k + 1; i < m; ++i) v[static_cast<size_t>(i - k)] = a(i, k);
    double vtv = 0.0;
    for (double t : v) vtv += t * t;
    double tau = vtv == 0.0 ? 0.0 : 2.0 / vtv;
    a(k, k) = alpha;
    for (long i = k + 1; i < m; ++i) a(i, k) = 0.0;
    for (long j = k + 1; j < n; ++j) {
      double w = 0.0;
      for (long i = k; i < m; ++i) w += v[static_cast<size_t>(i - k)] * a(i, j);
      w *= tau;
      for (long i = k; i < m; ++i) a(i, j) -= w * v[static_cast<size_t>(i - k)];
    }
    taus[static_cast<size_t>(k)] = tau;
    vs[static_cast<size_t>(k)] = std::move(v);
  }

  DenseMatrix r(p, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i <= std::min(j, p - 1); ++i) {
      r(i, j) = a(i, j);
    }
  }

  // Q = H_0 ... H_{p-1} applied to the first p identity columns.
  DenseMatrix q(m, p);
  for (long i = 0; i < p; ++i) q(i, i) = 1.0;
  for (long k = p - 1; k >= 0; --k) {
    const std::vector<double>& v = vs[static_cast<size_t>(k)];
    double tau = taus[static_cast<size_t>(k)];
    if (tau == 0.0) continue;
    for (long j = 0; j < p; ++j) {
      double w = 0.0;
      for (long i = k; i < m; ++i) w += v[static_cast<size_t>(i - k)] * q(i, j);
      w *= tau;
      for (long i = k; i < m; ++i) q(i, j) -= w * v[static_cast<size_t>(i - k)];
    }
  }

  // Canonical sign: make the diagonal of R nonnegative.
  for (long k = 0; k < p; ++k) {
    if (r(k, k) < 0.0) {
      for (long j = k; j < n; ++j) r(k, j) = -r(k, j);
      for (long i = 0; i < m; ++i) q(i, k) = -q(i, k);
    }
  }
  return {std::move(q), std::move(r)};
}

double two_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  DenseMatrix g = gram(a, a);
  long m = g.rows();
  std::vector<double> v(static_cast<size_t>(m));
  for (long i = 0; i < m; ++i) {
    v[static_cast<size_t>(i)] = 1.0 + static_cast<double>(i % 13) / 16.0;
  }
  double nv = 0.0;
  for (double t : v) nv += t * t;
  nv = std::sqrt(nv);
  for (double& t : v) t /= nv;

  double lambda_prev = 0.0;
  double lambda = 0.0;
  std::vector<double> w(static_cast<size_t>(m));
  for (int iter = 0; iter < 5000; ++iter) {
    for (long i = 0; i < m; ++i) {
      double acc = 0.0;
      for (long k = 0; k < m; ++k) {
        acc += g(i, k) * v[static_cast<size_t>(k)];
      }
      w[static_cast<size_t>(i)] = acc;
    }
    double nw = 0.0;
    for (double t : w) nw += t * t;
    nw = std::sqrt(nw);
    if (nw == 0.0) return 0.0;
    lambda = nw;
    for (long i = 0; i < m; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / nw;
    if (std::fabs(lambda - lambda_prev) <= 1e-10 * lambda) break;
    lambda_prev = lambda;
  }
  return std::sqrt(lambda);
}

void ensure_finite(const DenseMatrix& m, const char* what) {
  if (!m.all_finite()) {
    throw NonFiniteError(std::string(what) + ": non-finite entries");
  }
}

}  // namespace blockgs
