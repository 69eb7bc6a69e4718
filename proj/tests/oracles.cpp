#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace blockgs::testing {

DenseMatrix gram_oracle(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.cols(), b.cols());
  for (long j = 0; j < b.cols(); ++j) {
    for (long i = 0; i < a.cols(); ++i) {
      __float128 acc = 0;
      for (long k = 0; k < a.rows(); ++k) {
        acc += static_cast<__float128>(a(k, i)) * static_cast<__float128>(b(k, j));
      }
      out(i, j) = static_cast<double>(acc);
    }
  }
  return out;
}

std::vector<double> singular_values_oracle(DenseMatrix a) {
  const long n = a.rows();
  const long m = a.cols();
  bool changed = true;
  for (int sweep = 0; sweep < 60 && changed; ++sweep) {
    changed = false;
    for (long p = 0; p < m - 1; ++p) {
      for (long q = p + 1; q < m; ++q) {
        long double app = 0.0L, aqq = 0.0L, apq = 0.0L;
        for (long i = 0; i < n; ++i) {
          const long double vip = a(i, p);
          const long double viq = a(i, q);
          app += vip * vip;
          aqq += viq * viq;
          apq += vip * viq;
        }
        if (app == 0.0L || aqq == 0.0L) continue;
        if (fabsl(apq) <= 1e-17L * sqrtl(app) * sqrtl(aqq)) continue;
        changed = true;
        const long double tau = (aqq - app) / (2.0L * apq);
        const long double t =
            (tau >= 0.0L ? 1.0L : -1.0L) / (fabsl(tau) + sqrtl(1.0L + tau * tau));
        const long double c = 1.0L / sqrtl(1.0L + t * t);
        const long double s = c * t;
        for (long i = 0; i < n; ++i) {
          const long double vip = a(i, p);
          const long double viq = a(i, q);
          a(i, p) = static_cast<double>(c * vip - s * viq);
          a(i, q) = static_cast<double>(s * vip + c * viq);
        }
      }
    }
  }
  std::vector<double> sv(static_cast<size_t>(m));
  for (long j = 0; j < m; ++j) {
    long double ssq = 0.0L;
    for (long i = 0; i < n; ++i) {
      const long double v = a(i, j);
      ssq += v * v;
    }
    sv[static_cast<size_t>(j)] = static_cast<double>(sqrtl(ssq));
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double kappa_oracle(const DenseMatrix& a) {
  const std::vector<double> sv = singular_values_oracle(a);
  return sv.front() / sv.back();
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).max_abs();
}

double ulp_gap(double a, double b) {
  if (a == b) return 0.0;
  const double step = std::abs(std::nextafter(a, b) - a);
  return std::abs(a - b) / step;
}

DenseMatrix lcg_matrix(long rows, long cols, unsigned long long seed) {
  DenseMatrix m(rows, cols);
  unsigned long long state = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      // Top bits, mapped to [-1, 1).
      m(i, j) = static_cast<double>(state >> 11) * 0x1.0p-52 - 1.0;
    }
  }
  return m;
}

}  // namespace blockgs::testing
