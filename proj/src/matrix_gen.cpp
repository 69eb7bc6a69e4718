#include "blockgs/matrix_gen.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

namespace {

/// Box-Muller over a 64-bit Mersenne Twister.  Self-contained so that the
/// draw sequence (and therefore every generated matrix) is pinned down by
/// this file alone, not by a standard library's unspecified
/// normal_distribution algorithm.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unit();
    const double u2 = unit();
    // 1 - u1 lies in (0, 1], so the log is finite.
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double unit() {
    // Top 53 bits -> [0, 1) with full double resolution.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

DenseMatrix gaussian_matrix(long rows, long cols, GaussianStream& g) {
  DenseMatrix m(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      m(i, j) = g.next();
    }
  }
  return m;
}

}  // namespace

DenseMatrix gen_matrix(const MatrixSpec& spec) {
  if (spec.m < 1) {
    throw DimensionError("gen_matrix: column count must be at least 1");
  }
  if (spec.n < spec.m) {
    throw DimensionError("gen_matrix: need n >= m for an economic test matrix");
  }
  if (spec.s < 1 || spec.m % spec.s != 0) {
    throw DimensionError(
        "gen_matrix: column count must be a positive multiple of the block "
        "width");
  }
  if (!(spec.kappa >= 1.0)) {
    throw ConfigError("gen_matrix: kappa must be at least 1");
  }

  GaussianStream g(spec.seed);
  if (spec.distribution == MatrixDistribution::RandomGaussian) {
    return gaussian_matrix(spec.n, spec.m, g);
  }

  DenseMatrix u = householder_qr(gaussian_matrix(spec.n, spec.m, g)).q;
  DenseMatrix v = householder_qr(gaussian_matrix(spec.m, spec.m, g)).q;
  std::vector<double> sigma(static_cast<size_t>(spec.m));
  for (long i = 0; i < spec.m; ++i) {
    sigma[static_cast<size_t>(i)] =
        spec.m == 1 ? 1.0
                    : std::pow(spec.kappa,
                               -static_cast<double>(i) /
                                   static_cast<double>(spec.m - 1));
  }
  for (long j = 0; j < spec.m; ++j) {
    for (long i = 0; i < spec.n; ++i) {
      u(i, j) *= sigma[static_cast<size_t>(j)];
    }
  }
  return multiply(u, v.transposed());
}

}  // namespace blockgs
