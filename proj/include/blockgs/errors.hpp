#pragma once

#include <stdexcept>
#include <string>

namespace blockgs {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape or block-layout mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

/// A Cholesky pivot was not strictly positive.  `pivot` is 1-based.
struct NotSpdError : Error {
  NotSpdError(const std::string& msg, int pivot_index)
      : Error(msg), pivot(pivot_index) {}
  int pivot;
};

/// Exact zero on the diagonal of a triangular solve.  `index` is 1-based.
struct SingularError : Error {
  SingularError(const std::string& msg, int diag_index)
      : Error(msg), index(diag_index) {}
  int index;
};

/// Tall factor has fewer rows than columns.
struct RankDeficientError : Error {
  using Error::Error;
};

/// A kernel produced (or was fed) a NaN or infinity.
struct NonFiniteError : Error {
  using Error::Error;
};

/// Collective failure: shape/label mismatch across ranks, worker failure,
/// or the deadlock detector firing.
struct CollectiveError : Error {
  using Error::Error;
};

/// Benchmark configuration could not be parsed or is inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace blockgs
