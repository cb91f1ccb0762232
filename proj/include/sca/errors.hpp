#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sca {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct nonzero exit status.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: CSV rows, config JSON, flag values.
class ParseError : public Error {
 public:
  using Error::Error;
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_ = -1;
};

// Structurally valid input with out-of-domain values (bad bandwidth, weight
// vectors that do not sum to one, index out of range, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: solver non-convergence, kernel underflow, degenerate
// operators.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A vertex with zero degree; only reachable with non-Gaussian kernels.
class IsolatedVertexError : public NumericError {
 public:
  explicit IsolatedVertexError(long vertex)
      : NumericError("isolated vertex " + std::to_string(vertex) +
                     ": zero degree, chain undefined"),
        vertex_(vertex) {}
  long vertex() const { return vertex_; }

 private:
  long vertex_;
};

// Nystrom guard: eigenvalue too small to divide by.
class IllConditionedExtensionError : public NumericError {
 public:
  IllConditionedExtensionError(int ell, double lambda)
      : NumericError("extension of eigenvector " + std::to_string(ell) +
                     " is ill-conditioned: eigenvalue " +
                     std::to_string(lambda) + " <= 1e-8"),
        ell_(ell),
        lambda_(lambda) {}
  int ell() const { return ell_; }
  double lambda() const { return lambda_; }

 private:
  int ell_;
  double lambda_;
};

// Non-fatal diagnostics collected during a run; the CLI copies them into the
// manifest's warnings array.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string msg) {
  if (sink != nullptr) sink->push_back(std::move(msg));
}

}  // namespace sca
