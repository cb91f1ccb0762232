#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sca/errors.hpp"
#include "sca/oracle.hpp"

namespace sca {

// Eigenvector error vs bandwidth, the reusable core of the convergence
// study: sample i.i.d. clouds from a 1-d Gaussian mixture, fit the kernel
// Markov model per bandwidth, and measure the s-hat-weighted, sign-aligned
// distance between psi_ell and the quadrature reference evaluated at the
// sample points.
struct EigenvectorErrorConfig {
  std::vector<double> means = {-2.0, 2.0};
  std::vector<double> sds = {1.0, 1.0};
  std::vector<double> weights = {0.5, 0.5};
  Eigen::Index n = 1000;
  int seeds = 50;
  std::vector<double> epsilons = {0.02, 0.03, 0.05, 0.1, 0.3, 1.0};
  int ell = 1;
  double reference_epsilon = 1e-3;
  Eigen::Index reference_grid = 4096;
  std::uint64_t seed = 0;
};

struct EigenvectorErrorResult {
  Eigen::MatrixXd errors;       // seeds x epsilons; NaN where a fit failed
  Eigen::VectorXd mean_errors;  // column means over finite entries
  std::vector<double> epsilons;
  long failures = 0;  // fits aborted by numeric guards
};

EigenvectorErrorResult eigenvector_error_curve(
    const EigenvectorErrorConfig& config, Warnings* warnings = nullptr);

// Piecewise-linear interpolation of a grid function, clamped at the ends.
Eigen::VectorXd interpolate_linear(const Eigen::VectorXd& grid,
                                   const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& at);

// || estimate -+ reference ||_s with the sign resolved by the s-weighted
// inner product, the error measure used throughout the convergence study.
double aligned_error(const Eigen::VectorXd& estimate,
                     const Eigen::VectorXd& reference,
                     const Eigen::VectorXd& stationary);

}  // namespace sca
