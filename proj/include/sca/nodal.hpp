#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sca/spectral.hpp"

namespace sca {

// Sign map of an eigenvector; the nodal domains are its level sets.
struct NodalMap {
  Eigen::VectorXi signs;  // in {-1, 0, +1}; 0 only for exact zeros
  int ell = 0;
  double epsilon = 0.0;
};

NodalMap nodal_map(const SpectralDecomposition& dec, int ell);

// Fraction of disagreeing points minimized over a global sign flip (the
// +- ambiguity of an eigenvector is global). A zero entry disagrees with
// any nonzero sign. Symmetric in its arguments.
double nodal_error(const NodalMap& estimate, const NodalMap& reference);

// Weighted measure of { 0 < |psi1| <= delta } per delta, for grid values
// with quadrature weights. The decay of this mass as delta -> 0 governs how
// fast the sign map can be estimated.
std::vector<double> noise_exponent_curve(const Eigen::VectorXd& psi1,
                                         const Eigen::VectorXd& weights,
                                         const std::vector<double>& deltas);

// Diagnostic log-log slope of the mass curve over deltas in
// [fit_min, fit_max] (only bins with positive mass enter the regression).
// Absent when fewer than two usable points fall in the range.
std::optional<double> fit_noise_exponent(const std::vector<double>& deltas,
                                         const std::vector<double>& masses,
                                         double fit_min, double fit_max);

}  // namespace sca
