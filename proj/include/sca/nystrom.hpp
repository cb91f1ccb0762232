#pragma once

#include <Eigen/Dense>

#include "sca/pointcloud.hpp"
#include "sca/spectral.hpp"

namespace sca {

// Out-of-sample evaluation locations; none need be training points.
struct ExtensionQuery {
  Eigen::MatrixXd points;  // m x d, d matching the training cloud

  ExtensionQuery(Eigen::MatrixXd p) : points(std::move(p)) {}  // NOLINT
};

// Kernel-smoothing extension of an eigenvector:
//   psi_l(x) = sum_i k_eps(x, X_i) psi_l(i) / (lambda_l sum_i k_eps(x, X_i)).
// Exact at training points (the eigenvector equation itself). Values are
// bounded by max_i |psi_l(i)| / lambda_l. Throws
// IllConditionedExtensionError when |lambda_l| < 1e-8.
Eigen::VectorXd extend_eigenvector(const PointCloud& cloud,
                                   const SpectralDecomposition& dec, int ell,
                                   const ExtensionQuery& query);

// Diffusion-map coordinates at new points: column l-1 = lambda_l^m psi_l(x),
// l = 1..q. Requires every lambda_1..lambda_q to pass the extension guard.
Eigen::MatrixXd extend_embedding(const PointCloud& cloud,
                                 const SpectralDecomposition& dec, long m,
                                 int q, const ExtensionQuery& query);

}  // namespace sca
