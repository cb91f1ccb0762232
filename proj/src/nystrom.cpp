#include "sca/nystrom.hpp"

#include <cmath>
#include <string>

#include "sca/errors.hpp"

namespace sca {

namespace {

constexpr double kLambdaGuard = 1e-8;

// Cross-kernel between query and training points, matching the training
// kernel family. The density prefactor cancels in the extension ratio and
// is omitted.
Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& query,
                             const Eigen::MatrixXd& train,
                             const SpectralDecomposition& dec) {
  const Eigen::Index m = query.rows();
  const Eigen::Index n = train.rows();
  Eigen::MatrixXd d2(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    d2.row(a) =
        (train.rowwise() - query.row(a)).rowwise().squaredNorm().transpose();
  }
  if (dec.kind == KernelKind::adjacency01) {
    const double tau2 = 2.0 * dec.epsilon;
    return (d2.array() <= tau2)
        .select(Eigen::MatrixXd::Ones(m, n), Eigen::MatrixXd::Zero(m, n));
  }
  // Scalar std::exp: distant queries must underflow to exactly zero mass so
  // the isolation check below can fire (vectorized exp clamps to subnormals).
  Eigen::MatrixXd k = (-d2.array() / (4.0 * dec.epsilon))
                          .unaryExpr([](double a) { return std::exp(a); })
                          .matrix();
  if (dec.truncation_factor > 0.0) {
    const double cut2 =
        dec.truncation_factor * dec.truncation_factor * dec.epsilon;
    k = (d2.array() > cut2).select(0.0, k);
  }
  return k;
}

void validate_query(const PointCloud& cloud, const ExtensionQuery& query) {
  if (query.points.rows() > 0 && query.points.cols() != cloud.points.cols()) {
    throw ParameterError("query dimension does not match training cloud");
  }
  if (!query.points.allFinite()) {
    throw ParameterError("query coordinates must be finite");
  }
}

Eigen::VectorXd extend_with_kernel(const Eigen::MatrixXd& cross,
                                   const Eigen::VectorXd& denominators,
                                   const SpectralDecomposition& dec, int ell) {
  const double lambda = dec.eigenvalues(ell);
  if (std::abs(lambda) < kLambdaGuard) {
    throw IllConditionedExtensionError(ell, lambda);
  }
  return (cross * dec.psi.col(ell)).cwiseQuotient(denominators) / lambda;
}

}  // namespace

Eigen::VectorXd extend_eigenvector(const PointCloud& cloud,
                                   const SpectralDecomposition& dec, int ell,
                                   const ExtensionQuery& query) {
  if (ell < 0 || ell > dec.q) {
    throw ParameterError("eigenvector index out of range");
  }
  validate_query(cloud, query);
  if (query.points.rows() == 0) return Eigen::VectorXd();

  Eigen::MatrixXd cross = cross_kernel(query.points, cloud.points, dec);
  Eigen::VectorXd denom = cross.rowwise().sum();
  for (Eigen::Index a = 0; a < denom.size(); ++a) {
    if (denom(a) <= 0.0) {
      throw IsolatedVertexError(static_cast<long>(a));
    }
  }
  return extend_with_kernel(cross, denom, dec, ell);
}

Eigen::MatrixXd extend_embedding(const PointCloud& cloud,
                                 const SpectralDecomposition& dec, long m,
                                 int q, const ExtensionQuery& query) {
  if (m < 1) throw ParameterError("step count m must be >= 1");
  if (q < 1 || q > dec.q) {
    throw ParameterError("embedding dimension q must satisfy 1 <= q <= " +
                         std::to_string(dec.q));
  }
  validate_query(cloud, query);
  const Eigen::Index rows = query.points.rows();
  Eigen::MatrixXd out(rows, q);
  if (rows == 0) return out;

  Eigen::MatrixXd cross = cross_kernel(query.points, cloud.points, dec);
  Eigen::VectorXd denom = cross.rowwise().sum();
  for (Eigen::Index a = 0; a < denom.size(); ++a) {
    if (denom(a) <= 0.0) {
      throw IsolatedVertexError(static_cast<long>(a));
    }
  }
  for (int l = 1; l <= q; ++l) {
    out.col(l - 1) =
        std::pow(dec.eigenvalues(l), static_cast<double>(m)) *
        extend_with_kernel(cross, denom, dec, l);
  }
  return out;
}

}  // namespace sca
