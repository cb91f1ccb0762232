#include "sca/kernelgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sca/errors.hpp"

namespace sca {

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& pts) {
  const Eigen::Index n = pts.rows();
  Eigen::VectorXd sq = pts.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                       2.0 * (pts * pts.transpose());
  // Clamp tiny negatives from cancellation and force exact symmetry.
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  d2 = ((d2 + d2.transpose()) / 2.0).eval();
  return d2;
}

}  // namespace

KernelGraph build_kernel(const PointCloud& cloud, double epsilon,
                         double truncation_factor) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("bandwidth epsilon must be positive and finite");
  }
  if (truncation_factor < 0.0) {
    throw ParameterError("truncation factor must be nonnegative");
  }
  const Eigen::Index n = cloud.size();
  if (n == 0) throw ParameterError("point cloud is empty");
  const int d = static_cast<int>(cloud.dim());

  KernelGraph g;
  g.epsilon = epsilon;
  g.dim = d;
  g.normalized = true;
  g.kind = KernelKind::gaussian;
  g.truncation_factor = truncation_factor;

  const double prefactor =
      std::pow(4.0 * std::numbers::pi * epsilon, -0.5 * d);
  Eigen::MatrixXd d2 = squared_distances(cloud.points);
  // Scalar std::exp so that entries beyond the underflow range become exact
  // zeros (the vectorized path clamps to a subnormal floor instead), keeping
  // "no kernel mass" detectable as a zero degree.
  g.weights = (prefactor * (-d2.array() / (4.0 * epsilon))
                               .unaryExpr([](double a) { return std::exp(a); }))
                  .matrix();

  if (truncation_factor > 0.0) {
    const double cut2 =
        truncation_factor * truncation_factor * epsilon;  // (r*sqrt(eps))^2
    g.weights = (d2.array() > cut2).select(0.0, g.weights);
  }

  g.degrees = g.weights.rowwise().sum();
  return g;
}

KernelGraph build_adjacency_kernel(const PointCloud& cloud, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ParameterError("adjacency threshold tau must be positive and finite");
  }
  const Eigen::Index n = cloud.size();
  if (n == 0) throw ParameterError("point cloud is empty");

  KernelGraph g;
  g.epsilon = tau * tau / 2.0;
  g.dim = static_cast<int>(cloud.dim());
  g.normalized = false;
  g.kind = KernelKind::adjacency01;

  Eigen::MatrixXd d2 = squared_distances(cloud.points);
  g.weights = (d2.array() <= tau * tau)
                  .select(Eigen::MatrixXd::Ones(n, n),
                          Eigen::MatrixXd::Zero(n, n));
  g.degrees = g.weights.rowwise().sum();
  return g;
}

Eigen::VectorXd kde(const KernelGraph& graph) {
  const auto n = static_cast<double>(graph.weights.rows());
  return graph.degrees / n;
}

EpsilonGraph epsilon_graph(const PointCloud& cloud, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ParameterError("graph threshold tau must be positive and finite");
  }
  EpsilonGraph g;
  g.vertices = cloud.size();
  g.threshold = tau;
  const double tau2 = tau * tau;
  const Eigen::Index d = cloud.points.cols();
  // Row-major copy so the pairwise scan walks contiguous memory.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts =
      cloud.points;
  const double* data = pts.data();
  for (Eigen::Index i = 0; i < g.vertices; ++i) {
    const double* pi = data + i * d;
    for (Eigen::Index j = i + 1; j < g.vertices; ++j) {
      const double* pj = data + j * d;
      double d2 = 0.0;
      for (Eigen::Index c = 0; c < d && d2 <= tau2; ++c) {
        const double diff = pi[c] - pj[c];
        d2 += diff * diff;
      }
      if (d2 <= tau2) {
        g.edges.push_back({i, j});
        g.edge_weights.push_back(std::sqrt(d2));
      }
    }
  }
  return g;
}

NeighborCounts neighbor_counts(const PointCloud& cloud, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("bandwidth epsilon must be positive and finite");
  }
  const Eigen::Index n = cloud.size();
  if (n == 0) throw ParameterError("point cloud is empty");
  const double r2 = 2.0 * epsilon;  // (sqrt(2*eps))^2

  NeighborCounts nc;
  nc.counts.assign(static_cast<size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int c = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d2 =
          (cloud.points.row(i) - cloud.points.row(j)).squaredNorm();
      if (d2 <= r2) ++c;
    }
    nc.counts[static_cast<size_t>(i)] = c;
  }

  std::vector<int> sorted = nc.counts;
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size();
  if (m % 2 == 1) {
    nc.median = sorted[m / 2];
  } else {
    nc.median = (static_cast<double>(sorted[m / 2 - 1]) + sorted[m / 2]) / 2.0;
  }
  return nc;
}

}  // namespace sca
