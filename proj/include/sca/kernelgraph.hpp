#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "sca/pointcloud.hpp"

namespace sca {

enum class KernelKind { gaussian, adjacency01 };

// Pairwise kernel weights and degrees; the source of every operator.
// Self-weights are part of the degrees: the empirical smoothing operator
// averages over all sample points including the evaluation point itself.
struct KernelGraph {
  Eigen::MatrixXd weights;  // K, symmetric, K(i,j) = k_eps(X_i, X_j)
  Eigen::VectorXd degrees;  // rho_i = sum_j K(i,j), self included
  double epsilon = 0.0;     // bandwidth; h = sqrt(2*eps) is the kernel sd
  int dim = 0;
  bool normalized = true;  // (4*pi*eps)^(-d/2) prefactor applied
  KernelKind kind = KernelKind::gaussian;
  double truncation_factor = 0.0;  // 0 = no cutoff
};

// Gaussian kernel K(i,j) = (4*pi*eps)^(-d/2) exp(-|X_i-X_j|^2 / (4*eps)).
// truncation_factor > 0 enables an optional hard cutoff K(i,j) = 0 for
// |X_i-X_j| > truncation_factor*sqrt(eps); off by default.
KernelGraph build_kernel(const PointCloud& cloud, double epsilon,
                         double truncation_factor = 0.0);

// 0/1 adjacency kernel: K(i,j) = 1 iff |X_i-X_j| <= tau (diagonal included).
// Stored with epsilon = tau^2/2 so that sqrt(2*eps) recovers the threshold.
KernelGraph build_adjacency_kernel(const PointCloud& cloud, double tau);

// Kernel density estimate at the sample points: p_hat(X_i) = rho_i / n,
// i.e. the row mean of K.
Eigen::VectorXd kde(const KernelGraph& graph);

// Undirected graph connecting pairs at Euclidean distance <= tau.
struct EpsilonGraph {
  Eigen::Index vertices = 0;
  std::vector<std::array<Eigen::Index, 2>> edges;  // i < j, no self-loops
  std::vector<double> edge_weights;                // Euclidean lengths
  double threshold = 0.0;
};

EpsilonGraph epsilon_graph(const PointCloud& cloud, double tau);

// N_i = #{ X_j : |X_i - X_j| <= sqrt(2*eps) }, self included. The median is
// the standard order-statistic median (mean of the two middle values for
// even n).
struct NeighborCounts {
  std::vector<int> counts;
  double median = 0.0;
};

NeighborCounts neighbor_counts(const PointCloud& cloud, double epsilon);

}  // namespace sca
