#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sca/diffusion.hpp"
#include "sca/markov.hpp"

namespace sca {

// k-means quantization of the diffusion embedding. Cluster "meta-point"
// representatives are the sample points nearest their centers.
struct Quantization {
  Eigen::MatrixXd centers;                  // k x q diffusion coordinates
  std::vector<int> assignment;              // per-point cluster index
  int k = 0;
  std::vector<Eigen::Index> representatives;  // per-cluster sample index
  double distortion = 0.0;  // mean squared distance to own center
};

// Best of `restarts` distance-weighted seeded runs (restart r uses the RNG
// stream derive_seed(seed, r)). An empty cluster is re-seeded at the point
// farthest from its current center. Distortion is asserted nonincreasing
// across iterations.
Quantization kmeans_diffusion(const DiffusionEmbedding& embedding, int k,
                              std::uint64_t seed, int restarts = 10);

// k-state chain aggregated over clusters with stationary weights:
//   transition(c,c') = sum_{i in c, j in c'} s_i A^m(i,j) / sum_{i in c} s_i
//   masses(c)        = sum_{i in c} s_i
// so the coarse chain's stationary distribution is exactly `masses` and
// total mass is preserved.
struct CoarseChain {
  Eigen::MatrixXd transition;  // k x k, rows sum to 1
  Eigen::VectorXd masses;      // positive, sums to 1
  long m = 1;                  // fine-chain steps aggregated
};

CoarseChain coarse_chain(const MarkovChain& model, const Quantization& quant,
                         long m);

// Relative eigenvalue gaps |lambda_l(coarse) - lambda_l(fine)^m| /
// lambda_l(fine)^m for l = 1..j. A diagnostic: small gaps mean the
// quantized chain retains the slow spectral structure of the fine chain.
std::vector<double> spectral_fidelity(const MarkovChain& model,
                                      const CoarseChain& coarse, int j);

}  // namespace sca
