#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sca/pointcloud.hpp"

namespace sca {

// Bootstrap signal-to-noise curve over a candidate bandwidth grid.
// snr entries can be +infinity: the zero-variance sentinel ("above any
// threshold"); serialization writes it as the string "inf", never as a
// floating-point infinity.
struct SnrCurve {
  std::vector<double> epsilons;  // strictly increasing candidate grid
  std::vector<double> snr;       // >= 0 per grid point
  int B = 0;                     // bootstrap replicate count
  int ell = 1;                   // eigenvector index analyzed
  std::optional<double> selected;  // min grid eps with snr >= threshold
  double threshold = 5.0;          // K_n

  // Per-grid-point diagnostics: degenerate-eigenvalue warnings raised by
  // any replicate fit, and replicates skipped by the extension or residual
  // guards (excluded from the averages).
  std::vector<bool> degenerate;
  std::vector<int> skipped;
};

// For each eps: B resamples with replacement, refit, evaluate the ell-th
// eigenvector at the ORIGINAL points via the kernel-smoothing extension,
// sign-align to the first surviving replicate, then
//   SNR = sqrt((|psi_bar|^2 - xi^2)_+ / xi^2),  xi^2 = mean |psi - psi_bar|^2,
// all norms weighted by the original sample's stationary density at eps.
// Replicate b at grid index e uses the RNG stream derive_seed(seed, e, b).
SnrCurve bootstrap_snr(const PointCloud& cloud, int ell,
                       const std::vector<double>& grid, int B,
                       double threshold, std::uint64_t seed);

// Same pipeline with the sign map sign(psi) in place of psi, targeting
// stability of the nodal partition rather than of the eigenvector itself.
SnrCurve bootstrap_snr_nodal(const PointCloud& cloud, int ell,
                             const std::vector<double>& grid, int B,
                             double threshold, std::uint64_t seed);

// Theoretical threshold scaling K_n = C * n^{2/(d+8)}.
double kn_scaling(double C, Eigen::Index n, int dim);

// Smallest grid eps whose neighbor-count median (ball radius sqrt(2*eps),
// self included) reaches k.
struct NeighborhoodSelection {
  std::vector<double> epsilons;
  std::vector<double> medians;
  std::optional<double> selected;
  int k = 1;
};

NeighborhoodSelection neighborhood_rule(const PointCloud& cloud,
                                        const std::vector<double>& grid,
                                        int k);

// Longest edge L of the Euclidean minimum spanning tree; eps = L^2/2 makes
// the sqrt(2*eps)-neighborhood graph connected.
struct MstSelection {
  double longest_edge = 0.0;
  double epsilon = 0.0;
};

MstSelection mst_rule(const PointCloud& cloud);

}  // namespace sca
