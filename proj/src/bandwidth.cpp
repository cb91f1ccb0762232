#include "sca/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sca/errors.hpp"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/nystrom.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"

namespace sca {

namespace {

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ParameterError("bandwidth grid is empty");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw ParameterError("bandwidth grid entries must be positive finite");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw ParameterError("bandwidth grid must be strictly increasing");
    }
  }
}

double weighted_sq_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return (v.array().square() * w.array()).sum();
}

SnrCurve run_bootstrap(const PointCloud& cloud, int ell,
                       const std::vector<double>& grid, int B,
                       double threshold, std::uint64_t seed, bool nodal) {
  validate_grid(grid);
  if (B < 2) throw ParameterError("bootstrap needs B >= 2 replicates");
  if (ell < 0) throw ParameterError("eigenvector index must be nonnegative");
  const Eigen::Index n = cloud.size();
  if (static_cast<Eigen::Index>(ell) + 1 > n) {
    throw ParameterError("eigenvector index exceeds sample size");
  }

  SnrCurve curve;
  curve.epsilons = grid;
  curve.B = B;
  curve.ell = ell;
  curve.threshold = threshold;
  curve.snr.assign(grid.size(), 0.0);
  curve.degenerate.assign(grid.size(), false);
  curve.skipped.assign(grid.size(), 0);

  const int q_fit = std::max(ell, 1);
  const ExtensionQuery original(cloud.points);

  for (size_t e = 0; e < grid.size(); ++e) {
    const double eps = grid[e];

    // Weighting measure: the original sample's stationary density at eps.
    KernelGraph base = build_kernel(cloud, eps);
    Eigen::VectorXd s_hat = base.degrees / base.degrees.sum();

    std::vector<Eigen::VectorXd> replicates;
    replicates.reserve(static_cast<size_t>(B));
    bool degenerate_here = false;
    int skipped_here = 0;

    for (int b = 0; b < B; ++b) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(e),
                          static_cast<std::uint64_t>(b)));
      PointCloud boot;
      boot.points.resize(n, cloud.points.cols());
      for (Eigen::Index i = 0; i < n; ++i) {
        boot.points.row(i) =
            cloud.points.row(static_cast<Eigen::Index>(rng.index(
                static_cast<std::uint64_t>(n))));
      }
      try {
        MarkovChain chain = build_markov(build_kernel(boot, eps));
        SpectralDecomposition dec = decompose(chain, q_fit);
        for (int p : dec.degenerate_pairs) {
          if (p == ell - 1 || p == ell) degenerate_here = true;
        }
        Eigen::VectorXd values = extend_eigenvector(boot, dec, ell, original);
        if (nodal) values = values.array().sign().matrix();
        replicates.push_back(std::move(values));
      } catch (const IllConditionedExtensionError&) {
        ++skipped_here;
      } catch (const NumericError&) {
        ++skipped_here;
      }
    }

    curve.degenerate[e] = degenerate_here;
    curve.skipped[e] = skipped_here;
    if (replicates.size() < 2) {
      curve.snr[e] = 0.0;
      continue;
    }

    // Global sign is arbitrary per replicate; align to the first survivor.
    for (size_t b = 1; b < replicates.size(); ++b) {
      const double inner =
          (replicates[b].array() * replicates[0].array() * s_hat.array())
              .sum();
      if (inner < 0.0) replicates[b] = -replicates[b];
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& r : replicates) mean += r;
    mean /= static_cast<double>(replicates.size());

    double xi_sq = 0.0;
    for (const auto& r : replicates) {
      xi_sq += weighted_sq_norm(r - mean, s_hat);
    }
    xi_sq /= static_cast<double>(replicates.size());

    const double signal = weighted_sq_norm(mean, s_hat);
    if (xi_sq == 0.0) {
      curve.snr[e] =
          signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      curve.snr[e] = std::sqrt(std::max(signal - xi_sq, 0.0) / xi_sq);
    }
  }

  for (size_t e = 0; e < grid.size(); ++e) {
    if (curve.snr[e] >= threshold) {
      curve.selected = grid[e];
      break;
    }
  }
  return curve;
}

}  // namespace

SnrCurve bootstrap_snr(const PointCloud& cloud, int ell,
                       const std::vector<double>& grid, int B,
                       double threshold, std::uint64_t seed) {
  return run_bootstrap(cloud, ell, grid, B, threshold, seed, false);
}

SnrCurve bootstrap_snr_nodal(const PointCloud& cloud, int ell,
                             const std::vector<double>& grid, int B,
                             double threshold, std::uint64_t seed) {
  return run_bootstrap(cloud, ell, grid, B, threshold, seed, true);
}

double kn_scaling(double C, Eigen::Index n, int dim) {
  if (!(C > 0.0)) throw ParameterError("threshold constant C must be positive");
  if (n < 1 || dim < 1) throw ParameterError("invalid sample size or dimension");
  return C * std::pow(static_cast<double>(n), 2.0 / (dim + 8.0));
}

NeighborhoodSelection neighborhood_rule(const PointCloud& cloud,
                                        const std::vector<double>& grid,
                                        int k) {
  validate_grid(grid);
  if (k < 1) throw ParameterError("target median k must be >= 1");

  NeighborhoodSelection sel;
  sel.epsilons = grid;
  sel.k = k;
  sel.medians.reserve(grid.size());
  for (double eps : grid) {
    sel.medians.push_back(neighbor_counts(cloud, eps).median);
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (sel.medians[i] >= static_cast<double>(k)) {
      sel.selected = grid[i];
      break;
    }
  }
  return sel;
}

MstSelection mst_rule(const PointCloud& cloud) {
  const Eigen::Index n = cloud.size();
  if (n < 2) throw ParameterError("minimum spanning tree needs n >= 2 points");

  // Prim's algorithm on the complete Euclidean graph; the longest edge of
  // the MST is the max over vertices of their connecting distance.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<size_t>(n), kInf);
  std::vector<bool> in_tree(static_cast<size_t>(n), false);
  best[0] = 0.0;
  double longest_sq = 0.0;

  for (Eigen::Index added = 0; added < n; ++added) {
    Eigen::Index u = -1;
    double u_best = kInf;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!in_tree[static_cast<size_t>(v)] &&
          best[static_cast<size_t>(v)] < u_best) {
        u_best = best[static_cast<size_t>(v)];
        u = v;
      }
    }
    in_tree[static_cast<size_t>(u)] = true;
    if (added > 0) longest_sq = std::max(longest_sq, u_best);
    for (Eigen::Index v = 0; v < n; ++v) {
      if (in_tree[static_cast<size_t>(v)]) continue;
      const double d2 =
          (cloud.points.row(u) - cloud.points.row(v)).squaredNorm();
      if (d2 < best[static_cast<size_t>(v)]) best[static_cast<size_t>(v)] = d2;
    }
  }

  MstSelection sel;
  sel.longest_edge = std::sqrt(longest_sq);
  sel.epsilon = longest_sq / 2.0;  // L^2 / 2
  return sel;
}

}  // namespace sca
