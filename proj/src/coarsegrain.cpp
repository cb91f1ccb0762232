#include "sca/coarsegrain.hpp"

#include <cmath>
#include <limits>

#include "sca/errors.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"

namespace sca {

namespace {

struct KmeansRun {
  Eigen::MatrixXd centers;
  std::vector<int> assignment;
  double distortion = std::numeric_limits<double>::infinity();
};

// Distance-weighted seeding: first center uniform, then each next center
// drawn with probability proportional to squared distance to the nearest
// chosen center.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& pts, int k, Rng& rng) {
  const Eigen::Index n = pts.rows();
  Eigen::MatrixXd centers(k, pts.cols());
  centers.row(0) = pts.row(static_cast<Eigen::Index>(
      rng.index(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 =
      (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with chosen centers; any pick works.
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = pts.row(pick);
    d2 = d2.cwiseMin(
        (pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

double assign_points(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers,
                     std::vector<int>* assignment) {
  const Eigen::Index n = pts.rows();
  const int k = static_cast<int>(centers.rows());
  double distortion = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d2 = (pts.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double d2 = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    (*assignment)[static_cast<size_t>(i)] = best;
    distortion += best_d2;
  }
  return distortion / static_cast<double>(n);
}

KmeansRun lloyd(const Eigen::MatrixXd& pts, int k, std::uint64_t seed) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index q = pts.cols();
  Rng rng(seed);

  KmeansRun run;
  run.centers = seed_centers(pts, k, rng);
  run.assignment.assign(static_cast<size_t>(n), -1);

  double prev_distortion = std::numeric_limits<double>::infinity();
  constexpr int kMaxIterations = 200;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::vector<int> last = run.assignment;
    double distortion = assign_points(pts, run.centers, &run.assignment);

    // Re-seed empty clusters at the point farthest from its own center,
    // one at a time; each re-seed strictly reduces that point's cost.
    std::vector<long> sizes(static_cast<size_t>(k), 0);
    for (int a : run.assignment) ++sizes[static_cast<size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<size_t>(c)] > 0) continue;
      Eigen::Index farthest = 0;
      double far_d2 = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int own = run.assignment[static_cast<size_t>(i)];
        if (sizes[static_cast<size_t>(own)] <= 1) continue;  // keep nonempty
        const double d2 = (pts.row(i) - run.centers.row(own)).squaredNorm();
        if (d2 > far_d2) {
          far_d2 = d2;
          farthest = i;
        }
      }
      if (far_d2 < 0.0) break;  // fewer distinct points than clusters
      const int old = run.assignment[static_cast<size_t>(farthest)];
      run.centers.row(c) = pts.row(farthest);
      run.assignment[static_cast<size_t>(farthest)] = c;
      --sizes[static_cast<size_t>(old)];
      ++sizes[static_cast<size_t>(c)];
      distortion -= far_d2 / static_cast<double>(n);
    }

    if (distortion >
        prev_distortion + 1e-9 * std::max(1.0, prev_distortion)) {
      throw NumericError("k-means distortion increased between iterations");
    }
    prev_distortion = distortion;
    run.distortion = distortion;

    // Update step: means of assigned points (never increases distortion).
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, q);
    std::vector<long> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.assignment[static_cast<size_t>(i)];
      sums.row(c) += pts.row(i);
      ++counts[static_cast<size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        run.centers.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
      }
    }

    if (run.assignment == last) break;
  }

  // Final pass so distortion matches the returned centers/assignment.
  run.distortion = assign_points(pts, run.centers, &run.assignment);
  return run;
}

}  // namespace

Quantization kmeans_diffusion(const DiffusionEmbedding& embedding, int k,
                              std::uint64_t seed, int restarts) {
  const Eigen::Index n = embedding.coords.rows();
  if (k < 1 || static_cast<Eigen::Index>(k) > n) {
    throw ParameterError("cluster count k must satisfy 1 <= k <= n");
  }
  if (restarts < 1) throw ParameterError("restarts must be >= 1");

  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = lloyd(embedding.coords, k, derive_seed(seed, r));
    if (run.distortion < best.distortion) best = std::move(run);
  }

  Quantization quant;
  quant.centers = best.centers;
  quant.assignment = best.assignment;
  quant.k = k;
  quant.distortion = best.distortion;
  quant.representatives.assign(static_cast<size_t>(k), -1);
  Eigen::VectorXd best_d2 =
      Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = quant.assignment[static_cast<size_t>(i)];
    const double d2 =
        (embedding.coords.row(i) - quant.centers.row(c)).squaredNorm();
    if (d2 < best_d2(c)) {
      best_d2(c) = d2;
      quant.representatives[static_cast<size_t>(c)] = i;
    }
  }
  return quant;
}

CoarseChain coarse_chain(const MarkovChain& model, const Quantization& quant,
                         long m) {
  const Eigen::Index n = model.transition.rows();
  if (static_cast<Eigen::Index>(quant.assignment.size()) != n) {
    throw ParameterError("quantization does not cover the model's points");
  }
  const int k = quant.k;
  std::vector<long> sizes(static_cast<size_t>(k), 0);
  for (int a : quant.assignment) {
    if (a < 0 || a >= k) throw ParameterError("cluster index out of range");
    ++sizes[static_cast<size_t>(a)];
  }
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<size_t>(c)] == 0) {
      throw ParameterError("quantization has an empty cluster");
    }
  }

  Eigen::MatrixXd am = m_step(model, m);

  // Aggregate s_i A^m(i,j) over cluster blocks.
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd masses = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ci = quant.assignment[static_cast<size_t>(i)];
    const double si = model.stationary(i);
    masses(ci) += si;
    for (Eigen::Index j = 0; j < n; ++j) {
      flow(ci, quant.assignment[static_cast<size_t>(j)]) += si * am(i, j);
    }
  }

  CoarseChain coarse;
  coarse.m = m;
  coarse.masses = masses;
  coarse.transition = masses.cwiseInverse().asDiagonal() * flow;
  return coarse;
}

std::vector<double> spectral_fidelity(const MarkovChain& model,
                                      const CoarseChain& coarse, int j) {
  const int k = static_cast<int>(coarse.transition.rows());
  if (j < 1 || j > k - 1) {
    throw ParameterError("fidelity order j must satisfy 1 <= j <= k-1");
  }

  // The coarse chain is reversible with respect to its masses, so its
  // spectrum comes from the symmetrized conjugate.
  Eigen::VectorXd sqrt_mass = coarse.masses.cwiseSqrt();
  Eigen::MatrixXd sym = sqrt_mass.asDiagonal() * coarse.transition *
                        sqrt_mass.cwiseInverse().asDiagonal();
  sym = ((sym + sym.transpose()) / 2.0).eval();
  TopEigenpairs coarse_pairs = top_eigenpairs(sym, j + 1, EigenMethod::dense);

  SpectralDecomposition fine = decompose(model, j);

  std::vector<double> gaps;
  gaps.reserve(static_cast<size_t>(j));
  for (int l = 1; l <= j; ++l) {
    const double fine_m =
        std::pow(fine.eigenvalues(l), static_cast<double>(coarse.m));
    gaps.push_back(std::abs(coarse_pairs.values(l) - fine_m) /
                   std::abs(fine_m));
  }
  return gaps;
}

}  // namespace sca
