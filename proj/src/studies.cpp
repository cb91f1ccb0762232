#include "sca/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"

namespace sca {

Eigen::VectorXd interpolate_linear(const Eigen::VectorXd& grid,
                                   const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& at) {
  const Eigen::Index G = grid.size();
  if (G < 2) throw ParameterError("interpolation grid needs >= 2 points");
  if (values.size() != G) {
    throw ParameterError("grid and value lengths disagree");
  }
  Eigen::VectorXd out(at.size());
  const double* begin = grid.data();
  const double* end = begin + G;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double x = at(i);
    if (x <= grid(0)) {
      out(i) = values(0);
      continue;
    }
    if (x >= grid(G - 1)) {
      out(i) = values(G - 1);
      continue;
    }
    const Eigen::Index j = std::upper_bound(begin, end, x) - begin;
    const double t = (x - grid(j - 1)) / (grid(j) - grid(j - 1));
    out(i) = (1.0 - t) * values(j - 1) + t * values(j);
  }
  return out;
}

double aligned_error(const Eigen::VectorXd& estimate,
                     const Eigen::VectorXd& reference,
                     const Eigen::VectorXd& stationary) {
  if (estimate.size() != reference.size() ||
      estimate.size() != stationary.size()) {
    throw ParameterError("aligned_error requires equal-length vectors");
  }
  const double overlap =
      stationary.cwiseProduct(estimate).dot(reference);
  const double sign = overlap < 0.0 ? -1.0 : 1.0;
  const Eigen::VectorXd diff = estimate - sign * reference;
  return std::sqrt(diff.cwiseAbs2().dot(stationary));
}

EigenvectorErrorResult eigenvector_error_curve(
    const EigenvectorErrorConfig& config, Warnings* warnings) {
  if (config.means.empty() || config.means.size() != config.sds.size() ||
      config.means.size() != config.weights.size()) {
    throw ParameterError("mixture parameter lists must have equal length");
  }
  if (config.seeds < 1) throw ParameterError("need at least one seed");
  if (config.n < 2) throw ParameterError("need at least two sample points");
  if (config.ell < 1) throw ParameterError("eigenvector index must be >= 1");
  if (config.epsilons.empty()) throw ParameterError("bandwidth grid is empty");
  for (double eps : config.epsilons) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw ParameterError("bandwidths must be positive and finite");
    }
  }

  Density1D density;
  GaussianMixtureParams mixture;
  for (std::size_t c = 0; c < config.means.size(); ++c) {
    density.gaussians.push_back(
        {config.means[c], config.sds[c], config.weights[c]});
    mixture.means.push_back(Eigen::VectorXd::Constant(1, config.means[c]));
    mixture.sds.push_back(config.sds[c]);
    mixture.weights.push_back(config.weights[c]);
  }
  const QuadratureModel model = quadrature_operator(
      density, config.reference_epsilon, config.reference_grid, warnings);
  const ReferenceEigenfunctions reference =
      reference_eigenfunctions(model, config.ell, EigenMethod::automatic,
                               warnings);
  const Eigen::VectorXd ref_column = reference.psi.col(config.ell);

  const Eigen::Index grid_count =
      static_cast<Eigen::Index>(config.epsilons.size());
  EigenvectorErrorResult result;
  result.epsilons = config.epsilons;
  result.errors = Eigen::MatrixXd::Constant(
      config.seeds, grid_count, std::numeric_limits<double>::quiet_NaN());

  for (int r = 0; r < config.seeds; ++r) {
    const GeneratorSpec spec{mixture,
                             derive_seed(config.seed, static_cast<std::uint64_t>(r))};
    const PointCloud cloud = generate(spec, config.n);
    const Eigen::VectorXd ref_at_samples =
        interpolate_linear(model.grid, ref_column, cloud.points.col(0));
    for (Eigen::Index e = 0; e < grid_count; ++e) {
      try {
        const KernelGraph graph = build_kernel(cloud, config.epsilons[e]);
        const MarkovChain chain = build_markov(graph);
        const SpectralDecomposition dec = decompose(chain, config.ell);
        result.errors(r, e) = aligned_error(dec.psi.col(config.ell),
                                            ref_at_samples, dec.stationary);
      } catch (const NumericError&) {
        ++result.failures;
      }
    }
  }

  result.mean_errors.resize(grid_count);
  for (Eigen::Index e = 0; e < grid_count; ++e) {
    double sum = 0.0;
    long count = 0;
    for (int r = 0; r < config.seeds; ++r) {
      if (std::isfinite(result.errors(r, e))) {
        sum += result.errors(r, e);
        ++count;
      }
    }
    result.mean_errors(e) =
        count > 0 ? sum / static_cast<double>(count)
                  : std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace sca
