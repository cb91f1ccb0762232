#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "sca/errors.hpp"

namespace sca {

// n sample points in R^d, the raw input everywhere. Labels, when present,
// carry generator component ids (mixture component, line index, ...).
struct PointCloud {
  Eigen::MatrixXd points;  // n x d
  std::optional<std::vector<int>> labels;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

// ---- generator parameter blocks -------------------------------------------

// Mixture of spherical Gaussians; means may live in any dimension as long as
// they agree. Weights must sum to 1.
struct GaussianMixtureParams {
  std::vector<Eigen::VectorXd> means;
  std::vector<double> sds;
  std::vector<double> weights;
};

// Planar spiral (t^a cos bt, t^a sin bt), t uniform on [t_min, t_max].
// noise_mean > 0 adds independent exponential noise to both coordinates
// (unshifted, support [0, inf)). The default range spans 2.5 turns for
// b = 10 and places the two standard reference parameters t = pi/(2b) and
// t = 5pi/(2b) in its lower half, dense enough along the inner arc that
// the geodesic experiments' neighborhood graphs can connect the reference
// points at their documented thresholds.
struct SpiralParams {
  double a = 0.8;
  double b = 10.0;
  double noise_mean = 0.0;
  double t_min = 0.15707963267948966;  // pi/20
  double t_max = 1.5707963267948966;   // pi/2
};

// Uniform measure on two horizontal segments of the given length, gap apart.
struct ParallelLinesParams {
  double length = 3.14159265358979324;
  double gap = 1.0;
};

// Two atoms on the line, optionally jittered for kernel conditioning.
struct TwoPointMassParams {
  double x0 = 0.0;
  double x1 = 1.0;
  double w0 = 0.5;
  double w1 = 0.5;
  double jitter_sd = 0.0;
};

// Ring + central blob + uniform background clutter. The defaults are
// illustrative only; no published parameterization exists for this shape.
struct RingBlobNoiseParams {
  double ring_radius = 2.0;
  double ring_sd = 0.1;
  double blob_sd = 0.25;
  double box_half = 3.0;
  double w_ring = 0.4;
  double w_blob = 0.4;
  double w_noise = 0.2;
};

using GeneratorParams =
    std::variant<GaussianMixtureParams, SpiralParams, ParallelLinesParams,
                 TwoPointMassParams, RingBlobNoiseParams>;

struct GeneratorSpec {
  GeneratorParams params;
  std::uint64_t seed = 0;
};

// Draw n i.i.d. points. Bit-identical output for identical spec + seed.
PointCloud generate(const GeneratorSpec& spec, Eigen::Index n);

// ---- mutual information featurization --------------------------------------

struct MutualInformation {
  // I(x,y) = log( f(x,y) / (col_sum_y(f) * row_sum_x(f)) ), f = counts/total.
  // Column y is document y's feature vector.
  Eigen::MatrixXd features;
  // Cells with zero counts, where f was floored at 1/(2*total) before the log.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> floored;
};

// Featurize a words-by-documents count matrix (p x n, nonnegative integers,
// every row and column must have at least one positive entry).
MutualInformation mutual_information_features(const Eigen::MatrixXd& counts);

}  // namespace sca
