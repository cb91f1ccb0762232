#include "sca/pointcloud.hpp"

#include <cmath>
#include <numeric>

#include "sca/rng.hpp"

namespace sca {

namespace {

constexpr double kWeightTol = 1e-9;

void check_weights(const std::vector<double>& w) {
  if (w.empty()) throw ParameterError("mixture has no components");
  double total = 0.0;
  for (double wi : w) {
    if (!(wi >= 0.0)) throw ParameterError("negative mixture weight");
    total += wi;
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw ParameterError("mixture weights must sum to 1");
}

// inverse-CDF draw of a component index from cumulative weights
std::size_t draw_component(Rng& rng, const std::vector<double>& weights) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    acc += weights[c];
    if (u < acc) return c;
  }
  return weights.size() - 1;
}

PointCloud generate_impl(const GaussianMixtureParams& p, Eigen::Index n,
                            Rng& rng) {
  check_weights(p.weights);
  if (p.means.size() != p.sds.size() || p.means.size() != p.weights.size())
    throw ParameterError("mixture component lists have mismatched lengths");
  const Eigen::Index d = p.means.front().size();
  for (const auto& m : p.means)
    if (m.size() != d) throw ParameterError("mixture means differ in dimension");
  for (double sd : p.sds)
    if (!(sd > 0.0)) throw ParameterError("mixture sd must be positive");

  PointCloud cloud;
  cloud.points.resize(n, d);
  cloud.labels = std::vector<int>(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t c = draw_component(rng, p.weights);
    (*cloud.labels)[static_cast<std::size_t>(i)] = static_cast<int>(c);
    for (Eigen::Index j = 0; j < d; ++j)
      cloud.points(i, j) = p.means[c](j) + p.sds[c] * rng.normal();
  }
  return cloud;
}

PointCloud generate_impl(const SpiralParams& p, Eigen::Index n, Rng& rng) {
  if (!(p.noise_mean >= 0.0)) throw ParameterError("spiral noise mean must be >= 0");
  if (!(p.t_min > 0.0) || !(p.t_max > p.t_min))
    throw ParameterError("spiral parameter range requires 0 < t_min < t_max");

  PointCloud cloud;
  cloud.points.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = p.t_min + (p.t_max - p.t_min) * rng.uniform();
    const double r = std::pow(t, p.a);
    double x = r * std::cos(p.b * t);
    double y = r * std::sin(p.b * t);
    if (p.noise_mean > 0.0) {
      x += rng.exponential(p.noise_mean);
      y += rng.exponential(p.noise_mean);
    }
    cloud.points(i, 0) = x;
    cloud.points(i, 1) = y;
  }
  return cloud;
}

PointCloud generate_impl(const ParallelLinesParams& p, Eigen::Index n,
                          Rng& rng) {
  if (!(p.length > 0.0)) throw ParameterError("line length must be positive");
  if (!(p.gap > 0.0)) throw ParameterError("line gap must be positive");
  PointCloud cloud;
  cloud.points.resize(n, 2);
  cloud.labels = std::vector<int>(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int line = rng.uniform() < 0.5 ? 0 : 1;
    (*cloud.labels)[static_cast<std::size_t>(i)] = line;
    cloud.points(i, 0) = p.length * rng.uniform();
    cloud.points(i, 1) = line * p.gap;
  }
  return cloud;
}

PointCloud generate_impl(const TwoPointMassParams& p, Eigen::Index n,
                               Rng& rng) {
  check_weights({p.w0, p.w1});
  if (!(p.jitter_sd >= 0.0)) throw ParameterError("jitter sd must be >= 0");
  PointCloud cloud;
  cloud.points.resize(n, 1);
  cloud.labels = std::vector<int>(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = rng.uniform() < p.w0 ? 0 : 1;
    (*cloud.labels)[static_cast<std::size_t>(i)] = c;
    double x = c == 0 ? p.x0 : p.x1;
    if (p.jitter_sd > 0.0) x += p.jitter_sd * rng.normal();
    cloud.points(i, 0) = x;
  }
  return cloud;
}

PointCloud generate_impl(const RingBlobNoiseParams& p, Eigen::Index n,
                              Rng& rng) {
  check_weights({p.w_ring, p.w_blob, p.w_noise});
  if (!(p.ring_radius > 0.0)) throw ParameterError("ring radius must be positive");
  PointCloud cloud;
  cloud.points.resize(n, 2);
  cloud.labels = std::vector<int>(static_cast<std::size_t>(n));
  const std::vector<double> w = {p.w_ring, p.w_blob, p.w_noise};
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t c = draw_component(rng, w);
    (*cloud.labels)[static_cast<std::size_t>(i)] = static_cast<int>(c);
    double x = 0.0, y = 0.0;
    if (c == 0) {
      const double theta = 6.283185307179586 * rng.uniform();
      const double r = p.ring_radius + p.ring_sd * rng.normal();
      x = r * std::cos(theta);
      y = r * std::sin(theta);
    } else if (c == 1) {
      x = p.blob_sd * rng.normal();
      y = p.blob_sd * rng.normal();
    } else {
      x = p.box_half * (2.0 * rng.uniform() - 1.0);
      y = p.box_half * (2.0 * rng.uniform() - 1.0);
    }
    cloud.points(i, 0) = x;
    cloud.points(i, 1) = y;
  }
  return cloud;
}

}  // namespace

PointCloud generate(const GeneratorSpec& spec, Eigen::Index n) {
  if (n < 1) throw ParameterError("sample count must be >= 1");
  Rng rng(spec.seed);
  PointCloud cloud = std::visit(
      [&](const auto& p) { return generate_impl(p, n, rng); }, spec.params);
  if (!cloud.points.allFinite())
    throw NumericError("generator produced non-finite coordinates");
  return cloud;
}

MutualInformation mutual_information_features(const Eigen::MatrixXd& counts) {
  const Eigen::Index p = counts.rows();
  const Eigen::Index n = counts.cols();
  if (p < 1 || n < 1) throw ParameterError("count matrix is empty");
  for (Eigen::Index x = 0; x < p; ++x)
    for (Eigen::Index y = 0; y < n; ++y) {
      const double c = counts(x, y);
      if (!(c >= 0.0) || std::abs(c - std::round(c)) > 1e-9)
        throw ParameterError("counts must be nonnegative integers");
    }

  const double total = counts.sum();
  if (!(total > 0.0)) throw ParameterError("count matrix is all zero");
  const Eigen::MatrixXd f = counts / total;
  const Eigen::VectorXd row_marg = f.rowwise().sum();  // word marginals
  const Eigen::RowVectorXd col_marg = f.colwise().sum();  // document marginals
  for (Eigen::Index x = 0; x < p; ++x)
    if (!(row_marg(x) > 0.0))
      throw ParameterError("degenerate margin: word row " + std::to_string(x) +
                           " has no positive count");
  for (Eigen::Index y = 0; y < n; ++y)
    if (!(col_marg(y) > 0.0))
      throw ParameterError("degenerate margin: document column " +
                           std::to_string(y) + " has no positive count");

  MutualInformation out;
  out.features.resize(p, n);
  out.floored.setConstant(p, n, false);
  const double floor = 1.0 / (2.0 * total);  // zero-cell convention
  for (Eigen::Index x = 0; x < p; ++x)
    for (Eigen::Index y = 0; y < n; ++y) {
      double fxy = f(x, y);
      if (fxy == 0.0) {
        fxy = floor;
        out.floored(x, y) = true;
      }
      out.features(x, y) = std::log(fxy / (col_marg(y) * row_marg(x)));
    }
  return out;
}

}  // namespace sca
