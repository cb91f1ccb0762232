#include "sca/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <utility>

#include "sca/diffusion.hpp"
#include "sca/errors.hpp"
#include "sca/markov.hpp"
#include "sca/rng.hpp"

namespace sca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = (a + b) / 2.0;
  const double lm = (a + m) / 2.0;
  const double rm = (m + b) / 2.0;
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

struct PairSample {
  double geodesic;
  double diffusion;
};

Eigen::Index nearest_index(const PointCloud& cloud,
                           const Eigen::Vector2d& target) {
  Eigen::Index best = 0;
  double best_d2 = kInf;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const double d2 = (cloud.points.row(i).transpose() - target).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

// One spiral realization: geodesic distance between the samples nearest the
// two reference points, plus (optionally) the diffusion distance from the
// 0/1 kernel at the same threshold. Empty when the endpoints are not
// connected in the graph.
std::optional<PairSample> spiral_realization(
    const SpiralParams& params, Eigen::Index n, std::uint64_t seed, double tau,
    const Eigen::Vector2d& ref_a, const Eigen::Vector2d& ref_b, long m,
    bool with_diffusion) {
  GeneratorSpec spec;
  spec.params = params;
  spec.seed = seed;
  PointCloud pc = generate(spec, n);

  const Eigen::Index ia = nearest_index(pc, ref_a);
  const Eigen::Index ib = nearest_index(pc, ref_b);

  EpsilonGraph graph = epsilon_graph(pc, tau);
  GeodesicResult geo = graph_distance(graph, ia, ib);
  if (!geo.connected) return std::nullopt;

  PairSample out{geo.distance, 0.0};
  if (with_diffusion) {
    MarkovChain chain = build_markov(build_adjacency_kernel(pc, tau));
    Eigen::MatrixXd am = m_step(chain, m);
    out.diffusion = diffusion_distance_direct(am, chain.stationary, ia, ib);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                   : s / static_cast<double>(v.size());
}

}  // namespace

GeodesicResult graph_distance(const EpsilonGraph& graph, Eigen::Index a,
                              Eigen::Index b) {
  const Eigen::Index n = graph.vertices;
  if (a < 0 || a >= n || b < 0 || b >= n) {
    throw ParameterError("vertex index out of range");
  }

  std::vector<std::vector<std::pair<Eigen::Index, double>>> adj(
      static_cast<size_t>(n));
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [i, j] = graph.edges[e];
    const double w = graph.edge_weights[e];
    adj[static_cast<size_t>(i)].emplace_back(j, w);
    adj[static_cast<size_t>(j)].emplace_back(i, w);
  }

  std::vector<double> dist(static_cast<size_t>(n), kInf);
  std::vector<Eigen::Index> prev(static_cast<size_t>(n), -1);
  using Entry = std::pair<double, Eigen::Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  dist[static_cast<size_t>(a)] = 0.0;
  queue.emplace(0.0, a);

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<size_t>(u)]) continue;  // stale entry
    if (u == b) break;
    for (const auto& [v, w] : adj[static_cast<size_t>(u)]) {
      const double cand = d + w;
      if (cand < dist[static_cast<size_t>(v)]) {
        dist[static_cast<size_t>(v)] = cand;
        prev[static_cast<size_t>(v)] = u;
        queue.emplace(cand, v);
      }
    }
  }

  GeodesicResult result;
  result.distance = dist[static_cast<size_t>(b)];
  result.connected = std::isfinite(result.distance);
  if (result.connected) {
    for (Eigen::Index v = b; v != -1; v = prev[static_cast<size_t>(v)]) {
      result.path.push_back(v);
    }
    std::reverse(result.path.begin(), result.path.end());
  } else {
    result.distance = kInf;
  }
  return result;
}

Histogram histogram(const std::vector<double>& values, double bin_width) {
  if (!(bin_width > 0.0)) throw ParameterError("bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  // Align bin edges at integer multiples of the width.
  h.origin = std::floor(*lo_it / bin_width) * bin_width;
  const size_t bins = static_cast<size_t>(
                          std::floor((*hi_it - h.origin) / bin_width)) +
                      1;
  h.counts.assign(bins, 0);
  h.centers.resize(bins);
  for (size_t i = 0; i < bins; ++i) {
    h.centers[i] = h.origin + (static_cast<double>(i) + 0.5) * bin_width;
  }
  for (double v : values) {
    size_t idx = static_cast<size_t>((v - h.origin) / bin_width);
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  return h;
}

std::vector<double> histogram_modes(const Histogram& hist) {
  std::vector<double> modes;
  const size_t n = hist.counts.size();
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && hist.counts[j + 1] == hist.counts[i]) ++j;
    const long left = i > 0 ? hist.counts[i - 1] : -1;
    const long right = j + 1 < n ? hist.counts[j + 1] : -1;
    if (hist.counts[i] > left && hist.counts[i] > right &&
        hist.counts[i] > 0) {
      modes.push_back(hist.centers[i]);  // leftmost bin of the plateau
    }
    i = j + 1;
  }
  return modes;
}

double spiral_arc_length(double a, double b, double t0, double t1) {
  if (!(t0 > 0.0) || !(t1 >= t0)) {
    throw ParameterError("arc length needs 0 < t0 <= t1");
  }
  auto speed = [a, b](double t) {
    return std::pow(t, a - 1.0) * std::sqrt(a * a + b * b * t * t);
  };
  const double fa = speed(t0);
  const double fb = speed(t1);
  const double fm = speed((t0 + t1) / 2.0);
  const double whole = simpson(fa, fm, fb, t1 - t0);
  return adaptive_simpson(speed, t0, t1, fa, fm, fb, whole, 1e-12, 48);
}

Eigen::Vector2d spiral_point(double a, double b, double t) {
  const double r = std::pow(t, a);
  return {r * std::cos(b * t), r * std::sin(b * t)};
}

SpiralSensitivityResult spiral_sensitivity_experiment(
    const SpiralSensitivityConfig& config) {
  if (config.n < 2) throw ParameterError("need at least two sample points");
  if (config.reps < 1 || config.baseline_reps < 1) {
    throw ParameterError("replication counts must be >= 1");
  }
  if (!(config.tau > 0.0)) throw ParameterError("tau must be positive");
  if (config.beta < 0.0) throw ParameterError("noise mean must be >= 0");
  if (config.m < 1) throw ParameterError("diffusion step count must be >= 1");

  SpiralSensitivityResult result;
  result.config = config;
  const double a = config.spiral.a;
  const double b = config.spiral.b;
  const Eigen::Vector2d ref_a = spiral_point(a, b, config.t_a);
  const Eigen::Vector2d ref_b = spiral_point(a, b, config.t_b);
  result.arc_length = spiral_arc_length(a, b, config.t_a, config.t_b);
  result.euclidean = (ref_a - ref_b).norm();

  SpiralParams noiseless = config.spiral;
  noiseless.noise_mean = 0.0;
  std::vector<double> base_geo;
  std::vector<double> base_diff;
  for (int r = 0; r < config.baseline_reps; ++r) {
    auto sample = spiral_realization(
        noiseless, config.n, derive_seed(config.seed, 0, r), config.tau,
        ref_a, ref_b, config.m, true);
    if (!sample) {
      ++result.baseline_disconnected;
      continue;
    }
    base_geo.push_back(sample->geodesic);
    base_diff.push_back(sample->diffusion);
  }
  if (base_geo.empty()) {
    throw NumericError(
        "all noiseless baseline realizations were disconnected; "
        "increase tau or the sample size");
  }
  result.baseline_geodesic = mean_of(base_geo);
  result.baseline_diffusion = mean_of(base_diff);

  SpiralParams noisy = config.spiral;
  noisy.noise_mean = config.beta;
  for (int r = 0; r < config.reps; ++r) {
    auto sample = spiral_realization(
        noisy, config.n, derive_seed(config.seed, 1, r), config.tau, ref_a,
        ref_b, config.m, true);
    if (!sample) {
      ++result.disconnected;
      continue;
    }
    result.geodesic.push_back(sample->geodesic);
    result.diffusion.push_back(sample->diffusion);
    result.geodesic_rel_change.push_back(
        (sample->geodesic - result.baseline_geodesic) /
        result.baseline_geodesic);
    result.diffusion_rel_change.push_back(
        (sample->diffusion - result.baseline_diffusion) /
        result.baseline_diffusion);
  }
  return result;
}

SpiralConsistencyResult spiral_consistency_experiment(
    const SpiralConsistencyConfig& config) {
  if (config.sizes.empty()) throw ParameterError("no sample sizes given");
  if (config.reps < 1) throw ParameterError("replication count must be >= 1");
  if (!(config.tau > 0.0)) throw ParameterError("tau must be positive");
  if (config.beta < 0.0) throw ParameterError("noise mean must be >= 0");

  SpiralConsistencyResult result;
  result.config = config;
  result.sizes = config.sizes;
  const double a = config.spiral.a;
  const double b = config.spiral.b;
  const Eigen::Vector2d ref_a = spiral_point(a, b, config.t_a);
  const Eigen::Vector2d ref_b = spiral_point(a, b, config.t_b);
  result.arc_length = spiral_arc_length(a, b, config.t_a, config.t_b);
  result.euclidean = (ref_a - ref_b).norm();

  SpiralParams noisy = config.spiral;
  noisy.noise_mean = config.beta;
  for (size_t size_idx = 0; size_idx < config.sizes.size(); ++size_idx) {
    const Eigen::Index n = config.sizes[size_idx];
    if (n < 2) throw ParameterError("sample sizes must be >= 2");
    std::vector<double> distances;
    int disconnected = 0;
    for (int r = 0; r < config.reps; ++r) {
      auto sample = spiral_realization(
          noisy, n, derive_seed(config.seed, size_idx + 2, r), config.tau,
          ref_a, ref_b, 1, false);
      if (!sample) {
        ++disconnected;
        continue;
      }
      distances.push_back(sample->geodesic);
    }
    result.mean_distance.push_back(mean_of(distances));
    result.distances.push_back(std::move(distances));
    result.disconnected.push_back(disconnected);
  }
  return result;
}

}  // namespace sca
