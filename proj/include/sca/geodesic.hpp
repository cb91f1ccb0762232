#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sca/kernelgraph.hpp"
#include "sca/pointcloud.hpp"

namespace sca {

// Shortest path between two vertices of a neighborhood graph; the length is
// the sum of Euclidean edge lengths, so it is at least the straight-line
// distance between the endpoints.
struct GeodesicResult {
  double distance = 0.0;            // +infinity when disconnected
  std::vector<Eigen::Index> path;   // vertex sequence a..b; empty if none
  bool connected = false;
};

GeodesicResult graph_distance(const EpsilonGraph& graph, Eigen::Index a,
                              Eigen::Index b);

// Bin counts over [min, max] with the given width; used for mode reports.
struct Histogram {
  double bin_width = 0.0;
  double origin = 0.0;              // left edge of the first bin
  std::vector<long> counts;
  std::vector<double> centers;
};

Histogram histogram(const std::vector<double>& values, double bin_width);

// Centers of strict local maxima of the histogram (leftmost bin on a
// plateau), sorted by center.
std::vector<double> histogram_modes(const Histogram& hist);

// Noisy-spiral experiment: how the geodesic graph distance between two
// reference points on the curve x(t) = (t^a cos(bt), t^a sin(bt)) responds
// to sparse off-curve noise, contrasted with the diffusion distance from
// the same 0/1 adjacency kernel.
struct SpiralSensitivityConfig {
  SpiralParams spiral;       // a, b, and the sampled t-range
  double beta = 0.09;        // exponential noise mean (both coordinates)
  double tau = 0.15;         // neighborhood-graph threshold
  Eigen::Index n = 800;
  int reps = 300;            // noisy realizations
  int baseline_reps = 100;   // noiseless realizations for the reference mean
  long m = 50;               // diffusion steps for the comparison
  std::uint64_t seed = 0;
  double t_a = 0.15707963267948966;  // pi/(2b) for b = 10
  double t_b = 0.78539816339744831;  // 5pi/(2b): exactly one turn further out
};

struct SpiralSensitivityResult {
  std::vector<double> geodesic;       // connected noisy realizations
  std::vector<double> diffusion;
  std::vector<double> geodesic_rel_change;   // (d - baseline)/baseline
  std::vector<double> diffusion_rel_change;
  double baseline_geodesic = 0.0;     // mean over connected noiseless reps
  double baseline_diffusion = 0.0;
  int disconnected = 0;               // flagged noisy realizations (excluded)
  int baseline_disconnected = 0;
  double arc_length = 0.0;            // curve length between the references
  double euclidean = 0.0;             // straight-line reference distance
  SpiralSensitivityConfig config;
};

SpiralSensitivityResult spiral_sensitivity_experiment(
    const SpiralSensitivityConfig& config);

// Geodesic distance distributions across sample sizes: with off-curve
// noise, denser sampling lets shortest paths cut through the noise, pulling
// the graph distance from the curve's arc length toward the straight-line
// distance.
struct SpiralConsistencyConfig {
  SpiralParams spiral;
  double beta = 0.09;
  double tau = 0.1;
  std::vector<Eigen::Index> sizes = {600, 2000, 4000};
  int reps = 100;
  std::uint64_t seed = 0;
  double t_a = 0.15707963267948966;
  double t_b = 0.78539816339744831;
};

struct SpiralConsistencyResult {
  std::vector<Eigen::Index> sizes;
  std::vector<std::vector<double>> distances;  // connected reps, per size
  std::vector<int> disconnected;               // per size
  std::vector<double> mean_distance;           // per size
  double arc_length = 0.0;
  double euclidean = 0.0;
  SpiralConsistencyConfig config;
};

SpiralConsistencyResult spiral_consistency_experiment(
    const SpiralConsistencyConfig& config);

// Arc length of the spiral between parameters t0 <= t1 (adaptive Simpson
// on the closed-form speed t^(a-1) sqrt(a^2 + b^2 t^2)).
double spiral_arc_length(double a, double b, double t0, double t1);

// Point on the curve at parameter t.
Eigen::Vector2d spiral_point(double a, double b, double t);

}  // namespace sca
