// Acceptance gate: end-to-end checks of the library's headline behavior,
// one [PASS]/[FAIL] line per criterion. Each criterion carries a wall-clock
// budget; exceeding it fails the criterion even if every numeric check
// passes. Run all criteria with no arguments, or a single one with
// `--criterion N`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sca/bandwidth.hpp"
#include "sca/coarsegrain.hpp"
#include "sca/diffusion.hpp"
#include "sca/geodesic.hpp"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/nodal.hpp"
#include "sca/nystrom.hpp"
#include "sca/oracle.hpp"
#include "sca/pointcloud.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"
#include "sca/studies.hpp"

namespace {

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// Collects failed checks; a criterion passes when nothing was recorded.
struct Gate {
  std::vector<std::string> failures;
  std::string note;  // key measured values, shown on the summary line

  void check(bool ok, std::string what) {
    if (!ok) failures.push_back(std::move(what));
  }
};

sca::PointCloud two_gaussian_cloud(std::uint64_t seed, Eigen::Index n) {
  sca::GaussianMixtureParams mix;
  mix.means = {Eigen::VectorXd::Constant(1, -2.0),
               Eigen::VectorXd::Constant(1, 2.0)};
  mix.sds = {1.0, 1.0};
  mix.weights = {0.5, 0.5};
  return sca::generate({mix, seed}, n);
}

sca::Density1D two_gaussian_density() {
  sca::Density1D dens;
  dens.gaussians = {{-2.0, 1.0, 0.5}, {2.0, 1.0, 0.5}};
  return dens;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Rank correlation with average ranks on ties; the x side is an already
// sorted grid, so its ranks are 0..n-1.
double spearman_against_index(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && y[order[j + 1]] == y[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  const double mean = 0.5 * static_cast<double>(n - 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mean;
    const double dy = rank[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

// Sign map of a reference eigenfunction carried from the quadrature grid to
// the sample points by linear interpolation.
sca::NodalMap grid_sign_map(const sca::ReferenceEigenfunctions& ref,
                            const Eigen::VectorXd& grid,
                            const Eigen::VectorXd& x, int ell) {
  const Eigen::VectorXd values =
      sca::interpolate_linear(grid, ref.psi.col(ell), x);
  sca::NodalMap map;
  map.ell = ell;
  map.epsilon = ref.epsilon;
  map.signs.resize(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    map.signs(i) = sign_of(values(i));
  return map;
}

// ---- 1: operator identities -----------------------------------------------
// Row sums, stationarity, detailed balance, the Laplacian form of the
// eigenproblem, and the full-order kernel reconstruction from eigenpairs.
void criterion1(Gate& g) {
  const auto cloud = two_gaussian_cloud(11, 300);
  const auto chain = sca::build_markov(sca::build_kernel(cloud, 0.2));
  const Eigen::Index n = cloud.size();

  const double row_dev =
      (chain.transition.rowwise().sum().array() - 1.0).abs().maxCoeff();
  g.check(row_dev <= 1e-12, fmt("row sums deviate by %.3g > 1e-12", row_dev));

  const Eigen::VectorXd s_after = chain.transition.transpose() * chain.stationary;
  const double stat_dev = (s_after - chain.stationary).cwiseAbs().maxCoeff();
  g.check(stat_dev <= 1e-10,
          fmt("stationary row vector moves by %.3g > 1e-10", stat_dev));

  const Eigen::MatrixXd flux = chain.stationary.asDiagonal() * chain.transition;
  const double balance_dev = (flux - flux.transpose()).cwiseAbs().maxCoeff();
  g.check(balance_dev <= 1e-12,
          fmt("detailed balance broken by %.3g > 1e-12", balance_dev));

  const auto dec = sca::decompose(chain, static_cast<int>(n) - 1);
  double lap_dev = 0.0;
  for (int l = 0; l < static_cast<int>(n); ++l) {
    const Eigen::VectorXd lhs = chain.laplacian * dec.psi.col(l);
    const Eigen::VectorXd rhs = (1.0 - dec.eigenvalues(l)) *
        (chain.degrees.array() * dec.psi.col(l).array()).matrix();
    lap_dev = std::max(lap_dev, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  g.check(lap_dev <= 1e-8,
          fmt("Laplacian eigenproblem residual %.3g > 1e-8", lap_dev));

  const Eigen::MatrixXd recon =
      dec.psi * dec.eigenvalues.asDiagonal() * dec.phi.transpose();
  const double mercer_dev = (recon - chain.transition).cwiseAbs().maxCoeff();
  g.check(mercer_dev <= 1e-8,
          fmt("eigenpair reconstruction off by %.3g > 1e-8", mercer_dev));

  g.note = fmt("row %.1e stat %.1e balance %.1e laplacian %.1e mercer %.1e",
               row_dev, stat_dev, balance_dev, lap_dev, mercer_dev);
}

// ---- 2: distance identities ------------------------------------------------
// The spectral diffusion distance at full order matches the brute-force
// definition, and the four-entry polarization form of A^(2m) matches the
// squared distance, over random models.
void criterion2(Gate& g) {
  sca::Rng rng(12345);
  double worst_rel = 0.0;
  double worst_pol = 0.0;
  for (int r = 0; r < 50; ++r) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.index(181));
    const int d = 1 + static_cast<int>(rng.index(3));
    Eigen::MatrixXd points(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) points(i, c) = 1.5 * rng.normal();
    const double epsilon = 0.2 + 0.8 * rng.uniform();
    const sca::PointCloud cloud{points, std::nullopt};
    const auto chain = sca::build_markov(sca::build_kernel(cloud, epsilon));
    const auto dec = sca::decompose(chain, static_cast<int>(n) - 1);
    for (int t = 0; t < 3; ++t) {
      const auto i = static_cast<Eigen::Index>(rng.index(n));
      Eigen::Index j = i;
      while (j == i) j = static_cast<Eigen::Index>(rng.index(n));
      const long m = 1 + static_cast<long>(rng.index(5));
      const double direct = sca::diffusion_distance_direct(chain, m, i, j);
      const double spectral = sca::diffusion_distance_spectral(
          dec, m, i, j, static_cast<int>(n) - 1);
      worst_rel = std::max(worst_rel, std::abs(spectral - direct) / direct);
      const Eigen::MatrixXd a2m = sca::m_step(chain, 2 * m);
      const double pol = a2m(i, i) / chain.stationary(i) +
                         a2m(j, j) / chain.stationary(j) -
                         a2m(i, j) / chain.stationary(j) -
                         a2m(j, i) / chain.stationary(i);
      worst_pol = std::max(worst_pol, std::abs(pol - direct * direct));
    }
  }
  g.check(worst_rel <= 1e-8,
          fmt("spectral vs direct relative error %.3g > 1e-8", worst_rel));
  g.check(worst_pol <= 1e-10,
          fmt("polarization identity off by %.3g > 1e-10", worst_pol));
  g.note = fmt("max rel %.1e, max polarization dev %.1e", worst_rel, worst_pol);
}

// ---- 3: extension fixed point ----------------------------------------------
// The kernel-smoothing extension evaluated at the training points is the
// eigenvector equation itself, so it reproduces the entries.
void criterion3(Gate& g) {
  const auto cloud = two_gaussian_cloud(13, 200);
  const auto chain = sca::build_markov(sca::build_kernel(cloud, 0.15));
  const auto dec = sca::decompose(chain, 12);
  const sca::ExtensionQuery query(cloud.points);
  double worst = 0.0;
  int tested = 0;
  for (int l = 0; l <= 12; ++l) {
    if (dec.eigenvalues(l) <= 1e-6) continue;
    const Eigen::VectorXd ext = sca::extend_eigenvector(cloud, dec, l, query);
    worst = std::max(worst, (ext - dec.psi.col(l)).cwiseAbs().maxCoeff());
    ++tested;
  }
  g.check(tested > 0, "no eigenvalue above 1e-6 to test");
  g.check(worst <= 1e-8,
          fmt("training-point extension off by %.3g > 1e-8", worst));
  g.note = fmt("%d eigenvectors, max dev %.1e", tested, worst);
}

// ---- 4: eigenvector error is U-shaped in the bandwidth ----------------------
// Too small a bandwidth is variance-dominated, too large is bias-dominated;
// the sweet spot for this mixture at n=1000 sits around 0.03..0.1.
void criterion4(Gate& g) {
  sca::EigenvectorErrorConfig config;  // defaults are the study parameters
  const auto res = sca::eigenvector_error_curve(config);
  g.check(res.failures == 0,
          fmt("%ld fits hit numeric guards", res.failures));

  const auto argmin = [](const Eigen::VectorXd& v) {
    int best = 0;
    for (int k = 1; k < v.size(); ++k)
      if (std::isfinite(v(k)) && !(v(k) >= v(best))) best = k;
    return best;
  };
  const int kmin = argmin(res.mean_errors);
  const int last = static_cast<int>(res.mean_errors.size()) - 1;
  g.check(res.mean_errors(kmin) < res.mean_errors(0) &&
              res.mean_errors(kmin) < res.mean_errors(last),
          fmt("no interior minimum: ends %.4f / %.4f, min %.4f",
              res.mean_errors(0), res.mean_errors(last),
              res.mean_errors(kmin)));

  // Bootstrap the seed set: the minimizing bandwidth should sit in
  // [0.03, 0.1] for at least 80% of resamples.
  const int resamples = 2000;
  const auto seeds = static_cast<Eigen::Index>(res.errors.rows());
  sca::Rng rng(777);
  int hits = 0;
  Eigen::VectorXd means(res.errors.cols());
  for (int b = 0; b < resamples; ++b) {
    means.setZero();
    for (Eigen::Index s = 0; s < seeds; ++s)
      means += res.errors.row(static_cast<Eigen::Index>(
          rng.index(static_cast<std::uint64_t>(seeds))));
    const double eps = res.epsilons[static_cast<std::size_t>(argmin(means))];
    if (eps >= 0.03 - 1e-12 && eps <= 0.1 + 1e-12) ++hits;
  }
  const double frac = static_cast<double>(hits) / resamples;
  g.check(frac >= 0.80,
          fmt("minimizer in [0.03,0.1] for only %.1f%% of resamples", 100 * frac));

  std::string curve;
  for (Eigen::Index k = 0; k < res.mean_errors.size(); ++k)
    curve += fmt(" %.3f", res.mean_errors(k));
  g.note = fmt("means%s, argmin %.2f, bootstrap hit %.1f%%", curve.c_str(),
               res.epsilons[static_cast<std::size_t>(kmin)], 100 * frac);
}

// ---- 5: bandwidth selection rules -------------------------------------------
// The k=100 neighborhood rule lands near 0.05 on the two-Gaussian sample,
// and the bootstrap signal-to-noise rule selects a moderate bandwidth with
// an SNR curve that rises with epsilon.
void criterion5(Gate& g) {
  const auto cloud = two_gaussian_cloud(101, 1000);

  const std::vector<double> neighborhood_grid = {
      0.005, 0.0075, 0.01, 0.015, 0.02, 0.03, 0.05,
      0.075, 0.1,    0.15, 0.2,   0.3,  0.4};
  const auto nb = sca::neighborhood_rule(cloud, neighborhood_grid, 100);
  g.check(nb.selected.has_value(), "neighborhood rule selected nothing");
  if (nb.selected)
    g.check(*nb.selected >= 0.025 && *nb.selected <= 0.1,
            fmt("neighborhood rule picked %.4g outside [0.025, 0.1]",
                *nb.selected));

  const std::vector<double> snr_grid = {0.005, 0.0075, 0.01, 0.015, 0.02,
                                        0.03,  0.05,   0.1,  0.2,   0.5};
  const auto curve = sca::bootstrap_snr(cloud, 1, snr_grid, 50, 5.0, 101);
  g.check(curve.selected.has_value(), "SNR rule selected nothing");
  if (curve.selected)
    g.check(*curve.selected >= 0.02 && *curve.selected <= 0.2,
            fmt("SNR rule picked %.4g outside [0.02, 0.2]", *curve.selected));
  const double rho = spearman_against_index(curve.snr);
  g.check(rho > 0.9, fmt("SNR curve not increasing: Spearman %.3f <= 0.9", rho));

  int skipped = 0;
  for (int k : curve.skipped) skipped += k;
  g.note = fmt("neighborhood %.3g, SNR pick %.3g, Spearman %.3f, %d skipped",
               nb.selected.value_or(-1.0), curve.selected.value_or(-1.0), rho,
               skipped);
}

// ---- 6: nodal domains track the continuum ones ------------------------------
// Sign maps of the first four nontrivial eigenvectors agree with the
// quadrature reference's, on average over independent samples.
void criterion6(Gate& g) {
  const auto model = sca::quadrature_operator(two_gaussian_density(), 1e-3, 2048);
  const auto ref = sca::reference_eigenfunctions(model, 4);
  const std::vector<double> eps_grid = {0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3};
  const int pinned = 2;  // index of 0.075 in the grid
  const int seeds = 10;

  Eigen::MatrixXd mean_err = Eigen::MatrixXd::Zero(eps_grid.size(), 4);
  for (int s = 0; s < seeds; ++s) {
    const auto cloud = two_gaussian_cloud(201 + s, 1000);
    const Eigen::VectorXd x = cloud.points.col(0);
    std::vector<sca::NodalMap> target;
    for (int l = 1; l <= 4; ++l)
      target.push_back(grid_sign_map(ref, model.grid, x, l));
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const auto dec = sca::decompose(
          sca::build_markov(sca::build_kernel(cloud, eps_grid[e])), 4);
      for (int l = 1; l <= 4; ++l)
        mean_err(e, l - 1) +=
            sca::nodal_error(sca::nodal_map(dec, l), target[l - 1]) / seeds;
    }
  }

  for (int l = 1; l <= 4; ++l)
    g.check(mean_err(pinned, l - 1) <= 0.2,
            fmt("mean nodal error %.3f > 0.2 for l=%d at eps=0.075",
                mean_err(pinned, l - 1), l));
  for (std::size_t e = 0; e < eps_grid.size(); ++e)
    g.check(mean_err(e, 0) <= 0.05,
            fmt("mean nodal error %.3f > 0.05 for l=1 at eps=%g",
                mean_err(e, 0), eps_grid[e]));

  std::string l1;
  for (std::size_t e = 0; e < eps_grid.size(); ++e)
    l1 += fmt(" %.3f", mean_err(e, 0));
  g.note = fmt("l=1 means%s; at 0.075: %.3f %.3f %.3f %.3f", l1.c_str(),
               mean_err(pinned, 0), mean_err(pinned, 1), mean_err(pinned, 2),
               mean_err(pinned, 3));
}

// ---- 7: spiral geodesics are noise-sensitive, diffusion distances are not ---
void criterion7(Gate& g) {
  sca::SpiralSensitivityConfig scfg;  // experiment defaults
  scfg.seed = 7;
  const auto sens = sca::spiral_sensitivity_experiment(scfg);

  g.check(std::abs(sens.baseline_geodesic - 3.46) <= 0.346,
          fmt("noiseless graph distance %.4f not within 10%% of 3.46",
              sens.baseline_geodesic));
  g.check(sens.geodesic_rel_change.size() >= 100,
          fmt("only %zu connected noisy realizations",
              sens.geodesic_rel_change.size()));

  const auto variance = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size() - 1);
  };
  const double var_geo = variance(sens.geodesic_rel_change);
  const double var_diff = variance(sens.diffusion_rel_change);
  g.check(var_diff <= 0.7 * var_geo,
          fmt("diffusion variance %.4g not <= 0.7 x geodesic %.4g", var_diff,
              var_geo));

  int below = 0;
  for (double x : sens.geodesic_rel_change)
    if (x < -0.5) ++below;
  const double below_frac =
      static_cast<double>(below) / static_cast<double>(sens.geodesic_rel_change.size());
  g.check(below_frac >= 0.05,
          fmt("shortcut mode missing: %.1f%% of relative changes below -0.5",
              100 * below_frac));

  // The sparse-sample graphs connect the reference points in only a modest
  // fraction of realizations, so oversample to keep >= 100 usable ones.
  sca::SpiralConsistencyConfig ccfg;
  ccfg.sizes = {600, 4000};
  ccfg.reps = 700;
  ccfg.seed = 5;
  const auto cons = sca::spiral_consistency_experiment(ccfg);
  for (int k = 0; k < 2; ++k)
    g.check(cons.distances[k].size() >= 100,
            fmt("only %zu connected realizations at n=%ld",
                cons.distances[k].size(), static_cast<long>(cons.sizes[k])));
  g.check(std::abs(cons.mean_distance[0] - 3.46) <
              std::abs(cons.mean_distance[0] - 0.60),
          fmt("sparse-sample mean %.4f not closer to 3.46 than to 0.60",
              cons.mean_distance[0]));
  g.check(std::abs(cons.mean_distance[1] - 0.60) <
              std::abs(cons.mean_distance[1] - 3.46),
          fmt("dense-sample mean %.4f not closer to 0.60 than to 3.46",
              cons.mean_distance[1]));

  g.note = fmt("baseline %.3f, var ratio %.2f, below -0.5: %.0f%%, "
               "means %.3f@600 %.3f@4000",
               sens.baseline_geodesic, var_diff / var_geo, 100 * below_frac,
               cons.mean_distance[0], cons.mean_distance[1]);
}

// ---- 8: semigroup behavior ---------------------------------------------------
// Fractional powers agree with integer matrix powers where both exist; the
// evolved density approaches the squared-density limit; and mass leaks
// across a gap ever more slowly as the bandwidth shrinks.
void criterion8(Gate& g) {
  {
    const auto cloud = two_gaussian_cloud(17, 250);
    const auto chain = sca::build_markov(sca::build_kernel(cloud, 0.1));
    const auto dec = sca::decompose(chain, 249);
    const Eigen::VectorXd f = cloud.points.col(0).array().sin().matrix();
    const Eigen::VectorXd via_spectral = sca::apply_A_t(dec, 6 * 0.1, 249, f);
    const Eigen::VectorXd via_powers = sca::m_step(chain, 6) * f;
    const double dev = (via_spectral - via_powers).cwiseAbs().maxCoeff();
    g.check(dev <= 1e-8,
            fmt("projector sum vs matrix power off by %.3g > 1e-8", dev));
    g.note = fmt("power dev %.1e", dev);
  }
  {
    sca::Density1D tri;
    tri.gaussians = {{0.0, 1.0, 0.35}, {3.0, 1.0, 0.35}, {7.0, 1.0, 0.30}};
    const auto model = sca::quadrature_operator(tri, 0.002, 1024);
    const auto ev = sca::evolve_density(model, 1000.0, 512);
    const double tv =
        sca::total_variation(ev.omega, sca::squared_density_target(model));
    g.check(tv <= 1e-3,
            fmt("evolved density TV %.4g > 1e-3 from the squared-density "
                "limit", tv));
    g.note += fmt(", TV %.2e", tv);
  }
  {
    const auto cloud = sca::generate({sca::ParallelLinesParams{}, 23}, 600);
    const std::vector<double> eps_grid = {0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    std::string path;
    for (double eps : eps_grid) {
      const auto chain = sca::build_markov(sca::build_kernel(cloud, eps));
      sca::Warnings warnings;  // clamping notes for roundoff-negative modes
      const auto dec = sca::decompose(chain, 599);
      Eigen::VectorXd on_first = Eigen::VectorXd::Zero(600);
      for (Eigen::Index i = 0; i < 600; ++i)
        if ((*cloud.labels)[i] == 0) on_first(i) = 1.0;
      const Eigen::VectorXd spread =
          sca::apply_A_t(dec, 1.0, 599, on_first, &warnings);
      double cross = 0.0;
      for (Eigen::Index i = 0; i < 600; ++i)
        if ((*cloud.labels)[i] == 1) cross += chain.stationary(i) * spread(i);
      monotone = monotone && cross < prev;
      prev = cross;
      path += fmt(" %.2e", cross);
    }
    g.check(monotone,
            fmt("cross-line mass not decreasing with the bandwidth:%s",
                path.c_str()));
    g.note += fmt(", cross mass%s", path.c_str());
  }
}

// ---- 9: two point masses -----------------------------------------------------
// With clusters this separated the chain is block diagonal to machine
// precision: the second eigenvalue sits at 1 and the indicator structure of
// its eigenvector survives a million-step embedding unchanged.
void criterion9(Gate& g) {
  sca::TwoPointMassParams params;
  params.jitter_sd = 1e-3;
  const auto cloud = sca::generate({params, 2}, 400);
  const auto chain = sca::build_markov(sca::build_kernel(cloud, 1e-3));
  sca::Warnings warnings;  // the top pair is degenerate by construction
  const auto dec = sca::decompose(chain, 2, sca::EigenMethod::automatic,
                                  &warnings);
  g.check(dec.eigenvalues(1) >= 1.0 - 1e-6,
          fmt("lambda_1 = %.12f below 1 - 1e-6", dec.eigenvalues(1)));

  double mean[2] = {0.0, 0.0};
  int count[2] = {0, 0};
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const int c = (*cloud.labels)[i];
    mean[c] += dec.psi(i, 1);
    ++count[c];
  }
  mean[0] /= count[0];
  mean[1] /= count[1];
  double var[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const int c = (*cloud.labels)[i];
    var[c] += (dec.psi(i, 1) - mean[c]) * (dec.psi(i, 1) - mean[c]);
  }
  const double gap = std::abs(mean[0] - mean[1]);
  const double sd0 = std::sqrt(var[0] / (count[0] - 1));
  const double sd1 = std::sqrt(var[1] / (count[1] - 1));
  g.check(sd0 <= 1e-3 * gap && sd1 <= 1e-3 * gap,
          fmt("within-cluster sds %.3g/%.3g exceed 1e-3 x gap %.3g", sd0, sd1,
              gap));

  const auto embedding = sca::embed(dec, 1000000, 1);
  bool unchanged = true;
  for (Eigen::Index i = 0; i < cloud.size(); ++i)
    unchanged = unchanged &&
                sign_of(embedding.coords(i, 0)) == sign_of(dec.psi(i, 1));
  g.check(unchanged, "sign partition flipped under the m=10^6 embedding");

  g.note = fmt("lambda_1 %.15f, sds %.1e/%.1e, gap %.3f", dec.eigenvalues(1),
               sd0, sd1, gap);
}

// ---- 10: coarse-graining ----------------------------------------------------
// One cluster per point reproduces the m-step chain exactly; two clusters on
// a two-cluster sample retain the slow eigenvalue and all the mass.
void criterion10(Gate& g) {
  {
    const auto cloud = two_gaussian_cloud(31, 120);
    const auto chain = sca::build_markov(sca::build_kernel(cloud, 0.2));
    const auto dec = sca::decompose(chain, 6);
    const auto quant = sca::kmeans_diffusion(sca::embed(dec, 3, 6), 120, 9);
    const auto coarse = sca::coarse_chain(chain, quant, 3);
    const Eigen::MatrixXd am = sca::m_step(chain, 3);
    double trans_dev = 0.0;
    for (Eigen::Index i = 0; i < 120; ++i)
      for (Eigen::Index j = 0; j < 120; ++j)
        trans_dev = std::max(
            trans_dev,
            std::abs(coarse.transition(quant.assignment[static_cast<std::size_t>(i)],
                                       quant.assignment[static_cast<std::size_t>(j)]) -
                     am(i, j)));
    g.check(trans_dev <= 1e-10,
            fmt("k=n coarse chain differs from the m-step chain by %.3g",
                trans_dev));
    double mass_dev = 0.0;
    for (int c = 0; c < 120; ++c)
      mass_dev = std::max(
          mass_dev, std::abs(coarse.masses(c) -
                             chain.stationary(quant.representatives[
                                 static_cast<std::size_t>(c)])));
    g.check(mass_dev <= 1e-12,
            fmt("k=n masses differ from the stationary weights by %.3g",
                mass_dev));
    g.note = fmt("identity dev %.1e", trans_dev);
  }
  {
    const auto cloud = two_gaussian_cloud(41, 400);
    const auto chain = sca::build_markov(sca::build_kernel(cloud, 0.1));
    const auto dec = sca::decompose(chain, 3);
    const auto quant = sca::kmeans_diffusion(sca::embed(dec, 5, 1), 2, 9);
    const auto coarse = sca::coarse_chain(chain, quant, 5);
    const auto fidelity = sca::spectral_fidelity(chain, coarse, 1);
    g.check(fidelity[0] <= 0.1,
            fmt("two-cluster eigenvalue gap %.4f > 0.1", fidelity[0]));
    const double mass_total = std::abs(coarse.masses.sum() - 1.0);
    g.check(mass_total <= 1e-12,
            fmt("coarse masses sum off by %.3g > 1e-12", mass_total));
    g.note += fmt(", fidelity %.4f, mass dev %.1e", fidelity[0], mass_total);
  }
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<void(Gate&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table = {
      {1, "operator identities", 10, criterion1},
      {2, "diffusion distance identities", 30, criterion2},
      {3, "extension fixed point", 10, criterion3},
      {4, "eigenvector error U-shape", 600, criterion4},
      {5, "bandwidth selection rules", 900, criterion5},
      {6, "nodal domain stability", 600, criterion6},
      {7, "spiral geodesic sensitivity", 1200, criterion7},
      {8, "semigroup behavior", 300, criterion8},
      {9, "two point masses", 60, criterion9},
      {10, "coarse-graining", 120, criterion10},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    only = std::atoi(argv[2]);
    if (only < 1 || only > 10) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[2]);
      return 2;
    }
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }

  int ran = 0;
  int passed = 0;
  for (const auto& criterion : criteria()) {
    if (only != 0 && criterion.id != only) continue;
    ++ran;
    Gate gate;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(gate);
    } catch (const std::exception& e) {
      gate.check(false, fmt("exception: %s", e.what()));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    gate.check(elapsed <= criterion.budget_seconds,
               fmt("runtime %.1f s over the %.0f s budget", elapsed,
                   criterion.budget_seconds));
    const bool ok = gate.failures.empty();
    passed += ok ? 1 : 0;
    std::printf("[%s] criterion %2d: %s (%.1f s / %.0f s)%s%s\n",
                ok ? "PASS" : "FAIL", criterion.id, criterion.label, elapsed,
                criterion.budget_seconds, gate.note.empty() ? "" : " -- ",
                gate.note.c_str());
    for (const auto& failure : gate.failures)
      std::printf("       - %s\n", failure.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
