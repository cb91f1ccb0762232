#include <cmath>

#include "doctest.h"
#include "sca/diffusion.hpp"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"

namespace {

sca::PointCloud random_cloud(Eigen::Index n, int dim, std::uint64_t seed) {
  sca::PointCloud cloud;
  cloud.points.resize(n, dim);
  sca::Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) cloud.points(i, j) = rng.normal();
  }
  return cloud;
}

struct Fit {
  sca::MarkovChain chain;
  sca::SpectralDecomposition dec;
};

Fit fit(const sca::PointCloud& cloud, double eps, int q) {
  Fit f{sca::build_markov(sca::build_kernel(cloud, eps)), {}};
  f.dec = sca::decompose(f.chain, q);
  return f;
}

}  // namespace

TEST_CASE("embedding coordinates are the scaled eigenvectors") {
  const sca::PointCloud cloud = random_cloud(50, 2, 1);
  const Fit f = fit(cloud, 0.4, 5);
  const sca::DiffusionEmbedding embedding = sca::embed(f.dec, 3, 4);
  REQUIRE(embedding.coords.rows() == 50);
  REQUIRE(embedding.coords.cols() == 4);
  for (int l = 1; l <= 4; ++l) {
    const double scale = std::pow(f.dec.eigenvalues(l), 3);
    CHECK((embedding.coords.col(l - 1) - scale * f.dec.psi.col(l))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }
  CHECK(embedding.m == 3);
  CHECK(embedding.q == 4);
  CHECK(embedding.epsilon == 0.4);
}

TEST_CASE("full-order spectral distance equals the direct definition") {
  const sca::PointCloud cloud = random_cloud(40, 1, 9);
  const Fit f = fit(cloud, 0.3, 39);
  for (long m : {1L, 2L, 5L}) {
    const double spectral =
        sca::diffusion_distance_spectral(f.dec, m, 3, 17, 39);
    const double direct = sca::diffusion_distance_direct(f.chain, m, 3, 17);
    CHECK(spectral == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("truncated distances increase with the retained order") {
  const sca::PointCloud cloud = random_cloud(40, 2, 3);
  const Fit f = fit(cloud, 0.5, 39);
  double prev = 0.0;
  for (int q : {1, 5, 15, 39}) {
    const double d = sca::diffusion_distance_spectral(f.dec, 2, 0, 1, q);
    CHECK(d >= prev - 1e-13);
    prev = d;
  }
}

TEST_CASE("distance is a metric on indices: symmetry and identity") {
  const sca::PointCloud cloud = random_cloud(30, 1, 8);
  const Fit f = fit(cloud, 0.3, 10);
  CHECK(sca::diffusion_distance_spectral(f.dec, 2, 4, 4, 10) == 0.0);
  CHECK(sca::diffusion_distance_spectral(f.dec, 2, 4, 9, 10) ==
        doctest::Approx(sca::diffusion_distance_spectral(f.dec, 2, 9, 4, 10))
            .epsilon(1e-15));
  CHECK(sca::diffusion_distance_spectral(f.dec, 2, 4, 9, 10) > 0.0);
  CHECK_THROWS_AS(sca::diffusion_distance_spectral(f.dec, 2, -1, 0, 10),
                  sca::ParameterError);
  CHECK_THROWS_AS(sca::diffusion_distance_spectral(f.dec, 2, 0, 30, 10),
                  sca::ParameterError);
}

TEST_CASE("spectral power rounds near-integer exponents and clamps "
          "negative bases") {
  bool clamped = false;
  CHECK(sca::spectral_power(-0.5, 3.0, &clamped) == -0.125);
  CHECK(!clamped);
  CHECK(sca::spectral_power(-0.5, 3.0 + 5e-10, &clamped) == -0.125);
  CHECK(!clamped);
  CHECK(sca::spectral_power(-0.5, 2.5, &clamped) == 0.0);
  CHECK(clamped);
  clamped = false;
  CHECK(sca::spectral_power(0.5, 2.5, &clamped) ==
        doctest::Approx(std::pow(0.5, 2.5)).epsilon(1e-15));
  CHECK(!clamped);
}

TEST_CASE("semigroup at integer multiples of eps matches matrix powers") {
  const sca::PointCloud cloud = random_cloud(35, 1, 12);
  const double eps = 0.3;
  const Fit f = fit(cloud, eps, 34);
  sca::Rng rng(99);
  Eigen::VectorXd test_fn(35);
  for (Eigen::Index i = 0; i < 35; ++i) test_fn(i) = rng.normal();
  for (long m : {1L, 4L, 9L}) {
    const Eigen::VectorXd via_power = sca::m_step(f.chain, m) * test_fn;
    const Eigen::VectorXd via_spectrum =
        sca::apply_A_t(f.dec, static_cast<double>(m) * eps, 34, test_fn);
    CHECK((via_power - via_spectrum).norm() / via_power.norm() <= 1e-10);
  }
}

TEST_CASE("semigroup preserves constants at any time") {
  const sca::PointCloud cloud = random_cloud(25, 2, 4);
  const Fit f = fit(cloud, 0.6, 8);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(25);
  const Eigen::VectorXd evolved = sca::apply_A_t(f.dec, 7.31, 8, ones);
  CHECK((evolved - ones).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("generator of a constant vanishes") {
  const sca::PointCloud cloud = random_cloud(25, 1, 6);
  const Fit f = fit(cloud, 0.4, 3);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(25);
  CHECK(sca::apply_generator(f.chain, ones, 0.4).cwiseAbs().maxCoeff() <=
        1e-13);
  // On an eigenvector, the generator acts as multiplication by
  // (lambda - 1)/eps = -nu^2.
  const Eigen::VectorXd g =
      sca::apply_generator(f.chain, f.dec.psi.col(1), 0.4);
  CHECK((g + f.dec.nu_sq(1) * f.dec.psi.col(1)).cwiseAbs().maxCoeff() <=
        1e-9);
}

TEST_CASE("rho diagnostic sums the decay factors and flags heavy tails") {
  const sca::PointCloud cloud = random_cloud(30, 1, 2);
  const Fit f = fit(cloud, 0.3, 5);
  const double t = 0.9;
  double expected = 0.0;
  for (int l = 1; l <= 5; ++l) expected += std::exp(-f.dec.nu_sq(l) * t);
  const sca::RhoDiagnostic diag = sca::rho_diagnostic(f.dec, t);
  CHECK(diag.value == doctest::Approx(expected).epsilon(1e-13));
  CHECK(diag.truncation_tail ==
        (std::exp(-f.dec.nu_sq(5) * t) > 1e-3));
  // At very large times every term dies and the tail flag clears.
  const sca::RhoDiagnostic late = sca::rho_diagnostic(f.dec, 1e6);
  CHECK(late.value <= 1e-3);
  CHECK(!late.truncation_tail);
}

TEST_CASE("polarization identity links distances and return probabilities") {
  // D^2(i,j) at time m equals A^{2m}(i,i)/s_i + A^{2m}(j,j)/s_j
  //                           - 2 A^{2m}(i,j)/s_j.
  const sca::PointCloud cloud = random_cloud(30, 2, 44);
  const Fit f = fit(cloud, 0.5, 29);
  const long m = 3;
  const Eigen::MatrixXd twice = sca::m_step(f.chain, 2 * m);
  for (Eigen::Index i : {0L, 7L}) {
    for (Eigen::Index j : {11L, 23L}) {
      const double direct = sca::diffusion_distance_direct(f.chain, m, i, j);
      const double polarized = twice(i, i) / f.chain.stationary(i) +
                               twice(j, j) / f.chain.stationary(j) -
                               2.0 * twice(i, j) / f.chain.stationary(j);
      CHECK(direct * direct == doctest::Approx(polarized).epsilon(1e-10));
    }
  }
}
