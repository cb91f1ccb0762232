#include <cmath>

#include "doctest.h"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/rng.hpp"
#include "sca/spectral.hpp"

namespace {

sca::MarkovChain collinear_chain() {
  sca::PointCloud cloud;
  cloud.points.resize(3, 1);
  cloud.points << 0.0, 1.0, 2.0;
  return sca::build_markov(sca::build_kernel(cloud, 0.5));
}

sca::PointCloud random_cloud(Eigen::Index n, int dim, std::uint64_t seed) {
  sca::PointCloud cloud;
  cloud.points.resize(n, dim);
  sca::Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) cloud.points(i, j) = rng.normal();
  }
  return cloud;
}

}  // namespace

TEST_CASE("three collinear points: frozen spectrum") {
  const sca::SpectralDecomposition dec = sca::decompose(collinear_chain(), 2);
  CHECK(dec.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == doctest::Approx(0.49640141).epsilon(1e-7));
  CHECK(dec.eigenvalues(2) == doctest::Approx(0.10365533).epsilon(1e-7));
}

TEST_CASE("trivial eigenpair: constant eigenvector at eigenvalue one") {
  const sca::SpectralDecomposition dec = sca::decompose(collinear_chain(), 2);
  CHECK((dec.psi.col(0).array() - 1.0).abs().maxCoeff() <= 1e-12);
  // phi_0 is the stationary distribution itself.
  CHECK((dec.phi.col(0) - dec.stationary).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("eigenvectors are normalized and biorthogonal in the stationary "
          "inner product") {
  const sca::PointCloud cloud = random_cloud(60, 2, 17);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.4));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 10);
  for (int l = 0; l <= dec.q; ++l) {
    const double norm = dec.psi.col(l).cwiseAbs2().dot(dec.stationary);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((dec.phi.col(l) -
           dec.stationary.cwiseProduct(dec.psi.col(l)))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }
  const sca::BiorthogonalityReport report = sca::biorthogonality_check(dec);
  CHECK(report.max_off_diagonal <= 1e-12);
  CHECK(report.max_diagonal_deviation <= 1e-12);
}

TEST_CASE("eigenvectors solve the transition eigenproblem") {
  const sca::PointCloud cloud = random_cloud(80, 1, 5);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.3));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 8);
  for (int l = 0; l <= dec.q; ++l) {
    const Eigen::VectorXd residual =
        chain.transition * dec.psi.col(l) -
        dec.eigenvalues(l) * dec.psi.col(l);
    CHECK(residual.norm() / dec.psi.col(l).norm() <= 1e-10);
  }
  CHECK(dec.max_residual <= 1e-8);
}

TEST_CASE("full-order expansion reconstructs the transition matrix") {
  const sca::PointCloud cloud = random_cloud(40, 2, 23);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 39);
  Eigen::MatrixXd reconstructed = Eigen::MatrixXd::Zero(40, 40);
  for (int l = 0; l <= dec.q; ++l) {
    reconstructed +=
        dec.eigenvalues(l) * dec.psi.col(l) * dec.phi.col(l).transpose();
  }
  CHECK((reconstructed - chain.transition).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sign convention: the largest-magnitude entry is positive") {
  const sca::PointCloud cloud = random_cloud(50, 1, 31);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.2));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 6);
  for (int l = 0; l <= dec.q; ++l) {
    Eigen::Index argmax = 0;
    dec.psi.col(l).cwiseAbs().maxCoeff(&argmax);
    CHECK(dec.psi(argmax, l) > 0.0);
  }
}

TEST_CASE("two gaussian point masses: tanh eigenvalue") {
  sca::PointCloud cloud;
  cloud.points.resize(2, 1);
  cloud.points << 0.0, 1.0;
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 1);
  // lambda_1 = (1 - e^(-1/(4 eps))) / (1 + e^(-1/(4 eps))) = tanh(1/(8 eps)).
  CHECK(dec.eigenvalues(1) ==
        doctest::Approx(0.24491866240370913).epsilon(1e-14));
}

TEST_CASE("symmetric square flags its degenerate pair") {
  sca::PointCloud cloud;
  cloud.points.resize(4, 2);
  cloud.points << 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  sca::Warnings warnings;
  const sca::SpectralDecomposition dec =
      sca::decompose(chain, 2, sca::EigenMethod::automatic, &warnings);
  CHECK(std::abs(dec.eigenvalues(1) - dec.eigenvalues(2)) <= 1e-12);
  REQUIRE(!dec.degenerate_pairs.empty());
  CHECK(dec.degenerate_pairs[0] == 1);
  CHECK(!warnings.empty());
}

TEST_CASE("dense and iterative solvers agree") {
  const sca::PointCloud cloud = random_cloud(300, 2, 77);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  const sca::TopEigenpairs dense =
      sca::top_eigenpairs(chain.symmetric, 6, sca::EigenMethod::dense);
  const sca::TopEigenpairs iterative =
      sca::top_eigenpairs(chain.symmetric, 6, sca::EigenMethod::lanczos);
  for (int l = 0; l < 6; ++l) {
    CHECK(dense.values(l) ==
          doctest::Approx(iterative.values(l)).epsilon(1e-11));
    const double overlap =
        std::abs(dense.vectors.col(l).dot(iterative.vectors.col(l)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("decompose validates the truncation order") {
  const sca::MarkovChain chain = collinear_chain();
  CHECK_THROWS_AS(sca::decompose(chain, -1), sca::ParameterError);
  CHECK_THROWS_AS(sca::decompose(chain, 3), sca::ParameterError);
  // q = 0 keeps only the trivial pair and is legal.
  const sca::SpectralDecomposition trivial = sca::decompose(chain, 0);
  CHECK(trivial.eigenvalues.size() == 1);
  CHECK(trivial.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues never exceed one and decrease") {
  const sca::PointCloud cloud = random_cloud(70, 3, 3);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.8));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 20);
  for (int l = 0; l <= dec.q; ++l) {
    CHECK(std::abs(dec.eigenvalues(l)) <= 1.0 + 1e-10);
    if (l > 0) CHECK(dec.eigenvalues(l) <= dec.eigenvalues(l - 1) + 1e-14);
  }
  // Rate representation nu^2 = (1 - lambda) / eps.
  for (int l = 0; l <= dec.q; ++l) {
    CHECK(dec.nu_sq(l) ==
          doctest::Approx((1.0 - dec.eigenvalues(l)) / 0.8).epsilon(1e-12));
  }
}
