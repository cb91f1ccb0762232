#include <cmath>

#include "doctest.h"
#include "sca/diffusion.hpp"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/nystrom.hpp"
#include "sca/rng.hpp"

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

}  // namespace

TEST_CASE("extension reproduces the eigenvectors at the sample points") {
  const sca::PointCloud cloud = random_cloud(60, 2, 10);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 6);
  for (int l = 0; l <= 6; ++l) {
    const Eigen::VectorXd extended =
        sca::extend_eigenvector(cloud, dec, l, {cloud.points});
    CHECK((extended - dec.psi.col(l)).cwiseAbs().maxCoeff() /
              dec.psi.col(l).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("extended embedding matches the in-sample embedding") {
  const sca::PointCloud cloud = random_cloud(45, 1, 20);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.4));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 4);
  const sca::DiffusionEmbedding embedding = sca::embed(dec, 2, 4);
  const Eigen::MatrixXd extended =
      sca::extend_embedding(cloud, dec, 2, 4, {cloud.points});
  CHECK((extended - embedding.coords).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("extension interpolates smoothly between samples") {
  // On a fine 1-d grid, the extension at a midpoint must land between the
  // neighboring sample values (the eigenvector is locally monotone).
  sca::PointCloud cloud;
  cloud.points.resize(41, 1);
  for (Eigen::Index i = 0; i < 41; ++i) {
    cloud.points(i, 0) = static_cast<double>(i) / 40.0;
  }
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.01));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 1);
  Eigen::MatrixXd query(1, 1);
  query(0, 0) = 0.5 * (cloud.points(19, 0) + cloud.points(20, 0));
  const Eigen::VectorXd mid = sca::extend_eigenvector(cloud, dec, 1, {query});
  const double lo = std::min(dec.psi(19, 1), dec.psi(20, 1));
  const double hi = std::max(dec.psi(19, 1), dec.psi(20, 1));
  CHECK(mid(0) >= lo - 1e-6);
  CHECK(mid(0) <= hi + 1e-6);
}

TEST_CASE("extension rejects out-of-range orders and dimension mismatches") {
  const sca::PointCloud cloud = random_cloud(30, 2, 5);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.5));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 3);
  Eigen::MatrixXd query(1, 2);
  query.setZero();
  CHECK_THROWS_AS(sca::extend_eigenvector(cloud, dec, 4, {query}),
                  sca::ParameterError);
  CHECK_THROWS_AS(sca::extend_eigenvector(cloud, dec, -1, {query}),
                  sca::ParameterError);
  Eigen::MatrixXd wrong(1, 3);
  wrong.setZero();
  CHECK_THROWS_AS(sca::extend_eigenvector(cloud, dec, 1, {wrong}),
                  sca::ParameterError);
}

TEST_CASE("a query with no kernel mass is reported as isolated") {
  const sca::PointCloud cloud = random_cloud(20, 1, 2);
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 0.01));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 1);
  Eigen::MatrixXd query(1, 1);
  // exp(-d^2/(4 eps)) underflows to exactly 0 for d^2/(4 eps) > ~745.
  query(0, 0) = 1e4;
  CHECK_THROWS_AS(sca::extend_eigenvector(cloud, dec, 1, {query}),
                  sca::IsolatedVertexError);
}

TEST_CASE("an eigenvalue below the conditioning floor is rejected") {
  sca::PointCloud cloud;
  cloud.points.resize(2, 1);
  cloud.points << 0.0, 1.0;
  // lambda_1 = tanh(1/(8 eps)); eps = 1e8 pushes it to ~1.25e-9 < 1e-8.
  const sca::MarkovChain chain =
      sca::build_markov(sca::build_kernel(cloud, 1e8));
  const sca::SpectralDecomposition dec = sca::decompose(chain, 1);
  REQUIRE(std::abs(dec.eigenvalues(1)) < 1e-8);
  Eigen::MatrixXd query(1, 1);
  query(0, 0) = 0.5;
  try {
    sca::extend_eigenvector(cloud, dec, 1, {query});
    FAIL("expected IllConditionedExtensionError");
  } catch (const sca::IllConditionedExtensionError& e) {
    CHECK(e.ell() == 1);
    CHECK(std::abs(e.lambda()) < 1e-8);
  }
}

TEST_CASE("extension respects the training kernel truncation") {
  const sca::PointCloud cloud = random_cloud(25, 1, 7);
  const sca::KernelGraph graph = sca::build_kernel(cloud, 0.5, 4.0);
  const sca::MarkovChain chain = sca::build_markov(graph);
  const sca::SpectralDecomposition dec = sca::decompose(chain, 2);
  CHECK(dec.truncation_factor == 4.0);
  // A query beyond every point's cutoff radius has zero truncated mass.
  Eigen::MatrixXd query(1, 1);
  query(0, 0) = cloud.points.maxCoeff() + 4.0 * std::sqrt(0.5) + 1.0;
  CHECK_THROWS_AS(sca::extend_eigenvector(cloud, dec, 1, {query}),
                  sca::IsolatedVertexError);
}
