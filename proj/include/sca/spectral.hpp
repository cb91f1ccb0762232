#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sca/errors.hpp"
#include "sca/markov.hpp"

namespace sca {

enum class EigenMethod { automatic, dense, lanczos };

// Top-k eigenpairs (descending, algebraic order) of a dense symmetric matrix.
// Dense full decomposition for small problems, Lanczos with full
// reorthogonalization above the cutoff. Vectors are orthonormal columns.
struct TopEigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

TopEigenpairs top_eigenpairs(const Eigen::MatrixXd& sym, int k,
                             EigenMethod method = EigenMethod::automatic);

// Eigenpairs of the averaging operator A = D^{-1}K, computed through the
// symmetric conjugate A~ = D^{-1/2} K D^{-1/2} (same spectrum, orthonormal
// eigenvectors v) and rescaled:
//   psi_l = v_l / sqrt(s)   (right eigenvectors of A,  A psi = lambda psi)
//   phi_l = v_l * sqrt(s)   (left  eigenvectors,       phi_l = s .* psi_l)
// normalized so that sum_i psi_l(i)^2 s_i = 1, which makes {psi_l} an
// orthonormal basis of the s-weighted inner product and {phi_l} its
// biorthogonal dual.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // lambda_0 >= ... >= lambda_q
  Eigen::MatrixXd psi;          // n x (q+1)
  Eigen::MatrixXd phi;          // n x (q+1)
  Eigen::VectorXd nu_sq;        // (1 - lambda_l) / epsilon
  double epsilon = 0.0;
  int q = 0;
  Eigen::VectorXd stationary;   // s, carried for weighted norms downstream
  KernelKind kind = KernelKind::gaussian;  // training kernel, for extension
  double truncation_factor = 0.0;

  // Indices l with lambda_l - lambda_{l+1} < 1e-10; l == q flags a
  // truncation boundary that splits a near-degenerate cluster. Individual
  // eigenvectors inside such a cluster are not identifiable.
  std::vector<int> degenerate_pairs;
  double max_residual = 0.0;  // max_l |A psi_l - lambda_l psi_l| / |psi_l|
};

// Sign convention: each psi column is flipped so that its entry of largest
// absolute value is positive; ties broken by lowest index. Deterministic,
// so repeated decompositions of the same model agree bitwise.
SpectralDecomposition decompose(const MarkovChain& model, int q,
                                EigenMethod method = EigenMethod::automatic,
                                Warnings* warnings = nullptr);

struct BiorthogonalityReport {
  double max_off_diagonal = 0.0;       // max_{k != l} |phi_k . psi_l|
  double max_diagonal_deviation = 0.0; // max_l |phi_l . psi_l - 1|
};

BiorthogonalityReport biorthogonality_check(const SpectralDecomposition& dec);

}  // namespace sca
