#pragma once

#include <Eigen/Dense>

#include "sca/kernelgraph.hpp"

namespace sca {

// Row-stochastic averaging operator built from a kernel graph, together
// with its symmetric conjugate and graph Laplacian:
//   A  = D^{-1} K                (rows sum to 1)
//   A~ = D^{-1/2} K D^{-1/2}     (same spectrum, symmetric)
//   L  = D - K                   (rows sum to 0)
// where D = diag(rho). The stationary distribution s_i = rho_i / sum_j rho_j
// satisfies s^T A = s^T, and detailed balance
// s_i A(i,j) = s_j A(j,i) = K(i,j)/sum(rho) holds exactly. An eigenpair
// A psi = lambda psi is equivalent to L psi = (1-lambda) D psi.
struct MarkovChain {
  Eigen::MatrixXd transition;   // A
  Eigen::MatrixXd symmetric;    // A~, consumed by the eigensolver
  Eigen::MatrixXd laplacian;    // L
  Eigen::VectorXd stationary;   // s, sums to 1
  Eigen::VectorXd degrees;      // rho
  double epsilon = 0.0;
  int dim = 0;
  KernelKind kind = KernelKind::gaussian;
  double truncation_factor = 0.0;
};

// Throws IsolatedVertexError if some degree is zero (possible only for
// truncated or 0/1 kernels).
MarkovChain build_markov(const KernelGraph& graph);

// A^m by repeated squaring (worthwhile once m > 8); m = 0 gives the identity.
Eigen::MatrixXd m_step(const MarkovChain& chain, long m);

}  // namespace sca
