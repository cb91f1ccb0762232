#include "sca/markov.hpp"

#include "sca/errors.hpp"

namespace sca {

MarkovChain build_markov(const KernelGraph& graph) {
  const Eigen::Index n = graph.weights.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (graph.degrees(i) <= 0.0) {
      throw IsolatedVertexError(static_cast<long>(i));
    }
  }
  MarkovChain chain;
  chain.degrees = graph.degrees;
  chain.epsilon = graph.epsilon;
  chain.dim = graph.dim;
  chain.kind = graph.kind;
  chain.truncation_factor = graph.truncation_factor;
  chain.transition = graph.degrees.cwiseInverse().asDiagonal() * graph.weights;
  chain.stationary = graph.degrees / graph.degrees.sum();

  Eigen::VectorXd inv_sqrt = graph.degrees.cwiseSqrt().cwiseInverse();
  chain.symmetric =
      inv_sqrt.asDiagonal() * graph.weights * inv_sqrt.asDiagonal();
  // Pin exact symmetry (the two-sided scaling can differ by an ulp).
  chain.symmetric =
      ((chain.symmetric + chain.symmetric.transpose()) / 2.0).eval();

  chain.laplacian = -graph.weights;
  chain.laplacian.diagonal() += graph.degrees;
  return chain;
}

Eigen::MatrixXd m_step(const MarkovChain& chain, long m) {
  if (m < 0) throw ParameterError("step count m must be nonnegative");
  const Eigen::Index n = chain.transition.rows();
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  if (m <= 8) {
    Eigen::MatrixXd out = chain.transition;
    for (long k = 1; k < m; ++k) out = (out * chain.transition).eval();
    return out;
  }
  // Repeated squaring.
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = chain.transition;
  unsigned long e = static_cast<unsigned long>(m);
  bool result_is_identity = true;
  while (e > 0) {
    if (e & 1UL) {
      if (result_is_identity) {
        result = base;
        result_is_identity = false;
      } else {
        result = (result * base).eval();
      }
    }
    e >>= 1UL;
    if (e > 0) base = (base * base).eval();
  }
  return result;
}

}  // namespace sca
