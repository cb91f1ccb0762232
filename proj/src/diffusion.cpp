#include "sca/diffusion.hpp"

#include <cmath>
#include <string>

namespace sca {

namespace {

void check_index(Eigen::Index i, Eigen::Index n, const char* what) {
  if (i < 0 || i >= n) {
    throw ParameterError(std::string(what) + " index out of range");
  }
}

}  // namespace

double spectral_power(double lambda, double exponent, bool* clamped) {
  const double rounded = std::round(exponent);
  if (std::abs(exponent - rounded) <= 1e-9) {
    return std::pow(lambda, rounded);
  }
  if (lambda < 0.0) {
    if (clamped != nullptr) *clamped = true;
    return 0.0;
  }
  return std::pow(lambda, exponent);
}

DiffusionEmbedding embed(const SpectralDecomposition& dec, long m, int q) {
  if (m < 1) throw ParameterError("step count m must be >= 1");
  if (q < 1 || q > dec.q) {
    throw ParameterError("embedding dimension q must satisfy 1 <= q <= " +
                         std::to_string(dec.q));
  }
  DiffusionEmbedding emb;
  emb.m = m;
  emb.q = q;
  emb.epsilon = dec.epsilon;
  emb.eigenvalues = dec.eigenvalues.segment(1, q);
  emb.coords.resize(dec.psi.rows(), q);
  for (int l = 1; l <= q; ++l) {
    emb.coords.col(l - 1) =
        std::pow(dec.eigenvalues(l), static_cast<double>(m)) * dec.psi.col(l);
  }
  return emb;
}

double diffusion_distance_spectral(const SpectralDecomposition& dec, long m,
                                   Eigen::Index i, Eigen::Index j, int q) {
  const Eigen::Index n = dec.psi.rows();
  check_index(i, n, "point");
  check_index(j, n, "point");
  if (q < 0 || q > dec.q) throw ParameterError("order q exceeds decomposition");
  double d2 = 0.0;
  for (int l = 1; l <= q; ++l) {
    const double scale =
        std::pow(dec.eigenvalues(l), 2.0 * static_cast<double>(m));
    const double diff = dec.psi(i, l) - dec.psi(j, l);
    d2 += scale * diff * diff;
  }
  return std::sqrt(std::max(d2, 0.0));
}

double diffusion_distance_direct(const Eigen::MatrixXd& m_step_matrix,
                                 const Eigen::VectorXd& stationary,
                                 Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = m_step_matrix.rows();
  check_index(i, n, "point");
  check_index(j, n, "point");
  double d2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double diff = m_step_matrix(i, k) - m_step_matrix(j, k);
    d2 += diff * diff / stationary(k);
  }
  return std::sqrt(std::max(d2, 0.0));
}

double diffusion_distance_direct(const MarkovChain& model, long m,
                                 Eigen::Index i, Eigen::Index j) {
  return diffusion_distance_direct(m_step(model, m), model.stationary, i, j);
}

Eigen::VectorXd apply_generator(const MarkovChain& model,
                                const Eigen::VectorXd& f, double epsilon) {
  if (f.size() != model.transition.rows()) {
    throw ParameterError("function vector length does not match model size");
  }
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!f.allFinite()) throw ParameterError("function values must be finite");
  return (model.transition * f - f) / epsilon;
}

Eigen::VectorXd apply_A_t(const SpectralDecomposition& dec, double t, int q,
                          const Eigen::VectorXd& f, Warnings* warnings) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw ParameterError("time t must be nonnegative and finite");
  }
  if (q < 0 || q > dec.q) throw ParameterError("order q exceeds decomposition");
  if (f.size() != dec.psi.rows()) {
    throw ParameterError("function vector length does not match model size");
  }
  const double exponent = t / dec.epsilon;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  bool clamped = false;
  for (int l = 0; l <= q; ++l) {
    const double scale = spectral_power(dec.eigenvalues(l), exponent, &clamped);
    if (scale == 0.0) continue;
    out += scale * dec.phi.col(l).dot(f) * dec.psi.col(l);
  }
  if (clamped) {
    warn(warnings,
         "negative eigenvalues clamped to 0 for non-integer exponent t/eps = " +
             std::to_string(exponent));
  }
  return out;
}

RhoDiagnostic rho_diagnostic(const SpectralDecomposition& dec, double t) {
  if (!(t > 0.0)) throw ParameterError("diagnostic time t must be positive");
  RhoDiagnostic out;
  for (int l = 1; l <= dec.q; ++l) {
    out.value += std::exp(-dec.nu_sq(l) * t);
  }
  if (dec.q >= 1 && std::exp(-dec.nu_sq(dec.q) * t) > 1e-3) {
    out.truncation_tail = true;
  }
  return out;
}

}  // namespace sca
