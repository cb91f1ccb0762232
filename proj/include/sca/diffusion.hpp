#pragma once

#include <Eigen/Dense>

#include "sca/errors.hpp"
#include "sca/spectral.hpp"

namespace sca {

// The m-step diffusion map: column l holds lambda_l^m psi_l, l = 1..q
// (the trivial constant psi_0 is excluded). Squared Euclidean distance in
// these coordinates equals the squared m-step diffusion distance.
struct DiffusionEmbedding {
  Eigen::MatrixXd coords;      // n x q
  long m = 1;
  int q = 0;
  double epsilon = 0.0;
  Eigen::VectorXd eigenvalues;  // lambda_1..lambda_q actually used
};

DiffusionEmbedding embed(const SpectralDecomposition& dec, long m, int q);

// D^2 = sum_{l=1..q} lambda_l^{2m} (psi_l(i) - psi_l(j))^2.
double diffusion_distance_spectral(const SpectralDecomposition& dec, long m,
                                   Eigen::Index i, Eigen::Index j, int q);

// Brute-force definition: D^2 = sum_k (A^m(i,k) - A^m(j,k))^2 / s_k.
// Serves as the oracle for the spectral formula (equal at full order).
double diffusion_distance_direct(const MarkovChain& model, long m,
                                 Eigen::Index i, Eigen::Index j);

// Overload for batch use with a precomputed m-step matrix.
double diffusion_distance_direct(const Eigen::MatrixXd& m_step_matrix,
                                 const Eigen::VectorXd& stationary,
                                 Eigen::Index i, Eigen::Index j);

// (A f - f) / epsilon; discrete analogue of the generator
// -Laplacian + (grad p / p) . grad in the small-epsilon limit.
Eigen::VectorXd apply_generator(const MarkovChain& model,
                                const Eigen::VectorXd& f, double epsilon);

// lambda^e with the conventions of the projector sum: exponents integral
// within 1e-9 are rounded and applied exactly (covers negative eigenvalues
// of 0/1 kernels); otherwise a negative base is clamped to 0 and *clamped
// is set. Shared by apply_A_t and the quadrature-oracle loss estimate.
double spectral_power(double lambda, double exponent, bool* clamped = nullptr);

// Projector-sum semigroup estimate:
//   A_t f = sum_{l=0}^q lambda_l^{t/eps} <psi_l, f>_s psi_l,
// with <psi,f>_s the s-weighted inner product (= phi_l . f). Negative
// eigenvalues with a non-integer exponent are clamped to 0 with a warning;
// the Gaussian kernel matrix is positive semi-definite, so a negative
// lambda is roundoff (or a 0/1 kernel, where only integer t/eps is exact).
Eigen::VectorXd apply_A_t(const SpectralDecomposition& dec, double t, int q,
                          const Eigen::VectorXd& f,
                          Warnings* warnings = nullptr);

// rho(t) = sum_{l>=1} exp(-nu_l^2 t), truncated at the available order.
// truncation_tail is set when the last retained term exp(-nu_q^2 t) > 1e-3,
// i.e. the tail beyond q may still contribute materially.
struct RhoDiagnostic {
  double value = 0.0;
  bool truncation_tail = false;
};

RhoDiagnostic rho_diagnostic(const SpectralDecomposition& dec, double t);

}  // namespace sca
