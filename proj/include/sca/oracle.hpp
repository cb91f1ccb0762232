#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sca/errors.hpp"
#include "sca/nystrom.hpp"
#include "sca/pointcloud.hpp"
#include "sca/spectral.hpp"

namespace sca {

// Analytic 1-d density: a mixture of Gaussian components and uniform
// segments. Component weights (both kinds together) must sum to 1.
struct Density1D {
  struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
    double weight = 1.0;
  };
  struct Segment {
    double lo = 0.0;
    double hi = 1.0;
    double weight = 1.0;
  };

  std::vector<Gaussian> gaussians;
  std::vector<Segment> segments;

  double pdf(double x) const;
  void validate() const;
};

// Quadrature discretization of the kernel diffusion operator
//   A f(x) = (integral of k_eps(x,y) f(y) p(y) dy) / rho(x)
// on a uniform grid over the density's effective support. Weights are
// w_i = p(x_i) dx renormalized to sum 1, so grid sums against w realize
// integrals against dP.
struct QuadratureModel {
  Eigen::VectorXd grid;        // G ascending abscissae
  Eigen::VectorXd weights;     // w_i >= 0, sum 1
  Eigen::VectorXd density;     // p(x_i)
  Eigen::MatrixXd transition;  // T(i,j) = k(x_i,x_j) w_j / rho_i, rows sum 1
  Eigen::VectorXd degrees;     // rho_i = sum_j k(x_i,x_j) w_j
  Eigen::VectorXd stationary;  // s_i = rho_i / sum_j rho_j w_j; sum s.w = 1
  double epsilon = 0.0;
  double truncated_mass = 0.0;  // analytic mass outside the grid span
};

// Builds the grid (component mean +- 6 sd; segments padded by 3 sqrt(eps)),
// weights, and the row-stochastic operator. Warns when more than 1e-6 of
// the analytic mass falls outside the grid span.
QuadratureModel quadrature_operator(const Density1D& density, double epsilon,
                                    Eigen::Index grid_size,
                                    Warnings* warnings = nullptr);

// Ground-truth eigenfunctions on the grid, normalized and sign-fixed the
// same way as an empirical decomposition: sum_i psi_l(i)^2 s_i w_i = 1,
// largest-|psi| entry positive. Residuals |T psi - lambda psi| are checked
// in the s.w-weighted norm (the norm in which T is self-adjoint); grid
// points carrying zero weight (outside uniform segments) are filled by
// kernel-smoothing extension from the positive-weight subgrid.
struct ReferenceEigenfunctions {
  Eigen::VectorXd eigenvalues;  // q+1, descending, eigenvalues(0) = 1
  Eigen::MatrixXd psi;          // G x (q+1)
  Eigen::VectorXd nu_sq;        // (1 - lambda_l) / epsilon
  double epsilon = 0.0;
};

ReferenceEigenfunctions reference_eigenfunctions(
    const QuadratureModel& model, int q,
    EigenMethod method = EigenMethod::automatic, Warnings* warnings = nullptr);

// Distribution after m = round(t / epsilon) steps started from a point mass
// at grid index x0. Powers of the operator are taken by repeated squaring
// for large m; after every multiply the rows are renormalized to unit mass
// and the largest pre-normalization defect is reported as mass_deviation
// (a single multiply cannot distort mass by more than ~1e-14, but a million
// uncorrected steps would compound it).
struct EvolveResult {
  Eigen::VectorXd omega;        // probability vector over the grid
  long steps = 0;               // m
  double mass_deviation = 0.0;  // max per-multiply |row sum - 1|
};

EvolveResult evolve_density(const QuadratureModel& model, double t,
                            Eigen::Index x0);

// The t -> infinity limit of evolve_density: stationary mass proportional
// to w_i rho_i, which up to O(epsilon) is the discretization of
// p^2(.) / integral p^2. Returned in its exact small-epsilon form w^2/sum w^2.
Eigen::VectorXd squared_density_target(const QuadratureModel& model);

// 0.5 * l1 distance between probability vectors.
double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Default test functions for the loss estimate: the first min(20, q+1)
// reference eigenfunctions plus standardized polynomials x, x^2, x^3.
std::vector<Eigen::VectorXd> default_dictionary(
    const QuadratureModel& model, const ReferenceEigenfunctions& reference);

// max_f |(A_ref - A_est) f|_w / |f|_w over the dictionary, where both
// operators act by projector sums on grid functions: coefficients are
// s.w-weighted inner products, the norm is w-weighted (L2 of the sampling
// density). This is a LOWER bound on the operator norm: the dictionary is
// finite, the true supremum over smooth bounded functions is not computable.
double operator_loss(const Eigen::MatrixXd& ref_psi,
                     const Eigen::VectorXd& ref_scales,
                     const Eigen::MatrixXd& est_psi,
                     const Eigen::VectorXd& est_scales,
                     const Eigen::VectorXd& stationary,
                     const Eigen::VectorXd& weights,
                     const std::vector<Eigen::VectorXd>& dictionary);

// Lower-bound estimate of the loss |A_t^true - A_t(eps, q, sample)| at time
// t: the reference semigroup uses exp(-nu_l^2 t) on reference_order
// eigenfunctions, the estimator side extends psi_hat_0..q to the grid and
// uses lambda_hat^(t/eps_hat) with the apply_A_t clamping conventions.
double estimate_loss(const PointCloud& cloud, const SpectralDecomposition& dec,
                     const QuadratureModel& model,
                     const ReferenceEigenfunctions& reference, double t, int q,
                     const std::vector<Eigen::VectorXd>& dictionary,
                     Warnings* warnings = nullptr);

// Convenience overload computing the reference at the given order.
double estimate_loss(const PointCloud& cloud, const SpectralDecomposition& dec,
                     const QuadratureModel& model, double t, int q,
                     const std::vector<Eigen::VectorXd>& dictionary,
                     int reference_order = 64, Warnings* warnings = nullptr);

}  // namespace sca
