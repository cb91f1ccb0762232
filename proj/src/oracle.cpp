#include "sca/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sca/diffusion.hpp"

namespace sca {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Indices of grid points carrying positive quadrature weight. Zero-weight
// points arise only in the padding added around uniform segments.
std::vector<Eigen::Index> positive_support(const Eigen::VectorXd& weights) {
  std::vector<Eigen::Index> pos;
  pos.reserve(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) pos.push_back(i);
  }
  return pos;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> column) {
  Eigen::Index arg = 0;
  double best = std::abs(column(0));
  for (Eigen::Index i = 1; i < column.size(); ++i) {
    if (std::abs(column(i)) > best) {
      best = std::abs(column(i));
      arg = i;
    }
  }
  if (column(arg) < 0.0) column = -column;
}

}  // namespace

double Density1D::pdf(double x) const {
  double p = 0.0;
  for (const auto& g : gaussians) {
    const double z = (x - g.mean) / g.sd;
    p += g.weight * std::exp(-0.5 * z * z) / (g.sd * std::sqrt(2.0 * kPi));
  }
  for (const auto& seg : segments) {
    if (x >= seg.lo && x <= seg.hi) p += seg.weight / (seg.hi - seg.lo);
  }
  return p;
}

void Density1D::validate() const {
  if (gaussians.empty() && segments.empty()) {
    throw ParameterError("density has no components");
  }
  double total = 0.0;
  for (const auto& g : gaussians) {
    if (!(g.sd > 0.0)) throw ParameterError("component sd must be positive");
    if (!(g.weight > 0.0)) {
      throw ParameterError("component weight must be positive");
    }
    total += g.weight;
  }
  for (const auto& seg : segments) {
    if (!(seg.hi > seg.lo)) {
      throw ParameterError("segment must have positive length");
    }
    if (!(seg.weight > 0.0)) {
      throw ParameterError("component weight must be positive");
    }
    total += seg.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParameterError("component weights must sum to 1, got " +
                         std::to_string(total));
  }
}

QuadratureModel quadrature_operator(const Density1D& density, double epsilon,
                                    Eigen::Index grid_size,
                                    Warnings* warnings) {
  density.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive and finite");
  }
  if (grid_size < 100) throw ParameterError("grid size must be at least 100");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& g : density.gaussians) {
    lo = std::min(lo, g.mean - 6.0 * g.sd);
    hi = std::max(hi, g.mean + 6.0 * g.sd);
  }
  const double pad = 3.0 * std::sqrt(epsilon);
  for (const auto& seg : density.segments) {
    lo = std::min(lo, seg.lo - pad);
    hi = std::max(hi, seg.hi + pad);
  }

  QuadratureModel model;
  model.epsilon = epsilon;
  model.grid = Eigen::VectorXd::LinSpaced(grid_size, lo, hi);
  model.density.resize(grid_size);
  for (Eigen::Index i = 0; i < grid_size; ++i) {
    model.density(i) = density.pdf(model.grid(i));
  }
  const double dx = (hi - lo) / static_cast<double>(grid_size - 1);
  model.weights = model.density * dx;
  const double mass = model.weights.sum();
  if (!(mass > 0.0)) throw NumericError("density vanishes on the whole grid");
  model.weights /= mass;

  for (const auto& g : density.gaussians) {
    model.truncated_mass +=
        g.weight *
        (normal_cdf((lo - g.mean) / g.sd) + normal_cdf((g.mean - hi) / g.sd));
  }
  for (const auto& seg : density.segments) {
    const double overlap =
        std::max(0.0, std::min(hi, seg.hi) - std::max(lo, seg.lo));
    model.truncated_mass += seg.weight * (1.0 - overlap / (seg.hi - seg.lo));
  }
  if (model.truncated_mass > 1e-6) {
    warn(warnings, "grid span truncates an estimated " +
                       std::to_string(model.truncated_mass) +
                       " of the density mass");
  }

  // K(i,j) w_j, then rows divided by their own sums, so the operator rows
  // sum to 1 up to a single re-summation.
  const double inv_bandwidth = 1.0 / (4.0 * epsilon);
  const double prefactor = 1.0 / std::sqrt(4.0 * kPi * epsilon);
  model.transition.resize(grid_size, grid_size);
  for (Eigen::Index i = 0; i < grid_size; ++i) {
    for (Eigen::Index j = 0; j < grid_size; ++j) {
      const double diff = model.grid(i) - model.grid(j);
      model.transition(i, j) = prefactor *
                               std::exp(-diff * diff * inv_bandwidth) *
                               model.weights(j);
    }
  }
  model.degrees = model.transition.rowwise().sum();
  if (model.degrees.minCoeff() <= 0.0) {
    throw NumericError("quadrature operator has a zero-degree grid point");
  }
  model.transition.array().colwise() /= model.degrees.array();

  const double row_defect =
      (model.transition.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_defect > 1e-10) {
    throw NumericError("quadrature operator rows deviate from stochasticity by " +
                       std::to_string(row_defect));
  }
  model.stationary = model.degrees / model.degrees.dot(model.weights);
  return model;
}

ReferenceEigenfunctions reference_eigenfunctions(const QuadratureModel& model,
                                                 int q, EigenMethod method,
                                                 Warnings* warnings) {
  const Eigen::Index G = model.grid.size();
  if (q < 0) throw ParameterError("order q must be nonnegative");
  if (q + 1 > G) throw ParameterError("order q + 1 exceeds the grid size");
  const std::vector<Eigen::Index> pos = positive_support(model.weights);
  const Eigen::Index P = static_cast<Eigen::Index>(pos.size());
  if (q + 1 > P) {
    throw ParameterError(
        "order q + 1 exceeds the positive-weight subgrid size");
  }

  // Conjugating by sqrt(rho . w) symmetrizes the operator on the
  // positive-weight subgrid: S = D^{1/2} T D^{-1/2} with D = diag(rho w).
  Eigen::VectorXd sqrt_mu(P);
  for (Eigen::Index a = 0; a < P; ++a) {
    sqrt_mu(a) = std::sqrt(model.degrees(pos[a]) * model.weights(pos[a]));
  }
  Eigen::MatrixXd sym(P, P);
  for (Eigen::Index a = 0; a < P; ++a) {
    for (Eigen::Index b = 0; b < P; ++b) {
      sym(a, b) = model.transition(pos[a], pos[b]) * sqrt_mu(a) / sqrt_mu(b);
    }
  }
  sym = ((sym + sym.transpose()) / 2.0).eval();

  const TopEigenpairs top = top_eigenpairs(sym, q + 1, method);
  for (Eigen::Index l = 0; l + 1 < top.values.size(); ++l) {
    if (top.values(l) - top.values(l + 1) < 1e-10) {
      warn(warnings, "reference eigenvalues " + std::to_string(l) + " and " +
                         std::to_string(l + 1) +
                         " are numerically degenerate");
    }
  }
  if (std::abs(top.values(0) - 1.0) > 1e-10) {
    throw NumericError("leading quadrature eigenvalue deviates from 1 by " +
                       std::to_string(std::abs(top.values(0) - 1.0)));
  }
  if (top.values.cwiseAbs().maxCoeff() > 1.0 + 1e-10) {
    throw NumericError("quadrature eigenvalue exceeds 1 in magnitude");
  }

  ReferenceEigenfunctions ref;
  ref.epsilon = model.epsilon;
  ref.eigenvalues = top.values;
  ref.nu_sq = (1.0 - top.values.array()) / model.epsilon;
  ref.psi = Eigen::MatrixXd::Zero(G, q + 1);

  Eigen::VectorXd sqrt_sw(P);
  for (Eigen::Index a = 0; a < P; ++a) {
    sqrt_sw(a) = std::sqrt(model.stationary(pos[a]) * model.weights(pos[a]));
  }
  for (int l = 0; l <= q; ++l) {
    Eigen::VectorXd column = Eigen::VectorXd::Zero(G);
    double norm_sq = 0.0;
    for (Eigen::Index a = 0; a < P; ++a) {
      column(pos[a]) = top.vectors(a, l) / sqrt_sw(a);
      norm_sq += column(pos[a]) * column(pos[a]) * model.stationary(pos[a]) *
                 model.weights(pos[a]);
    }
    column /= std::sqrt(norm_sq);
    if (P < G) {
      // Zero-weight padding points do not enter the eigenproblem; fill them
      // through the eigenfunction's own smoothing identity psi = T psi / lambda.
      if (std::abs(ref.eigenvalues(l)) < 1e-8) {
        throw IllConditionedExtensionError(l, ref.eigenvalues(l));
      }
      const Eigen::VectorXd smoothed = model.transition * column;
      Eigen::Index at = 0;
      for (Eigen::Index i = 0; i < G; ++i) {
        if (at < P && pos[at] == i) {
          ++at;
          continue;
        }
        column(i) = smoothed(i) / ref.eigenvalues(l);
      }
    }
    fix_sign(column);
    ref.psi.col(l) = column;
  }

  // The trivial pair is exact mathematics: rows of T sum to one, so the
  // constant function has eigenvalue one. Pin it rather than keep solver
  // noise that 1/sqrt(s w) amplifies at the domain tails.
  ref.eigenvalues(0) = 1.0;
  ref.nu_sq(0) = 0.0;
  ref.psi.col(0).setOnes();

  const Eigen::VectorXd sw = model.stationary.cwiseProduct(model.weights);
  const Eigen::MatrixXd residual =
      model.transition * ref.psi - ref.psi * ref.eigenvalues.asDiagonal();
  for (int l = 0; l <= q; ++l) {
    const double r =
        std::sqrt(residual.col(l).cwiseAbs2().dot(sw));
    if (r > 1e-8) {
      throw NumericError("quadrature eigenfunction " + std::to_string(l) +
                         " residual " + std::to_string(r) +
                         " exceeds 1e-8 in the weighted norm");
    }
  }
  return ref;
}

EvolveResult evolve_density(const QuadratureModel& model, double t,
                            Eigen::Index x0) {
  const Eigen::Index G = model.grid.size();
  if (x0 < 0 || x0 >= G) throw ParameterError("start index out of range");
  if (t < 0.0 || !std::isfinite(t)) {
    throw ParameterError("time t must be nonnegative and finite");
  }
  EvolveResult result;
  result.steps = std::llround(t / model.epsilon);
  result.omega = Eigen::VectorXd::Zero(G);
  result.omega(x0) = 1.0;
  if (result.steps == 0) return result;

  const long direct_limit = std::min<long>(16384, 8 * static_cast<long>(G));
  if (result.steps <= direct_limit) {
    for (long step = 0; step < result.steps; ++step) {
      result.omega = (model.transition.transpose() * result.omega).eval();
      const double sum = result.omega.sum();
      result.mass_deviation =
          std::max(result.mass_deviation, std::abs(sum - 1.0));
      result.omega /= sum;
    }
    return result;
  }

  // Repeated squaring; each product is row-renormalized and its largest
  // pre-normalization mass defect recorded.
  Eigen::MatrixXd base = model.transition;
  unsigned long remaining = static_cast<unsigned long>(result.steps);
  while (remaining > 0) {
    if (remaining & 1UL) {
      result.omega = (base.transpose() * result.omega).eval();
      const double sum = result.omega.sum();
      result.mass_deviation =
          std::max(result.mass_deviation, std::abs(sum - 1.0));
      result.omega /= sum;
    }
    remaining >>= 1UL;
    if (remaining > 0) {
      base = (base * base).eval();
      Eigen::VectorXd sums = base.rowwise().sum();
      result.mass_deviation = std::max(
          result.mass_deviation, (sums.array() - 1.0).abs().maxCoeff());
      base.array().colwise() /= sums.array();
    }
  }
  return result;
}

Eigen::VectorXd squared_density_target(const QuadratureModel& model) {
  const Eigen::VectorXd squared = model.weights.cwiseAbs2();
  return squared / squared.sum();
}

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ParameterError("total variation requires equal-length vectors");
  }
  return 0.5 * (a - b).lpNorm<1>();
}

std::vector<Eigen::VectorXd> default_dictionary(
    const QuadratureModel& model, const ReferenceEigenfunctions& reference) {
  std::vector<Eigen::VectorXd> dictionary;
  const int eig_count =
      std::min<int>(20, static_cast<int>(reference.psi.cols()));
  for (int l = 0; l < eig_count; ++l) {
    dictionary.push_back(reference.psi.col(l));
  }
  const double mean = model.weights.dot(model.grid);
  const Eigen::ArrayXd centered = model.grid.array() - mean;
  const double sd =
      std::sqrt((centered.square() * model.weights.array()).sum());
  if (sd > 0.0) {
    const Eigen::ArrayXd u = centered / sd;
    dictionary.emplace_back(u.matrix());
    dictionary.emplace_back(u.square().matrix());
    dictionary.emplace_back(u.cube().matrix());
  }
  return dictionary;
}

double operator_loss(const Eigen::MatrixXd& ref_psi,
                     const Eigen::VectorXd& ref_scales,
                     const Eigen::MatrixXd& est_psi,
                     const Eigen::VectorXd& est_scales,
                     const Eigen::VectorXd& stationary,
                     const Eigen::VectorXd& weights,
                     const std::vector<Eigen::VectorXd>& dictionary) {
  if (dictionary.empty()) throw ParameterError("dictionary must be nonempty");
  const Eigen::Index G = weights.size();
  if (ref_psi.rows() != G || est_psi.rows() != G || stationary.size() != G) {
    throw ParameterError("grid function sizes disagree");
  }
  if (ref_scales.size() != ref_psi.cols() ||
      est_scales.size() != est_psi.cols()) {
    throw ParameterError("scale vectors must match eigenfunction counts");
  }
  const Eigen::VectorXd mu = stationary.cwiseProduct(weights);
  double worst = -1.0;
  for (const auto& f : dictionary) {
    if (f.size() != G) {
      throw ParameterError("dictionary function length does not match grid");
    }
    const double f_norm_sq = f.cwiseAbs2().dot(weights);
    if (f_norm_sq <= 0.0) continue;
    const Eigen::VectorXd ref_coeff =
        ref_scales.cwiseProduct(ref_psi.transpose() * mu.cwiseProduct(f));
    const Eigen::VectorXd est_coeff =
        est_scales.cwiseProduct(est_psi.transpose() * mu.cwiseProduct(f));
    const Eigen::VectorXd diff = ref_psi * ref_coeff - est_psi * est_coeff;
    const double loss = std::sqrt(diff.cwiseAbs2().dot(weights) / f_norm_sq);
    worst = std::max(worst, loss);
  }
  if (worst < 0.0) {
    throw ParameterError("dictionary contains only zero-norm functions");
  }
  return worst;
}

double estimate_loss(const PointCloud& cloud, const SpectralDecomposition& dec,
                     const QuadratureModel& model,
                     const ReferenceEigenfunctions& reference, double t, int q,
                     const std::vector<Eigen::VectorXd>& dictionary,
                     Warnings* warnings) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw ParameterError("time t must be nonnegative and finite");
  }
  if (q < 0 || q > dec.q) throw ParameterError("order q exceeds decomposition");
  const Eigen::Index G = model.grid.size();

  const ExtensionQuery query{Eigen::MatrixXd(model.grid)};
  Eigen::MatrixXd est_psi(G, q + 1);
  for (int l = 0; l <= q; ++l) {
    est_psi.col(l) = extend_eigenvector(cloud, dec, l, query);
  }
  const double exponent = t / dec.epsilon;
  Eigen::VectorXd est_scales(q + 1);
  bool clamped = false;
  for (int l = 0; l <= q; ++l) {
    est_scales(l) = spectral_power(dec.eigenvalues(l), exponent, &clamped);
  }
  if (clamped) {
    warn(warnings,
         "negative eigenvalues clamped to 0 for non-integer exponent t/eps = " +
             std::to_string(exponent));
  }
  const Eigen::VectorXd ref_scales = (-reference.nu_sq.array() * t).exp();
  return operator_loss(reference.psi, ref_scales, est_psi, est_scales,
                       model.stationary, model.weights, dictionary);
}

double estimate_loss(const PointCloud& cloud, const SpectralDecomposition& dec,
                     const QuadratureModel& model, double t, int q,
                     const std::vector<Eigen::VectorXd>& dictionary,
                     int reference_order, Warnings* warnings) {
  const int order =
      std::min<int>(reference_order, static_cast<int>(model.grid.size()) - 1);
  const ReferenceEigenfunctions reference =
      reference_eigenfunctions(model, order, EigenMethod::automatic, warnings);
  return estimate_loss(cloud, dec, model, reference, t, q, dictionary,
                       warnings);
}

}  // namespace sca
