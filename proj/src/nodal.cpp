#include "sca/nodal.hpp"

#include <cmath>

#include "sca/errors.hpp"

namespace sca {

NodalMap nodal_map(const SpectralDecomposition& dec, int ell) {
  if (ell < 0 || ell > dec.q) {
    throw ParameterError("eigenvector index out of range");
  }
  NodalMap map;
  map.ell = ell;
  map.epsilon = dec.epsilon;
  const Eigen::Index n = dec.psi.rows();
  map.signs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = dec.psi(i, ell);
    map.signs(i) = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  }
  return map;
}

double nodal_error(const NodalMap& estimate, const NodalMap& reference) {
  const Eigen::Index n = estimate.signs.size();
  if (n != reference.signs.size()) {
    throw ParameterError("nodal maps have different lengths");
  }
  if (n == 0) throw ParameterError("nodal maps are empty");
  long disagree = 0;
  long disagree_flipped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int e = estimate.signs(i);
    const int r = reference.signs(i);
    if (e != r) ++disagree;
    if (-e != r) ++disagree_flipped;
  }
  return static_cast<double>(std::min(disagree, disagree_flipped)) /
         static_cast<double>(n);
}

std::vector<double> noise_exponent_curve(const Eigen::VectorXd& psi1,
                                         const Eigen::VectorXd& weights,
                                         const std::vector<double>& deltas) {
  if (psi1.size() != weights.size() || psi1.size() == 0) {
    throw ParameterError("grid values and weights must match and be nonempty");
  }
  if ((weights.array() < 0.0).any()) {
    throw ParameterError("quadrature weights must be nonnegative");
  }
  std::vector<double> masses;
  masses.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta >= 0.0)) throw ParameterError("delta must be nonnegative");
    double mass = 0.0;
    for (Eigen::Index i = 0; i < psi1.size(); ++i) {
      const double a = std::abs(psi1(i));
      if (a > 0.0 && a <= delta) mass += weights(i);
    }
    masses.push_back(mass);
  }
  return masses;
}

std::optional<double> fit_noise_exponent(const std::vector<double>& deltas,
                                         const std::vector<double>& masses,
                                         double fit_min, double fit_max) {
  if (deltas.size() != masses.size()) {
    throw ParameterError("delta and mass vectors must have equal length");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long count = 0;
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < fit_min || deltas[i] > fit_max) continue;
    if (!(masses[i] > 0.0) || !(deltas[i] > 0.0)) continue;
    const double x = std::log(deltas[i]);
    const double y = std::log(masses[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace sca
