#include "sca/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "sca/rng.hpp"

namespace sca {

namespace {

constexpr Eigen::Index kDenseCutoff = 2000;
constexpr double kDegenerateGap = 1e-10;
constexpr double kResidualBound = 1e-8;

TopEigenpairs dense_top_k(const Eigen::MatrixXd& sym, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("dense symmetric eigensolver failed to converge");
  }
  const Eigen::Index n = sym.rows();
  TopEigenpairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  // Solver returns ascending order; take the top k reversed.
  for (int i = 0; i < k; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

// Lanczos with full reorthogonalization. Deterministic start vector; on
// breakdown (invariant subspace found) the basis is continued with a fresh
// orthogonalized vector, leaving a zero off-diagonal in T. The basis grows
// until the top-k Ritz residual bounds pass, up to the full dimension n,
// where exhaustion of the space makes the pairs exact; nearly-degenerate
// top clusters (spectral gaps ~1e-5) genuinely need a large fraction of n.
TopEigenpairs lanczos_top_k(const Eigen::MatrixXd& sym, int k) {
  const Eigen::Index n = sym.rows();

  Eigen::MatrixXd Q(n, n);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);  // beta(j) links j, j+1

  Rng rng(0x5ca1ab1edecafULL);
  auto fresh_vector = [&](Eigen::Index used) -> Eigen::VectorXd {
    // Draw until a direction survives orthogonalization against Q[:, :used].
    for (int attempt = 0; attempt < 64; ++attempt) {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) {
          v -= Q.leftCols(used) * (Q.leftCols(used).transpose() * v);
        }
      }
      const double nrm = v.norm();
      if (nrm > 1e-10) return v / nrm;
    }
    return Eigen::VectorXd();
  };

  Q.col(0) = fresh_vector(0);
  Eigen::Index basis = 0;  // index of the last filled column

  // Ritz residual bounds |beta_j u(j)| <= 1e-13 * scale for the top k pairs,
  // via the tridiagonal fast path. Checks are scheduled geometrically: each
  // one costs O(j^3) in the accumulation of eigenvectors, so a 1.5x spacing
  // keeps the total bounded by a small multiple of the final check.
  auto converged = [&](Eigen::Index j) -> bool {
    if (j + 1 < k) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolve;
    tsolve.computeFromTridiagonal(alpha.head(j + 1), beta.head(j));
    if (tsolve.info() != Eigen::Success) return false;
    const double scale =
        std::max(1.0, tsolve.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < k; ++i) {
      const Eigen::Index col = j - i;  // top Ritz values sit at the high end
      const double bound = std::abs(beta(j) * tsolve.eigenvectors()(j, col));
      if (bound > 1e-13 * scale) return false;
    }
    return true;
  };

  Eigen::Index next_check = std::max<Eigen::Index>(2L * k + 16, 48);
  for (Eigen::Index j = 0; j < n; ++j) {
    basis = j;
    Eigen::VectorXd w = sym * Q.col(j);
    alpha(j) = Q.col(j).dot(w);
    w -= alpha(j) * Q.col(j);
    if (j > 0) w -= beta(j - 1) * Q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    }
    const double nrm = w.norm();
    if (j + 1 == n) break;
    if (nrm < 1e-13) {
      beta(j) = 0.0;
      Eigen::VectorXd v = fresh_vector(j + 1);
      if (v.size() == 0) break;  // full invariant subspace of R^n reached
      Q.col(j + 1) = v;
    } else {
      beta(j) = nrm;
      Q.col(j + 1) = w / nrm;
      if (j >= next_check) {
        if (converged(j)) break;
        next_check = j + std::max<Eigen::Index>(j / 2, 8);
      }
    }
  }

  const Eigen::Index m = basis + 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolve;
  tsolve.computeFromTridiagonal(alpha.head(m), beta.head(m - 1));
  if (tsolve.info() != Eigen::Success) {
    throw NumericError("Lanczos tridiagonal eigensolver failed");
  }

  TopEigenpairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  double scale = std::max(1.0, tsolve.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < k; ++i) {
    const Eigen::Index col = m - 1 - i;
    out.values(i) = tsolve.eigenvalues()(col);
    out.vectors.col(i) = Q.leftCols(m) * tsolve.eigenvectors().col(col);
    out.vectors.col(i).normalize();
    const double residual =
        (sym * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
    if (residual > 1e-9 * scale) {
      throw NumericError("Lanczos pair " + std::to_string(i) +
                         " residual " + std::to_string(residual) +
                         " failed verification");
    }
  }
  return out;
}

}  // namespace

TopEigenpairs top_eigenpairs(const Eigen::MatrixXd& sym, int k,
                             EigenMethod method) {
  const Eigen::Index n = sym.rows();
  if (k < 1 || k > n) {
    throw ParameterError("requested eigenpair count out of range");
  }
  switch (method) {
    case EigenMethod::dense:
      return dense_top_k(sym, k);
    case EigenMethod::lanczos:
      return lanczos_top_k(sym, k);
    case EigenMethod::automatic:
    default:
      // Lanczos needs headroom over k to pay off; fall back to dense when
      // k is a large fraction of n.
      if (n <= kDenseCutoff || 4L * k >= n) return dense_top_k(sym, k);
      return lanczos_top_k(sym, k);
  }
}

SpectralDecomposition decompose(const MarkovChain& model, int q,
                                EigenMethod method, Warnings* warnings) {
  const Eigen::Index n = model.transition.rows();
  if (q < 0 || static_cast<Eigen::Index>(q) + 1 > n) {
    throw ParameterError("truncation order q requires 1 <= q+1 <= n");
  }

  // One extra pair (when available) to detect a truncation boundary that
  // cuts through a near-degenerate cluster.
  const int want = static_cast<int>(
      std::min<Eigen::Index>(n, static_cast<Eigen::Index>(q) + 2));
  TopEigenpairs pairs = top_eigenpairs(model.symmetric, want, method);

  SpectralDecomposition dec;
  dec.epsilon = model.epsilon;
  dec.q = q;
  dec.stationary = model.stationary;
  dec.kind = model.kind;
  dec.truncation_factor = model.truncation_factor;
  dec.eigenvalues = pairs.values.head(q + 1);
  if (std::abs(dec.eigenvalues(0) - 1.0) > 1e-10) {
    throw NumericError("leading eigenvalue deviates from 1 by " +
                       std::to_string(std::abs(dec.eigenvalues(0) - 1.0)));
  }
  if (dec.eigenvalues.cwiseAbs().maxCoeff() > 1.0 + 1e-10) {
    throw NumericError("eigenvalue magnitude exceeds 1 beyond tolerance");
  }

  Eigen::VectorXd sqrt_s = model.stationary.cwiseSqrt();
  dec.psi.resize(n, q + 1);
  dec.phi.resize(n, q + 1);
  for (int l = 0; l <= q; ++l) {
    Eigen::VectorXd psi = pairs.vectors.col(l).cwiseQuotient(sqrt_s);
    // v orthonormal makes sum psi^2 s = 1 already; renormalize to pin it.
    const double nrm = std::sqrt(psi.cwiseAbs2().dot(model.stationary));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw NumericError("degenerate eigenvector normalization");
    }
    psi /= nrm;

    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(psi(i));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (psi(best) < 0.0) psi = -psi;

    dec.psi.col(l) = psi;
    dec.phi.col(l) = model.stationary.cwiseProduct(psi);
  }

  dec.nu_sq = (1.0 - dec.eigenvalues.array()) / model.epsilon;

  // Residual check against the nonsymmetric operator itself.
  Eigen::MatrixXd resid = model.transition * dec.psi -
                          dec.psi * dec.eigenvalues.asDiagonal();
  dec.max_residual = 0.0;
  for (int l = 0; l <= q; ++l) {
    const double r = resid.col(l).norm() / dec.psi.col(l).norm();
    dec.max_residual = std::max(dec.max_residual, r);
  }
  if (dec.max_residual > kResidualBound) {
    throw NumericError("eigen residual " + std::to_string(dec.max_residual) +
                       " exceeds bound " + std::to_string(kResidualBound));
  }

  for (int l = 0; l < want - 1; ++l) {
    const double gap = pairs.values(l) - pairs.values(l + 1);
    if (gap < kDegenerateGap) {
      dec.degenerate_pairs.push_back(l);
      if (warnings != nullptr) {
        if (l == q) {
          warn(warnings,
               "truncation order q=" + std::to_string(q) +
                   " splits a near-degenerate eigenvalue cluster");
        } else {
          warn(warnings, "eigenvalues " + std::to_string(l) + " and " +
                             std::to_string(l + 1) +
                             " are degenerate within 1e-10; their "
                             "eigenvectors are not individually identifiable");
        }
      }
    }
  }

  return dec;
}

BiorthogonalityReport biorthogonality_check(const SpectralDecomposition& dec) {
  const Eigen::MatrixXd gram = dec.phi.transpose() * dec.psi;
  BiorthogonalityReport report;
  for (Eigen::Index r = 0; r < gram.rows(); ++r) {
    for (Eigen::Index c = 0; c < gram.cols(); ++c) {
      if (r == c) {
        report.max_diagonal_deviation =
            std::max(report.max_diagonal_deviation, std::abs(gram(r, c) - 1.0));
      } else {
        report.max_off_diagonal =
            std::max(report.max_off_diagonal, std::abs(gram(r, c)));
      }
    }
  }
  return report;
}

}  // namespace sca
