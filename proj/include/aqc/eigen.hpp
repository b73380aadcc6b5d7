#pragma once

// Lowest eigenpairs of Hermitian operators: Lanczos with full
// re-orthogonalization and explicit deflation of converged vectors, plus a
// dense path through Eigen for small dimensions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aqc/operator.hpp"
#include "aqc/rng.hpp"

namespace aqc {

struct EigenOptions {
  enum class Method { automatic, lanczos, dense };
  Method method = Method::automatic;
  /// Residual bound ||Hv - Ev|| <= tolerance * scale, scale = spectral bound.
  double tolerance = 1e-10;
  int max_krylov = 200;
  int max_restarts = 60;
  std::uint64_t seed = 0x2545f4914f6cdd1dULL;
  /// automatic: dense when dim <= dense_limit.
  std::size_t dense_limit = 64;
};

struct EigenResult {
  std::vector<double> values;
  std::vector<StateVector> vectors;
  std::vector<double> residuals;
};

inline constexpr std::size_t max_dense_dim = 4096;

/// Rotates v so its first component above 1e-10 * max|v_i| is real positive.
inline void fix_phase(StateVector& v) {
  double big = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) big = std::max(big, std::abs(v[i]));
  if (big == 0.0) return;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (std::abs(v[i]) > 1e-10 * big) {
      v.scale(std::conj(v[i]) / std::abs(v[i]));
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

namespace detail {

inline void axpy(cplx a, const StateVector& x, StateVector& y) {
  for (std::size_t i = 0; i < y.dim(); ++i) y[i] += a * x[i];
}

/// Removes the components along `basis` (assumed orthonormal), twice.
inline void orthogonalize(StateVector& w, const std::vector<StateVector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const StateVector& u : basis) axpy(-inner(u, w), u, w);
}

inline double residual_norm(const Operator& h, const StateVector& v, double value) {
  StateVector hv = h.apply(v);
  axpy(-value, v, hv);
  return hv.norm();
}

struct RitzPair {
  double value;
  StateVector vector;
  double residual;
  bool converged;
};

/// Lowest eigenpair of P H P, P the projector off `locked`.
inline RitzPair lanczos_lowest(const Operator& h, const std::vector<StateVector>& locked,
                               StateVector start, double tol, int max_krylov, int max_restarts,
                               Rng& rng) {
  const std::size_t dim = h.space().dim();
  const std::size_t room = dim - locked.size();
  const int krylov_cap = static_cast<int>(std::min<std::size_t>(room, static_cast<std::size_t>(max_krylov)));
  RitzPair best{0.0, start, 0.0, false};

  for (int restart = 0; restart <= max_restarts; ++restart) {
    orthogonalize(start, locked);
    double nrm = start.norm();
    if (nrm < 1e-8) {
      // start vector lies in the locked space; draw a fresh one
      for (std::size_t i = 0; i < dim; ++i) start[i] = cplx{standard_normal(rng), standard_normal(rng)};
      orthogonalize(start, locked);
      nrm = start.norm();
    }
    start.scale(1.0 / nrm);

    std::vector<StateVector> v{start};
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd ritz_coeffs;
    double theta = 0.0;
    bool done = false;

    for (int j = 0; j < krylov_cap; ++j) {
      StateVector w = h.apply(v[j]);
      const double a = inner(v[j], w).real();
      alpha.push_back(a);
      axpy(-a, v[j], w);
      if (j > 0) axpy(-beta[j - 1], v[j - 1], w);
      orthogonalize(w, v);
      orthogonalize(w, locked);
      const double b = w.norm();
      beta.push_back(b);

      const int m = j + 1;
      Eigen::VectorXd diag(m);
      Eigen::VectorXd off(std::max(m - 1, 1));
      for (int i = 0; i < m; ++i) diag(i) = alpha[i];
      for (int i = 0; i + 1 < m; ++i) off(i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      if (m == 1) {
        theta = alpha[0];
        ritz_coeffs = Eigen::VectorXd::Ones(1);
      } else {
        tri.computeFromTridiagonal(diag, off.head(m - 1), Eigen::ComputeEigenvectors);
        theta = tri.eigenvalues()(0);
        ritz_coeffs = tri.eigenvectors().col(0);
      }
      const double estimate = b * std::abs(ritz_coeffs(m - 1));
      const bool breakdown = b <= 1e-13 * std::max(1.0, std::abs(theta));
      if (estimate <= 0.1 * tol || breakdown || m == krylov_cap) {
        done = estimate <= 0.1 * tol || breakdown;
        break;
      }
      StateVector next = w;
      next.scale(1.0 / b);
      v.push_back(std::move(next));
    }

    StateVector x(h.space());
    for (int i = 0; i < ritz_coeffs.size(); ++i) axpy(ritz_coeffs(i), v[i], x);
    orthogonalize(x, locked);
    x.scale(1.0 / x.norm());
    const double value = inner(x, h.apply(x)).real();
    const double res = residual_norm(h, x, value);
    best = RitzPair{value, x, res, res <= tol};
    if (best.converged) return best;
    // explicit restart from the current Ritz vector
    (void)done;
    start = std::move(x);
  }
  return best;
}

}  // namespace detail

/// r lowest eigenpairs from the dense matrix (dim <= 4096). The matrix is
/// assembled column by column from apply.
inline EigenResult dense_lowest_eigs(const Operator& h, int r) {
  const std::size_t dim = h.space().dim();
  if (dim > max_dense_dim)
    throw Error("dense eigensolver: dimension " + std::to_string(dim) + " exceeds " +
                std::to_string(max_dense_dim));
  if (r < 1 || static_cast<std::size_t>(r) > dim)
    throw ValidationError("dense eigensolver: r=" + std::to_string(r) + " outside [1, " +
                          std::to_string(dim) + "]");
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    StateVector col = h.apply(StateVector::basis_element(h.space(), c));
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = col[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  EigenResult out;
  for (int k = 0; k < r; ++k) {
    StateVector v(h.space());
    for (std::size_t i = 0; i < dim; ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), k);
    fix_phase(v);
    const double value = es.eigenvalues()(k);
    out.residuals.push_back(detail::residual_norm(h, v, value));
    out.values.push_back(value);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

/// r lowest eigenpairs with residual <= tolerance * scale each.
inline EigenResult lowest_eigs(const Operator& h, int r, const EigenOptions& opt = {}) {
  const std::size_t dim = h.space().dim();
  if (r < 1 || static_cast<std::size_t>(r) > dim)
    throw ValidationError("lowest_eigs: r=" + std::to_string(r) + " outside [1, " +
                          std::to_string(dim) + "]");
  const bool dense = opt.method == EigenOptions::Method::dense ||
                     (opt.method == EigenOptions::Method::automatic && dim <= opt.dense_limit);
  if (dense) return dense_lowest_eigs(h, r);

  const double scale = std::max(1.0, h.bounds().scale());
  const double tol = opt.tolerance * scale;
  Rng rng(opt.seed);
  std::vector<StateVector> locked;
  EigenResult out;
  for (int k = 0; k < r; ++k) {
    StateVector start(h.space());
    for (std::size_t i = 0; i < dim; ++i) start[i] = cplx{standard_normal(rng), standard_normal(rng)};
    detail::RitzPair p = detail::lanczos_lowest(h, locked, std::move(start), tol, opt.max_krylov,
                                                opt.max_restarts, rng);
    if (!p.converged)
      throw Error("lanczos: eigenpair " + std::to_string(k) + " not converged, residual " +
                  std::to_string(p.residual) + " > " + std::to_string(tol));
    locked.push_back(p.vector);
    out.values.push_back(p.value);
    out.residuals.push_back(p.residual);
    out.vectors.push_back(std::move(p.vector));
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
  EigenResult sorted;
  for (std::size_t i : order) {
    sorted.values.push_back(out.values[i]);
    sorted.residuals.push_back(out.residuals[i]);
    StateVector v = std::move(out.vectors[i]);
    fix_phase(v);
    sorted.vectors.push_back(std::move(v));
  }
  return sorted;
}

}  // namespace aqc
