#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqc/basis.hpp"

namespace aqc {

using cplx = std::complex<double>;

/// Amplitudes over the basis of a Space. Not automatically normalized.
class StateVector {
 public:
  explicit StateVector(Space space) : space_(std::move(space)), amp_(space_.dim(), cplx{}) {}

  StateVector(Space space, std::vector<cplx> amplitudes)
      : space_(std::move(space)), amp_(std::move(amplitudes)) {
    if (amp_.size() != space_.dim())
      throw ValidationError("state vector: " + std::to_string(amp_.size()) +
                            " amplitudes for " + space_.describe() + " of dimension " +
                            std::to_string(space_.dim()));
  }

  static StateVector basis_element(Space space, std::size_t i) {
    StateVector v(std::move(space));
    v.amp_.at(i) = 1.0;
    return v;
  }

  /// Basis state |x> given as a full-space index.
  static StateVector basis_state(Space space, basis_t x) {
    if (space.kind() == SpaceKind::flip_even)
      throw ValidationError("basis state |x> is not flip-even; use the symmetric combination");
    auto i = space.index(x);
    if (!i)
      throw ValidationError("basis state " + std::to_string(x) + " is not contained in " +
                            space.describe());
    return basis_element(std::move(space), *i);
  }

  const Space& space() const { return space_; }
  std::size_t dim() const { return amp_.size(); }

  std::span<const cplx> amplitudes() const { return amp_; }
  std::span<cplx> amplitudes() { return amp_; }

  cplx operator[](std::size_t i) const { return amp_[i]; }
  cplx& operator[](std::size_t i) { return amp_[i]; }

  double squared_norm() const {
    double s = 0.0;
    for (const cplx& a : amp_) s += std::norm(a);
    return s;
  }

  double norm() const { return std::sqrt(squared_norm()); }

  void scale(cplx c) {
    for (cplx& a : amp_) a *= c;
  }

  /// Returns the copy scaled to unit norm; throws on the zero vector.
  StateVector normalized() const {
    double nrm = norm();
    if (nrm == 0.0) throw ValidationError("cannot normalize the zero vector");
    StateVector v = *this;
    v.scale(1.0 / nrm);
    return v;
  }

  /// Probability weight on full-space basis state |x>.
  double probability(basis_t x) const {
    auto i = space_.index(x);
    if (!i) return 0.0;
    double p = std::norm(amp_[*i]);
    return space_.kind() == SpaceKind::flip_even ? 0.5 * p : p;
  }

  /// The same vector expressed in the full 2^n space.
  StateVector embed() const {
    if (space_.kind() == SpaceKind::full) return *this;
    StateVector out(Space::full(space_.n()));
    if (space_.kind() == SpaceKind::sector) {
      for (std::size_t i = 0; i < amp_.size(); ++i) out.amp_[space_.state(i)] = amp_[i];
    } else {
      const double r = std::numbers::sqrt2 / 2.0;
      const basis_t mask = all_ones(space_.n());
      for (std::size_t i = 0; i < amp_.size(); ++i) {
        basis_t x = space_.state(i);
        out.amp_[x] += r * amp_[i];
        out.amp_[~x & mask] += r * amp_[i];
      }
    }
    return out;
  }

 private:
  Space space_;
  std::vector<cplx> amp_;
};

/// <a|b>, conjugate-linear in a.
inline cplx inner(const StateVector& a, const StateVector& b) {
  require_same_space(a.space(), b.space(), "inner");
  cplx s{};
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double max_abs_difference(const StateVector& a, const StateVector& b) {
  require_same_space(a.space(), b.space(), "max_abs_difference");
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// |s> = sum_x |x> / sqrt(2^n).
inline StateVector uniform_state(int n) {
  Space space = Space::full(n);
  const double a = std::pow(2.0, -0.5 * n);
  return StateVector(space, std::vector<cplx>(space.dim(), cplx{a, 0.0}));
}

inline StateVector basis_state(int n, basis_t x) {
  if (n < 1 || n > max_full_qubits || x > all_ones(n))
    throw ValidationError("basis state " + std::to_string(x) + " out of range for n=" +
                          std::to_string(n));
  return StateVector::basis_element(Space::full(n), static_cast<std::size_t>(x));
}

/// <psi| Sigma^z |psi> for any space.
inline double total_z_expectation(const StateVector& psi) {
  const Space& sp = psi.space();
  double s = 0.0;
  for (std::size_t i = 0; i < psi.dim(); ++i)
    s += std::norm(psi[i]) * total_z(sp.state(i), sp.n());
  // Sigma^z flips sign under x <-> ~x, so flip-even states have zero mean
  return sp.kind() == SpaceKind::flip_even ? 0.0 : s;
}

}  // namespace aqc
