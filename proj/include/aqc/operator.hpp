#pragma once

// Matrix-free Hermitian operators.
//
// An Operator is an immutable, cheaply copyable handle holding
//   shift * 1 + diag(d) + sum_q c_q sigma^x_q
//   + sum_{a<b} c_ab (sigma^+_a sigma^-_b + sigma^-_a sigma^+_b)
//   + sum_r c_r |r><r| + sum_p w_p Op_p
// over one Space. Nothing is ever densified; apply costs O(dim * terms).

#include <algorithm>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqc/state.hpp"

namespace aqc {

/// coef * sigma^x on one qubit.
struct FlipTerm {
  int qubit;
  double coef;
};

/// coef * (|..0_a..1_b..><..1_a..0_b..| + h.c.): moves a single 1 between two
/// qubits. Equals (coef/2)(sigma^x_a sigma^x_b + sigma^y_a sigma^y_b).
struct ExchangeTerm {
  int qubit_a;
  int qubit_b;
  double coef;
};

/// coef * |ref><ref|
struct ProjectorTerm {
  double coef;
  StateVector ref;
};

struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;

  double scale() const { return std::max(std::abs(lo), std::abs(hi)); }
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

class Operator;

struct WeightedOperator;

namespace detail {
struct OperatorData;
}

class Operator {
 public:
  const Space& space() const;
  double shift() const;
  std::span<const double> diagonal() const;
  std::span<const FlipTerm> flips() const;
  std::span<const ExchangeTerm> exchanges() const;
  std::span<const ProjectorTerm> projectors() const;
  std::span<const WeightedOperator> parts() const;

  /// Guaranteed enclosure of the spectrum (Weyl sum of per-term ranges).
  SpectralBounds bounds() const;

  /// out += scale * H psi. Each output entry is accumulated independently, in
  /// a fixed term order.
  void apply_add(const StateVector& psi, std::span<cplx> out, double scale = 1.0) const;

  StateVector apply(const StateVector& psi) const {
    require_same_space(space(), psi.space(), "apply");
    StateVector out(space());
    apply_add(psi, out.amplitudes(), 1.0);
    return out;
  }

  /// <i|H|i> for every basis element i.
  std::vector<double> diagonal_values() const;

  bool same_handle(const Operator& o) const { return data_ == o.data_; }

 private:
  friend class OperatorBuilder;
  explicit Operator(std::shared_ptr<const detail::OperatorData> d) : data_(std::move(d)) {}
  std::shared_ptr<const detail::OperatorData> data_;
};

struct WeightedOperator {
  double weight;
  Operator op;
};

namespace detail {

struct OperatorData {
  Space space;
  double shift = 0.0;
  std::vector<double> diag;
  std::vector<FlipTerm> flips;
  std::vector<ExchangeTerm> exchanges;
  std::vector<ProjectorTerm> projectors;
  std::vector<WeightedOperator> parts;
  SpectralBounds bounds;
};

template <class IndexFn>
void apply_local_terms(const OperatorData& d, std::span<const cplx> psi, std::span<cplx> out,
                       double scale, IndexFn&& index_of) {
  const Space& sp = d.space;
  const std::size_t dim = sp.dim();
  const bool has_diag = !d.diag.empty();
  for (std::size_t i = 0; i < dim; ++i) {
    const basis_t x = sp.state(i);
    cplx acc = d.shift * psi[i];
    if (has_diag) acc += d.diag[i] * psi[i];
    for (const FlipTerm& f : d.flips) acc += f.coef * psi[index_of(x ^ qubit_mask(f.qubit))];
    for (const ExchangeTerm& e : d.exchanges) {
      const basis_t pair = qubit_mask(e.qubit_a) | qubit_mask(e.qubit_b);
      const basis_t bits = x & pair;
      if (bits != 0 && bits != pair) acc += e.coef * psi[index_of(x ^ pair)];
    }
    out[i] += scale * acc;
  }
}

}  // namespace detail

inline const Space& Operator::space() const { return data_->space; }
inline double Operator::shift() const { return data_->shift; }
inline std::span<const double> Operator::diagonal() const { return data_->diag; }
inline std::span<const FlipTerm> Operator::flips() const { return data_->flips; }
inline std::span<const ExchangeTerm> Operator::exchanges() const { return data_->exchanges; }
inline std::span<const ProjectorTerm> Operator::projectors() const { return data_->projectors; }
inline std::span<const WeightedOperator> Operator::parts() const { return data_->parts; }
inline SpectralBounds Operator::bounds() const { return data_->bounds; }

inline void Operator::apply_add(const StateVector& psi, std::span<cplx> out, double scale) const {
  const detail::OperatorData& d = *data_;
  require_same_space(d.space, psi.space(), "apply");
  if (out.size() != d.space.dim())
    throw SpaceMismatch("apply: output buffer has " + std::to_string(out.size()) +
                        " entries, expected " + std::to_string(d.space.dim()));
  std::span<const cplx> in = psi.amplitudes();
  switch (d.space.kind()) {
    case SpaceKind::full:
      detail::apply_local_terms(d, in, out, scale,
                                [](basis_t y) { return static_cast<std::size_t>(y); });
      break;
    case SpaceKind::sector: {
      const SectorBasis& b = *d.space.basis();
      detail::apply_local_terms(d, in, out, scale, [&b](basis_t y) { return b.rank(y); });
      break;
    }
    case SpaceKind::flip_even: {
      const Space& sp = d.space;
      detail::apply_local_terms(d, in, out, scale, [&sp](basis_t y) {
        return static_cast<std::size_t>(sp.representative(y));
      });
      break;
    }
  }
  for (const ProjectorTerm& p : d.projectors) {
    const cplx c = scale * p.coef * inner(p.ref, psi);
    std::span<const cplx> r = p.ref.amplitudes();
    for (std::size_t i = 0; i < r.size(); ++i) out[i] += c * r[i];
  }
  for (const WeightedOperator& part : d.parts) part.op.apply_add(psi, out, scale * part.weight);
}

inline std::vector<double> Operator::diagonal_values() const {
  const detail::OperatorData& d = *data_;
  const Space& sp = d.space;
  std::vector<double> out(sp.dim(), d.shift);
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    if (!d.diag.empty()) out[i] += d.diag[i];
    const basis_t x = sp.state(i);
    // off-diagonal moves can only land on the same element in the flip-even
    // space, where x and ~x are identified
    for (const FlipTerm& f : d.flips)
      if (sp.index(x ^ qubit_mask(f.qubit)) == i) out[i] += f.coef;
    for (const ExchangeTerm& e : d.exchanges) {
      const basis_t pair = qubit_mask(e.qubit_a) | qubit_mask(e.qubit_b);
      const basis_t bits = x & pair;
      if (bits != 0 && bits != pair && sp.index(x ^ pair) == i) out[i] += e.coef;
    }
  }
  for (const ProjectorTerm& p : d.projectors)
    for (std::size_t i = 0; i < sp.dim(); ++i) out[i] += p.coef * std::norm(p.ref[i]);
  for (const WeightedOperator& part : d.parts) {
    std::vector<double> sub = part.op.diagonal_values();
    for (std::size_t i = 0; i < sp.dim(); ++i) out[i] += part.weight * sub[i];
  }
  return out;
}

class OperatorBuilder {
 public:
  explicit OperatorBuilder(Space space) { d_.space = std::move(space); }

  OperatorBuilder& add_constant(double c) {
    d_.shift += c;
    return *this;
  }

  OperatorBuilder& set_diagonal(std::vector<double> diag) {
    if (diag.size() != d_.space.dim())
      throw ValidationError("diagonal has " + std::to_string(diag.size()) +
                            " entries, expected " + std::to_string(d_.space.dim()));
    d_.diag = std::move(diag);
    return *this;
  }

  OperatorBuilder& add_flip(int qubit, double coef) {
    check_qubit(qubit);
    if (d_.space.kind() == SpaceKind::sector)
      throw ValidationError("sigma^x on qubit " + std::to_string(qubit) +
                            " does not preserve the Hamming-weight sector " +
                            d_.space.describe());
    d_.flips.push_back({qubit, coef});
    return *this;
  }

  OperatorBuilder& add_exchange(int qubit_a, int qubit_b, double coef) {
    check_qubit(qubit_a);
    check_qubit(qubit_b);
    if (qubit_a == qubit_b)
      throw ValidationError("exchange term needs two distinct qubits, got " +
                            std::to_string(qubit_a) + " twice");
    if (qubit_a > qubit_b) std::swap(qubit_a, qubit_b);
    d_.exchanges.push_back({qubit_a, qubit_b, coef});
    return *this;
  }

  OperatorBuilder& add_projector(double coef, StateVector ref) {
    require_same_space(d_.space, ref.space(), "projector term");
    d_.projectors.push_back({coef, std::move(ref)});
    return *this;
  }

  OperatorBuilder& add_part(double weight, Operator op) {
    require_same_space(d_.space, op.space(), "operator part");
    d_.parts.push_back({weight, std::move(op)});
    return *this;
  }

  Operator build() const {
    auto d = std::make_shared<detail::OperatorData>(d_);
    d->bounds = compute_bounds(*d);
    return Operator(std::move(d));
  }

 private:
  void check_qubit(int q) const {
    if (q < 1 || q > d_.space.n())
      throw ValidationError("qubit index " + std::to_string(q) + " outside [1, " +
                            std::to_string(d_.space.n()) + "]");
  }

  static SpectralBounds compute_bounds(const detail::OperatorData& d) {
    SpectralBounds b{d.shift, d.shift};
    if (!d.diag.empty()) {
      auto [lo, hi] = std::minmax_element(d.diag.begin(), d.diag.end());
      b.lo += *lo;
      b.hi += *hi;
    }
    for (const FlipTerm& f : d.flips) {
      b.lo -= std::abs(f.coef);
      b.hi += std::abs(f.coef);
    }
    for (const ExchangeTerm& e : d.exchanges) {
      b.lo -= std::abs(e.coef);
      b.hi += std::abs(e.coef);
    }
    for (const ProjectorTerm& p : d.projectors) {
      double v = p.coef * p.ref.squared_norm();
      b.lo += std::min(0.0, v);
      b.hi += std::max(0.0, v);
    }
    for (const WeightedOperator& part : d.parts) {
      SpectralBounds c = part.op.bounds();
      double a = part.weight * c.lo;
      double z = part.weight * c.hi;
      b.lo += std::min(a, z);
      b.hi += std::max(a, z);
    }
    return b;
  }

  detail::OperatorData d_{Space::full(1)};
};

/// Lazy weighted sum; the parts are applied, never merged.
inline Operator linear_combination(const Space& space, std::span<const WeightedOperator> parts) {
  OperatorBuilder b(space);
  for (const WeightedOperator& p : parts) b.add_part(p.weight, p.op);
  return b.build();
}

}  // namespace aqc
