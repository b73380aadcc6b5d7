#pragma once

// Symmetry sectors: fixed Hamming weight (Sigma^z eigenspaces) and the even
// subspace of the global spin flip.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "aqc/hamiltonians.hpp"
#include "aqc/operator.hpp"

namespace aqc {

inline std::shared_ptr<const SectorBasis> build_sector(int n, int k,
                                                       std::size_t max_dim = default_max_sector_dim) {
  return std::make_shared<const SectorBasis>(n, k, max_dim);
}

/// Target Sigma^z eigenvalue delta = n - 2k.
struct SectorChoice {
  int n = 0;
  int delta = 0;
  int k = 0;

  static SectorChoice from_k(int n, int k) {
    if (k < 0 || k > n)
      throw ValidationError("sector: k=" + std::to_string(k) + " outside [0, " +
                            std::to_string(n) + "]");
    return {n, n - 2 * k, k};
  }

  static SectorChoice from_delta(int n, int delta) {
    if ((n - delta) % 2 != 0)
      throw ValidationError("sector: n - delta must be even (n=" + std::to_string(n) +
                            ", delta=" + std::to_string(delta) + ")");
    return from_k(n, (n - delta) / 2);
  }

  bool operator==(const SectorChoice&) const = default;
};

/// The solution's own sector. Requires a known solution.
inline SectorChoice choose_delta(const Ec3Instance& inst) {
  if (!inst.solution)
    throw ValidationError("choose_delta: instance " + inst.id() +
                          " has no known solution; use delta_candidates for a scan");
  return SectorChoice::from_k(inst.n, hamming_weight(*inst.solution));
}

/// Every sector ordered by |k - n/3|, nearest first (ties to the smaller k).
inline std::vector<SectorChoice> delta_candidates(int n) {
  std::vector<SectorChoice> out;
  for (int k = 0; k <= n; ++k) out.push_back(SectorChoice::from_k(n, k));
  std::stable_sort(out.begin(), out.end(), [n](const SectorChoice& a, const SectorChoice& b) {
    return std::abs(3 * a.k - n) < std::abs(3 * b.k - n);
  });
  return out;
}

/// Normalized projection of |s> onto a Hamming-weight sector: uniform
/// amplitude C(n,k)^(-1/2).
inline StateVector project_uniform(const Space& sector) {
  if (sector.kind() != SpaceKind::sector)
    throw ValidationError("project_uniform needs a sector space, got " + sector.describe());
  const double a = 1.0 / std::sqrt(static_cast<double>(sector.dim()));
  return StateVector(sector, std::vector<cplx>(sector.dim(), cplx{a, 0.0}));
}

inline StateVector project_uniform(std::shared_ptr<const SectorBasis> basis) {
  return project_uniform(Space::sector(std::move(basis)));
}

/// Projection of a full-space state onto `target` (sector or flip-even).
/// Amplitude that does not belong to the target is dropped.
inline StateVector project(const StateVector& psi, const Space& target) {
  if (psi.space().kind() != SpaceKind::full || psi.space().n() != target.n())
    throw SpaceMismatch("project: expected a full-space state on n=" + std::to_string(target.n()));
  StateVector out(target);
  const double r = std::sqrt(0.5);
  const basis_t mask = all_ones(target.n());
  for (std::size_t i = 0; i < target.dim(); ++i) {
    const basis_t x = target.state(i);
    if (target.kind() == SpaceKind::flip_even)
      out[i] = r * (psi[x] + psi[~x & mask]);
    else
      out[i] = psi[x];
  }
  return out;
}

namespace detail {

inline double out_of_target_weight(const StateVector& ref, const Space& target) {
  double w = 0.0;
  const basis_t mask = all_ones(target.n());
  for (std::size_t x = 0; x < ref.dim(); ++x) {
    if (target.kind() == SpaceKind::sector) {
      if (hamming_weight(x) != target.k()) w += std::norm(ref[x]);
    } else {
      w += 0.5 * std::norm(ref[x] - ref[~x & mask]);  // odd part, counted once per pair
    }
  }
  return w;
}

}  // namespace detail

/// Restricts a full-space operator to a sector or the flip-even space.
///
/// Every term must leave the target invariant; the offending term is named
/// otherwise. apply on the result equals apply on embedded states.
inline Operator restrict(const Operator& op, const Space& target) {
  const Space& src = op.space();
  if (src.kind() != SpaceKind::full)
    throw SpaceMismatch("restrict: source must be a full-space operator, got " + src.describe());
  if (target.kind() == SpaceKind::full || target.n() != src.n())
    throw SpaceMismatch("restrict: cannot restrict " + src.describe() + " to " +
                        target.describe());
  const bool to_sector = target.kind() == SpaceKind::sector;
  const basis_t mask = all_ones(src.n());

  OperatorBuilder b(target);
  b.add_constant(op.shift());

  if (!op.diagonal().empty()) {
    auto d = op.diagonal();
    std::vector<double> sub(target.dim());
    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < target.dim(); ++i) {
      const basis_t x = target.state(i);
      sub[i] = d[x];
      if (!to_sector && std::abs(d[x] - d[~x & mask]) > 1e-12 * std::max(1.0, scale))
        throw ValidationError("restrict: diagonal term is not symmetric under the global flip at "
                              "basis state " + std::to_string(x));
    }
    b.set_diagonal(std::move(sub));
  }

  for (const FlipTerm& f : op.flips()) {
    if (to_sector)
      throw ValidationError("restrict: sigma^x term on qubit " + std::to_string(f.qubit) +
                            " (coefficient " + std::to_string(f.coef) +
                            ") changes Sigma^z and cannot act within " + target.describe());
    b.add_flip(f.qubit, f.coef);
  }

  for (const ExchangeTerm& e : op.exchanges()) b.add_exchange(e.qubit_a, e.qubit_b, e.coef);

  for (std::size_t t = 0; t < op.projectors().size(); ++t) {
    const ProjectorTerm& p = op.projectors()[t];
    const double leak = detail::out_of_target_weight(p.ref, target);
    if (leak > 1e-24 * std::max(1.0, p.ref.squared_norm()))
      throw ValidationError("restrict: projector term " + std::to_string(t) + " (coefficient " +
                            std::to_string(p.coef) + ") has reference weight " +
                            std::to_string(leak) + " outside " + target.describe());
    b.add_projector(p.coef, project(p.ref, target));
  }

  for (const WeightedOperator& part : op.parts()) b.add_part(part.weight, restrict(part.op, target));
  return b.build();
}

inline InterpolatedOperator restrict(const InterpolatedOperator& pair, const Space& target) {
  return {restrict(pair.h_in, target), restrict(pair.h_out, target)};
}

}  // namespace aqc
