#pragma once

// Initial/final Hamiltonian pairs and their linear interpolation
// H(g) = (1-g) H_in + g H_out.

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "aqc/instances.hpp"
#include "aqc/operator.hpp"

namespace aqc {

enum class Scheme { grover, ising, hybrid, conventional, heisenberg_ec3, xy_ec3 };

inline constexpr std::array<Scheme, 6> all_schemes = {
    Scheme::grover,       Scheme::ising,          Scheme::hybrid,
    Scheme::conventional, Scheme::heisenberg_ec3, Scheme::xy_ec3};

constexpr std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::grover: return "grover";
    case Scheme::ising: return "ising";
    case Scheme::hybrid: return "hybrid";
    case Scheme::conventional: return "conventional";
    case Scheme::heisenberg_ec3: return "heisenberg_ec3";
    case Scheme::xy_ec3: return "xy_ec3";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : all_schemes)
    if (scheme_name(s) == name) return s;
  throw ValidationError("unknown scheme '" + std::string(name) +
                        "' (expected grover, ising, hybrid, conventional, heisenberg_ec3 "
                        "or xy_ec3)");
}

constexpr bool needs_instance(Scheme s) {
  return s == Scheme::conventional || s == Scheme::heisenberg_ec3 || s == Scheme::xy_ec3;
}

/// Schemes whose H(g) commutes with Sigma^z for every g.
constexpr bool conserves_total_z(Scheme s) {
  return s == Scheme::heisenberg_ec3 || s == Scheme::xy_ec3;
}

/// Schemes whose H(g) commutes with the global flip x <-> ~x.
constexpr bool flip_symmetric(Scheme s) { return s == Scheme::ising || s == Scheme::hybrid; }

struct InterpolatedOperator {
  Operator h_in;
  Operator h_out;

  const Space& space() const { return h_in.space(); }
};

/// H(g) as a lazy combination; the endpoints return the stored handles.
inline Operator interpolate(const InterpolatedOperator& pair, double g) {
  if (!(g >= 0.0 && g <= 1.0))
    throw ValidationError("interpolate: g=" + std::to_string(g) + " outside [0, 1]");
  if (g == 0.0) return pair.h_in;
  if (g == 1.0) return pair.h_out;
  std::array<WeightedOperator, 2> parts{{{1.0 - g, pair.h_in}, {g, pair.h_out}}};
  return linear_combination(pair.space(), parts);
}

/// a * H_in + b * H_out without the [0,1] restriction (used by integrators).
inline Operator combine(const InterpolatedOperator& pair, double a, double b) {
  std::array<WeightedOperator, 2> parts{{{a, pair.h_in}, {b, pair.h_out}}};
  return linear_combination(pair.space(), parts);
}

/// H_out - H_in, the derivative dH/dg.
inline Operator derivative(const InterpolatedOperator& pair) { return combine(pair, -1.0, 1.0); }

inline InterpolatedOperator make_interpolation(Operator h_in, Operator h_out) {
  require_same_space(h_in.space(), h_out.space(), "interpolated operator");
  return {std::move(h_in), std::move(h_out)};
}

// ---------------------------------------------------------------------------
// Grover, Ising and the Grover/Ising hybrid

/// 1 - |s><s|
inline Operator build_uniform_projector_complement(int n) {
  return OperatorBuilder(Space::full(n)).add_constant(1.0).add_projector(-1.0, uniform_state(n)).build();
}

inline InterpolatedOperator build_grover(int n, basis_t marked) {
  if (n < 1 || n > max_full_qubits)
    throw ValidationError("grover: n=" + std::to_string(n) + " out of range");
  if (marked > all_ones(n))
    throw ValidationError("grover: marked state " + std::to_string(marked) + " outside [0, 2^" +
                          std::to_string(n) + ")");
  Operator h_out = OperatorBuilder(Space::full(n))
                       .add_constant(1.0)
                       .add_projector(-1.0, basis_state(n, marked))
                       .build();
  return make_interpolation(build_uniform_projector_complement(n), std::move(h_out));
}

/// -sum_a sigma^z_a sigma^z_{a+1}, periodic (qubit n+1 = qubit 1).
inline Operator build_ising_coupling(int n, const Space& space) {
  std::vector<double> diag(space.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const basis_t x = space.state(i);
    int e = 0;
    for (int q = 1; q <= n; ++q) e -= spin(x, q) * spin(x, q % n + 1);
    diag[i] = e;
  }
  return OperatorBuilder(space).set_diagonal(std::move(diag)).build();
}

/// -sum_a sigma^x_a
inline Operator build_transverse_field(int n, const Space& space) {
  OperatorBuilder b(space);
  for (int q = 1; q <= n; ++q) b.add_flip(q, -1.0);
  return b.build();
}

inline InterpolatedOperator build_ising(int n) {
  if (n < 2) throw ValidationError("ising: n must be at least 2");
  Space sp = Space::full(n);
  return make_interpolation(build_transverse_field(n, sp), build_ising_coupling(n, sp));
}

inline InterpolatedOperator build_hybrid(int n) {
  if (n < 2) throw ValidationError("hybrid: n must be at least 2");
  return make_interpolation(build_uniform_projector_complement(n), build_ising_coupling(n, Space::full(n)));
}

// ---------------------------------------------------------------------------
// Exact cover-3

namespace detail {

struct CoupledPair {
  int a;
  int b;
  int weight;
};

inline std::vector<CoupledPair> coupled_pairs(const CouplingData& cd) {
  std::vector<CoupledPair> out;
  for (int a = 1; a <= cd.n; ++a)
    for (int b = a + 1; b <= cd.n; ++b)
      if (cd.pair(a, b) != 0) out.push_back({a, b, cd.pair(a, b)});
  return out;
}

inline void check_space_for(const Ec3Instance& inst, const Space& space) {
  if (space.n() != inst.n)
    throw SpaceMismatch("space " + space.describe() + " does not match instance n=" +
                        std::to_string(inst.n));
}

}  // namespace detail

/// Frustrated antiferromagnet in a field,
///   (1/4) sum_{a,b} M_ab s_a s_b - (1/2) sum_a N_a s_a + m,
/// which equals sum over clauses of (s_a + s_b + s_c - 1)^2 / 4 and vanishes
/// exactly on satisfying assignments.
inline Operator build_ec3_out(const Ec3Instance& inst, const Space& space) {
  detail::check_space_for(inst, space);
  const CouplingData cd = coupling_data(inst);
  const auto pairs = detail::coupled_pairs(cd);
  std::vector<double> diag(space.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const basis_t x = space.state(i);
    // both orders of each unordered pair: 2 * (1/4) = 1/2
    double e = inst.m();
    for (const auto& p : pairs) e += 0.5 * p.weight * spin(x, p.a) * spin(x, p.b);
    for (int q = 1; q <= inst.n; ++q) e -= 0.5 * cd.count(q) * spin(x, q);
    diag[i] = e;
  }
  return OperatorBuilder(space).set_diagonal(std::move(diag)).build();
}

inline Operator build_ec3_out(const Ec3Instance& inst) {
  return build_ec3_out(inst, Space::full(inst.n));
}

/// -(1/4) sum_{a,b} M_ab sigma_a . sigma_b. Per unordered pair: diagonal
/// -(1/2) M s_a s_b and an exchange of amplitude -M.
inline Operator build_heisenberg_in(const Ec3Instance& inst, const Space& space) {
  detail::check_space_for(inst, space);
  const auto pairs = detail::coupled_pairs(coupling_data(inst));
  std::vector<double> diag(space.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const basis_t x = space.state(i);
    double e = 0.0;
    for (const auto& p : pairs) e -= 0.5 * p.weight * spin(x, p.a) * spin(x, p.b);
    diag[i] = e;
  }
  OperatorBuilder b(space);
  b.set_diagonal(std::move(diag));
  for (const auto& p : pairs) b.add_exchange(p.a, p.b, -p.weight);
  return b.build();
}

inline Operator build_heisenberg_in(const Ec3Instance& inst) {
  return build_heisenberg_in(inst, Space::full(inst.n));
}

/// -(1/4) sum_{a,b} M_ab (sigma^x sigma^x + sigma^y sigma^y): exchange only.
inline Operator build_xy_in(const Ec3Instance& inst, const Space& space) {
  detail::check_space_for(inst, space);
  OperatorBuilder b(space);
  for (const auto& p : detail::coupled_pairs(coupling_data(inst))) b.add_exchange(p.a, p.b, -p.weight);
  return b.build();
}

inline Operator build_xy_in(const Ec3Instance& inst) { return build_xy_in(inst, Space::full(inst.n)); }

/// Penalty 1 per violated clause.
inline Operator build_conventional_out(const Ec3Instance& inst, const Space& space) {
  detail::check_space_for(inst, space);
  std::vector<double> diag(space.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const basis_t x = space.state(i);
    int violated = 0;
    for (const Clause& c : inst.clauses) violated += c.satisfied_by(x) ? 0 : 1;
    diag[i] = violated;
  }
  return OperatorBuilder(space).set_diagonal(std::move(diag)).build();
}

/// sum_a N_a (1 - sigma^x_a) / 2, ground state |s> at energy 0.
inline Operator build_conventional_in(const Ec3Instance& inst) {
  const CouplingData cd = coupling_data(inst);
  OperatorBuilder b(Space::full(inst.n));
  for (int q = 1; q <= inst.n; ++q) {
    b.add_constant(0.5 * cd.count(q));
    if (cd.count(q) != 0) b.add_flip(q, -0.5 * cd.count(q));
  }
  return b.build();
}

inline InterpolatedOperator build_conventional(const Ec3Instance& inst) {
  return make_interpolation(build_conventional_in(inst), build_conventional_out(inst, Space::full(inst.n)));
}

inline InterpolatedOperator build_heisenberg_ec3(const Ec3Instance& inst, const Space& space) {
  return make_interpolation(build_heisenberg_in(inst, space), build_ec3_out(inst, space));
}

inline InterpolatedOperator build_xy_ec3(const Ec3Instance& inst, const Space& space) {
  return make_interpolation(build_xy_in(inst, space), build_ec3_out(inst, space));
}

/// Sigma^z = sum_a sigma^z_a as a diagonal operator.
inline Operator build_total_z(const Space& space) {
  if (space.kind() == SpaceKind::flip_even)
    throw ValidationError("Sigma^z is odd under the global flip; not defined on " +
                          space.describe());
  std::vector<double> diag(space.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = total_z(space.state(i), space.n());
  return OperatorBuilder(space).set_diagonal(std::move(diag)).build();
}

struct SchemeSpec {
  Scheme scheme = Scheme::grover;
  int n = 0;
  basis_t marked = 0;
  std::shared_ptr<const Ec3Instance> instance;
};

/// Full-space pair for a scheme.
inline InterpolatedOperator build_scheme(const SchemeSpec& spec) {
  if (needs_instance(spec.scheme) && !spec.instance)
    throw ValidationError("scheme " + std::string(scheme_name(spec.scheme)) +
                          " needs an exact cover-3 instance");
  switch (spec.scheme) {
    case Scheme::grover: return build_grover(spec.n, spec.marked);
    case Scheme::ising: return build_ising(spec.n);
    case Scheme::hybrid: return build_hybrid(spec.n);
    case Scheme::conventional: return build_conventional(*spec.instance);
    case Scheme::heisenberg_ec3:
      return build_heisenberg_ec3(*spec.instance, Space::full(spec.instance->n));
    case Scheme::xy_ec3: return build_xy_ec3(*spec.instance, Space::full(spec.instance->n));
  }
  throw ValidationError("unhandled scheme");
}

}  // namespace aqc
