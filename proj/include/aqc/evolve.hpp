#pragma once

// Time-dependent Schroedinger integration along g(t) = t/T, fidelities, and
// the minimal-runtime search.
//
// Each step is the fourth-order commutator-free Magnus scheme
//   psi <- exp(-i h B) exp(-i h A) psi,
//   A = a2 H(t + c1 h) + a1 H(t + c2 h),  B = a1 H(t + c1 h) + a2 H(t + c2 h),
// with Gauss nodes c = 1/2 -+ sqrt(3)/6 and a = (3 -+ 2 sqrt(3))/12. The
// exponentials are Chebyshev expansions converged to machine precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aqc/hamiltonians.hpp"
#include "aqc/sector.hpp"

namespace aqc {

/// exp(-i tau H) psi via a Chebyshev expansion on the interval H.bounds().
/// Returns the number of operator applications.
inline std::size_t chebyshev_propagate(const Operator& h, StateVector& psi, double tau) {
  require_same_space(h.space(), psi.space(), "chebyshev_propagate");
  const SpectralBounds bnd = h.bounds();
  const double center = bnd.center();
  const double radius = bnd.half_width();
  const cplx phase = std::exp(cplx{0.0, -tau * center});
  const double x = tau * radius;
  if (radius <= 0.0 || x < 1e-300) {
    psi.scale(phase);
    return 0;
  }

  const std::size_t dim = psi.dim();
  StateVector prev = psi;             // T_{k-1}(H') psi
  StateVector cur(psi.space());       // T_k(H') psi
  std::vector<cplx> acc(dim);

  // H' = (H - center) / radius has spectrum in [-1, 1]
  auto apply_scaled = [&](const StateVector& in, StateVector& out, double factor, double keep) {
    // out = factor * (H - center)/radius * in + keep * out
    std::span<cplx> o = out.amplitudes();
    for (std::size_t i = 0; i < dim; ++i) o[i] = keep * o[i] - factor * center / radius * in[i];
    h.apply_add(in, o, factor / radius);
  };

  const double j0 = std::cyl_bessel_j(0.0, x);
  for (std::size_t i = 0; i < dim; ++i) acc[i] = j0 * prev[i];
  apply_scaled(prev, cur, 1.0, 0.0);
  std::size_t applications = 1;

  cplx minus_i_pow{0.0, -1.0};  // (-i)^k
  for (int k = 1;; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
    const cplx coef = 2.0 * minus_i_pow * jk;
    for (std::size_t i = 0; i < dim; ++i) acc[i] += coef * cur[i];
    if (k > x && std::abs(jk) < 1e-17) break;
    // T_{k+1} = 2 H' T_k - T_{k-1}, written into prev
    apply_scaled(cur, prev, 2.0, -1.0);
    std::swap(prev, cur);
    ++applications;
    minus_i_pow *= cplx{0.0, -1.0};
  }
  std::span<cplx> out = psi.amplitudes();
  for (std::size_t i = 0; i < dim; ++i) out[i] = phase * acc[i];
  return applications;
}

struct EvolveOptions {
  /// Step bound h <= step_factor / (spectral half-width of H).
  double step_factor = 0.25;
  std::uint64_t min_steps = 8;
  double norm_tolerance = 1e-6;
  /// Step halvings attempted when the norm tolerance is missed.
  int max_refinements = 4;
  std::uint64_t max_steps = 100'000'000;
  /// When set, max |<Sigma^z> - value| over all steps is recorded.
  std::optional<int> expected_total_z;
};

struct EvolutionResult {
  StateVector state;
  double norm_drift = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t applications = 0;
  double step = 0.0;
  /// NaN unless EvolveOptions::expected_total_z was given.
  double total_z_drift = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string message;
};

namespace detail {

inline EvolutionResult evolve_fixed(const InterpolatedOperator& pair, const StateVector& psi0,
                                    double total_time, std::uint64_t steps,
                                    const EvolveOptions& opt) {
  EvolutionResult r{psi0};
  const double h = total_time / static_cast<double>(steps);
  const double s3 = std::sqrt(3.0);
  const double c1 = 0.5 - s3 / 6.0;
  const double c2 = 0.5 + s3 / 6.0;
  const double a1 = (3.0 - 2.0 * s3) / 12.0;
  const double a2 = (3.0 + 2.0 * s3) / 12.0;
  const double expected_norm2 = psi0.squared_norm();

  double z_drift = 0.0;
  auto track_z = [&](const StateVector& psi) {
    if (opt.expected_total_z)
      z_drift = std::max(z_drift, std::abs(total_z_expectation(psi) -
                                           *opt.expected_total_z * expected_norm2));
  };
  track_z(r.state);
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double t = h * static_cast<double>(s);
    const double g1 = (t + c1 * h) / total_time;
    const double g2 = (t + c2 * h) / total_time;
    // weights of H_in and H_out in A and B
    const Operator first = combine(pair, a2 * (1.0 - g1) + a1 * (1.0 - g2), a2 * g1 + a1 * g2);
    const Operator second = combine(pair, a1 * (1.0 - g1) + a2 * (1.0 - g2), a1 * g1 + a2 * g2);
    r.applications += chebyshev_propagate(first, r.state, h);
    r.applications += chebyshev_propagate(second, r.state, h);
    track_z(r.state);
  }
  r.steps = steps;
  r.step = h;
  r.norm_drift = std::abs(r.state.norm() - std::sqrt(expected_norm2));
  if (opt.expected_total_z) r.total_z_drift = z_drift;
  return r;
}

}  // namespace detail

/// Integrates i d/dt psi = H(t/T) psi from t = 0 to T.
///
/// The state is never renormalized. If the norm drifts past the tolerance the
/// step is halved and the run repeated; the result is marked failed once the
/// refinements or the step budget run out.
inline EvolutionResult evolve(const InterpolatedOperator& pair, const StateVector& psi0,
                              double total_time, const EvolveOptions& opt = {}) {
  require_same_space(pair.space(), psi0.space(), "evolve");
  if (!(total_time >= 0.0) || !std::isfinite(total_time))
    throw ValidationError("evolve: runtime must be finite and non-negative");
  if (std::abs(psi0.norm() - 1.0) > 1e-6)
    throw ValidationError("evolve: initial state norm " + std::to_string(psi0.norm()) +
                          " differs from 1");
  if (total_time == 0.0) {
    EvolutionResult r{psi0};
    r.norm_drift = std::abs(psi0.norm() - 1.0);
    if (opt.expected_total_z)
      r.total_z_drift = std::abs(total_z_expectation(psi0) - *opt.expected_total_z);
    return r;
  }

  const double width = std::max(pair.h_in.bounds().half_width(), pair.h_out.bounds().half_width());
  const double by_norm = std::ceil(total_time * width / opt.step_factor);
  double steps_d = std::max(static_cast<double>(opt.min_steps), by_norm);

  EvolutionResult r{psi0};
  for (int attempt = 0; attempt <= opt.max_refinements; ++attempt) {
    if (steps_d > static_cast<double>(opt.max_steps)) {
      r.failed = true;
      r.message = "step budget of " + std::to_string(opt.max_steps) + " exceeded at T=" +
                  std::to_string(total_time);
      return r;
    }
    r = detail::evolve_fixed(pair, psi0, total_time, static_cast<std::uint64_t>(steps_d), opt);
    if (r.norm_drift <= opt.norm_tolerance) return r;
    steps_d *= 2.0;
  }
  r.failed = true;
  r.message = "norm drift " + std::to_string(r.norm_drift) + " above tolerance " +
              std::to_string(opt.norm_tolerance) + " after " +
              std::to_string(opt.max_refinements) + " step halvings";
  return r;
}

/// A set of full-space basis states; fidelity sums the probability on them.
struct Target {
  std::vector<basis_t> states;

  static Target single(basis_t x) { return Target{{x}}; }
};

struct FidelityReport {
  double value = 0.0;
  /// Some target state lies outside the state's space (wrong sector).
  bool outside_space = false;
};

inline FidelityReport fidelity_report(const StateVector& psi, const Target& target) {
  FidelityReport rep;
  for (basis_t x : target.states) {
    if (!psi.space().index(x))
      rep.outside_space = true;
    else
      rep.value += psi.probability(x);
  }
  return rep;
}

inline double fidelity(const StateVector& psi, const Target& target) {
  return fidelity_report(psi, target).value;
}

inline double fidelity(const StateVector& psi, const StateVector& target) {
  return std::norm(inner(target, psi));
}

inline double fidelity(const EvolutionResult& r, const Target& target) {
  return fidelity(r.state, target);
}

inline double fidelity(const EvolutionResult& r, const StateVector& target) {
  return fidelity(r.state, target);
}

// ---------------------------------------------------------------------------
// Problems and the runtime search

enum class SpaceMode { sector, full };

struct AdiabaticProblem {
  Scheme scheme = Scheme::grover;
  InterpolatedOperator hamiltonian;
  StateVector initial;
  Target target;
  std::optional<SectorChoice> sector;
  /// Target lies outside the simulated space; fidelity is identically zero.
  bool target_outside = false;
};

/// Assembles pair, initial state and target for a scheme.
///
/// grover/conventional run in the full space from |s>. ising/hybrid start in
/// |s> and target both ferromagnetic states, using the flip-even space in
/// sector mode. heisenberg_ec3/xy_ec3 start in the uniform state of the
/// chosen Hamming-weight sector (the solution's, unless `sector` is given),
/// simulated in that sector or embedded in the full space.
inline AdiabaticProblem make_problem(const SchemeSpec& spec, SpaceMode mode = SpaceMode::sector,
                                     std::optional<SectorChoice> sector = std::nullopt) {
  if (needs_instance(spec.scheme) && !spec.instance)
    throw ValidationError("scheme " + std::string(scheme_name(spec.scheme)) +
                          " needs an exact cover-3 instance");
  auto solution_target = [&]() {
    if (!spec.instance->solution)
      throw ValidationError("instance " + spec.instance->id() + " has no known solution");
    return Target::single(*spec.instance->solution);
  };

  switch (spec.scheme) {
    case Scheme::grover:
      return {spec.scheme, build_grover(spec.n, spec.marked), uniform_state(spec.n),
              Target::single(spec.marked), std::nullopt, false};
    case Scheme::ising:
    case Scheme::hybrid: {
      InterpolatedOperator pair = build_scheme(spec);
      Target ground{{0, all_ones(spec.n)}};
      if (mode == SpaceMode::full)
        return {spec.scheme, pair, uniform_state(spec.n), ground, std::nullopt, false};
      Space even = Space::flip_even(spec.n);
      return {spec.scheme, restrict(pair, even), project(uniform_state(spec.n), even), ground,
              std::nullopt, false};
    }
    case Scheme::conventional:
      return {spec.scheme, build_conventional(*spec.instance), uniform_state(spec.instance->n),
              solution_target(), std::nullopt, false};
    case Scheme::heisenberg_ec3:
    case Scheme::xy_ec3: {
      const Ec3Instance& inst = *spec.instance;
      const SectorChoice choice = sector ? *sector : choose_delta(inst);
      if (choice.n != inst.n) throw ValidationError("sector choice does not match instance n");
      Target target = solution_target();
      const bool outside = hamming_weight(target.states.front()) != choice.k;
      Space sec = Space::sector(inst.n, choice.k);
      StateVector start = project_uniform(sec);
      if (mode == SpaceMode::sector) {
        InterpolatedOperator pair = spec.scheme == Scheme::xy_ec3 ? build_xy_ec3(inst, sec)
                                                                  : build_heisenberg_ec3(inst, sec);
        return {spec.scheme, pair, start, target, choice, outside};
      }
      return {spec.scheme, build_scheme(spec), start.embed(), target, choice, outside};
    }
  }
  throw ValidationError("unhandled scheme");
}

struct SearchConfig {
  double target_fidelity = 0.125;
  double t_start = 1.0;
  double t_max = 1048576.0;  // 2^20
  /// Bisection stops once (hi - lo) / hi <= rel_width.
  double rel_width = 0.05;
  EvolveOptions evolve;
};

enum class RunStatus { ok, runtime_exceeded, failed };

constexpr std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::runtime_exceeded: return "runtime-exceeded";
    case RunStatus::failed: return "failed";
  }
  return "?";
}

inline RunStatus parse_status(std::string_view s) {
  for (RunStatus v : {RunStatus::ok, RunStatus::runtime_exceeded, RunStatus::failed})
    if (status_name(v) == s) return v;
  throw ValidationError("unknown run status '" + std::string(s) + "'");
}

struct Probe {
  double runtime = 0.0;
  double fidelity = 0.0;
  double norm_drift = 0.0;
  std::uint64_t steps = 0;
  bool failed = false;
};

struct RuntimeResult {
  RunStatus status = RunStatus::failed;
  /// Smallest passing runtime (NaN unless status is ok).
  double t_min = std::numeric_limits<double>::quiet_NaN();
  double fidelity = 0.0;
  std::optional<EvolutionResult> result;
  std::vector<Probe> trace;
  std::string message;
};

/// Doubling from t_start until the fidelity target is met, then bisection on
/// [last failing T, first passing T] down to the relative width. Fidelity is
/// not monotone in T; the full trace is kept.
inline RuntimeResult min_runtime(const AdiabaticProblem& problem, const SearchConfig& cfg = {}) {
  if (!(cfg.t_start > 0.0) || !(cfg.t_max >= cfg.t_start))
    throw ValidationError("min_runtime: need 0 < t_start <= t_max");
  if (!(cfg.rel_width > 0.0 && cfg.rel_width < 1.0))
    throw ValidationError("min_runtime: relative width must lie in (0, 1)");

  EvolveOptions eopt = cfg.evolve;
  if (problem.sector && problem.initial.space().kind() == SpaceKind::full)
    eopt.expected_total_z = problem.sector->delta;

  RuntimeResult out;
  auto probe = [&](double T) -> std::optional<EvolutionResult> {
    EvolutionResult r = evolve(problem.hamiltonian, problem.initial, T, eopt);
    double f = fidelity(r.state, problem.target);
    out.trace.push_back({T, f, r.norm_drift, r.steps, r.failed});
    if (r.failed) {
      out.status = RunStatus::failed;
      out.message = r.message;
      return std::nullopt;
    }
    return r;
  };
  auto passes = [&](const EvolutionResult& r) {
    return fidelity(r.state, problem.target) >= cfg.target_fidelity;
  };

  double T = cfg.t_start;
  double last_fail = -1.0;
  std::optional<EvolutionResult> best;
  while (true) {
    auto r = probe(T);
    if (!r) return out;
    if (passes(*r)) {
      best = std::move(r);
      break;
    }
    last_fail = T;
    if (T * 2.0 > cfg.t_max) {
      out.status = RunStatus::runtime_exceeded;
      out.message = "fidelity " + std::to_string(cfg.target_fidelity) + " not reached up to T=" +
                    std::to_string(T);
      if (problem.target_outside) out.message += " (target outside the simulated sector)";
      out.fidelity = out.trace.back().fidelity;
      return out;
    }
    T *= 2.0;
  }

  double hi = T;
  if (last_fail > 0.0) {
    double lo = last_fail;
    while ((hi - lo) / hi > cfg.rel_width) {
      const double mid = 0.5 * (lo + hi);
      auto r = probe(mid);
      if (!r) return out;
      if (passes(*r)) {
        hi = mid;
        best = std::move(r);
      } else {
        lo = mid;
      }
    }
  }
  out.status = RunStatus::ok;
  out.t_min = hi;
  out.fidelity = fidelity(best->state, problem.target);
  out.result = std::move(best);
  return out;
}

}  // namespace aqc
