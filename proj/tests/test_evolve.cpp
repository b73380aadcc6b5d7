#include <gtest/gtest.h>

#include <cmath>

#include "aqc/evolve.hpp"
#include "oracles.hpp"

using namespace aqc;

namespace {

// H_in = -sigma_x, H_out = -sigma_z on one qubit
InterpolatedOperator landau_zener() {
  Space sp = Space::full(1);
  return make_interpolation(OperatorBuilder(sp).add_flip(1, -1.0).build(),
                            OperatorBuilder(sp).set_diagonal({-1.0, 1.0}).build());
}

oracle::Vec reference(const InterpolatedOperator& pair, const StateVector& psi0, double T,
                      std::size_t steps) {
  return oracle::rk4(oracle::dense_from_apply(pair.h_in), oracle::dense_from_apply(pair.h_out),
                     oracle::to_eigen(psi0), T, steps);
}

std::shared_ptr<const Ec3Instance> instance(int n, std::uint64_t seed, bool hard = false) {
  return std::make_shared<const Ec3Instance>(generate(n, seed, hard));
}

}  // namespace

TEST(Evolve, ZeroRuntimeReturnsInitialState) {
  auto pair = build_grover(3, 5);
  EvolutionResult r = evolve(pair, uniform_state(3), 0.0);
  EXPECT_EQ(max_abs_difference(r.state, uniform_state(3)), 0.0);
  EXPECT_NEAR(fidelity(r, Target::single(5)), 1.0 / 8, 1e-15);
  EXPECT_THROW(evolve(pair, uniform_state(3), -1.0), ValidationError);
}

TEST(Evolve, ConstantDiagonalIsExactPhase) {
  Space sp = Space::full(3);
  std::vector<double> d = {0.3, -1.2, 2.5, 0.0, 1.0, -0.7, 4.0, 0.1};
  Operator h = OperatorBuilder(sp).set_diagonal(d).build();
  const double T = 7.3;
  EvolutionResult r = evolve(make_interpolation(h, h), uniform_state(3), T);
  for (std::size_t x = 0; x < 8; ++x) {
    const cplx expect = std::polar(std::pow(2.0, -1.5), -d[x] * T);
    EXPECT_LE(std::abs(r.state[x] - expect), 1e-8);
  }
}

TEST(Evolve, LandauZenerMatchesReference) {
  auto pair = landau_zener();
  const StateVector psi0 = uniform_state(1);
  for (double T : {1.0, 10.0}) {
    EvolutionResult r = evolve(pair, psi0, T);
    // our step is at most 2/1 for this pair; the reference uses 100x smaller steps
    const std::size_t ref_steps = static_cast<std::size_t>(std::ceil(100.0 * r.steps));
    oracle::Vec ref = reference(pair, psi0, T, ref_steps);
    const double f_ref = std::norm(ref(0));
    EXPECT_NEAR(fidelity(r, Target::single(0)), f_ref, 1e-6) << "T=" << T;
    EXPECT_LE(r.norm_drift, 1e-12);
  }
}

TEST(Evolve, FourthOrderConvergence) {
  auto pair = landau_zener();
  const StateVector psi0 = uniform_state(1);
  const double T = 10.0;
  oracle::Vec ref = reference(pair, psi0, T, 200000);
  std::vector<double> errors;
  for (double c : {2.0, 1.0, 0.5, 0.25}) {
    EvolveOptions opt;
    opt.step_factor = c;
    opt.min_steps = 1;
    EvolutionResult r = evolve(pair, psi0, T, opt);
    errors.push_back((oracle::to_eigen(r.state) - ref).norm());
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] < 1e-13) break;  // at roundoff
    EXPECT_GE(errors[i - 1] / errors[i], 8.0) << "step halving " << i;
  }
}

TEST(Evolve, NormDriftWithinTolerance) {
  auto inst = instance(10, 3);
  AdiabaticProblem p = make_problem({Scheme::conventional, 10, 0, inst}, SpaceMode::full);
  EvolutionResult r = evolve(p.hamiltonian, p.initial, 50.0);
  EXPECT_FALSE(r.failed);
  EXPECT_LE(r.norm_drift, 1e-6);
}

TEST(Evolve, UnreachableToleranceFailsWithDiagnostics) {
  auto pair = build_grover(4, 1);
  EvolveOptions opt;
  opt.norm_tolerance = 0.0;
  opt.max_refinements = 1;
  EvolutionResult r = evolve(pair, uniform_state(4), 5.0, opt);
  if (r.norm_drift > 0.0) {
    EXPECT_TRUE(r.failed);
    EXPECT_FALSE(r.message.empty());
  }
  opt.max_steps = 4;
  opt.norm_tolerance = 1e-6;
  EvolutionResult capped = evolve(pair, uniform_state(4), 1000.0, opt);
  EXPECT_TRUE(capped.failed);
  EXPECT_NE(capped.message.find("step"), std::string::npos);
}

TEST(Evolve, TotalZConservedInFullSpace) {
  for (Scheme s : {Scheme::xy_ec3, Scheme::heisenberg_ec3}) {
    auto inst = instance(10, 4);
    AdiabaticProblem p = make_problem({s, 10, 0, inst}, SpaceMode::full);
    EvolveOptions opt;
    opt.expected_total_z = p.sector->delta;
    EvolutionResult r = evolve(p.hamiltonian, p.initial, 20.0, opt);
    EXPECT_LE(r.total_z_drift, 1e-8);
    EXPECT_NEAR(total_z_expectation(r.state), p.sector->delta, 1e-8);
  }
}

TEST(Evolve, SectorMatchesFullSpace) {
  for (int n : {8, 10}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto inst = instance(n, seed);
      AdiabaticProblem sec = make_problem({Scheme::xy_ec3, n, 0, inst}, SpaceMode::sector);
      AdiabaticProblem full = make_problem({Scheme::xy_ec3, n, 0, inst}, SpaceMode::full);
      EvolveOptions opt;
      opt.step_factor = 0.5;
      EvolutionResult a = evolve(sec.hamiltonian, sec.initial, 10.0, opt);
      EvolutionResult b = evolve(full.hamiltonian, full.initial, 10.0, opt);
      EXPECT_LE(max_abs_difference(a.state.embed(), b.state), 1e-8) << inst->id();
      EXPECT_NEAR(fidelity(a, sec.target), fidelity(b, full.target), 1e-8);
    }
  }
}

TEST(Fidelity, Examples) {
  StateVector psi = uniform_state(3);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-15);
  EXPECT_EQ(fidelity(basis_state(2, 1), basis_state(2, 2)), 0.0);
  StateVector s = project_uniform(Space::sector(3, 1));
  EXPECT_NEAR(fidelity(s, Target::single(from_assignment_string("100"))), 1.0 / 3, 1e-15);
  FidelityReport rep = fidelity_report(s, Target::single(from_assignment_string("110")));
  EXPECT_EQ(rep.value, 0.0);
  EXPECT_TRUE(rep.outside_space);
}

TEST(MinRuntime, GroverSquareRootExample) {
  auto run = [](int n) {
    return min_runtime(make_problem({Scheme::grover, n, 0, nullptr}));
  };
  RuntimeResult r2 = run(2);
  RuntimeResult r4 = run(4);
  ASSERT_EQ(r2.status, RunStatus::ok);
  ASSERT_EQ(r4.status, RunStatus::ok);
  const double ratio = r4.t_min / (2.0 * r2.t_min);
  EXPECT_GE(ratio, 0.5);
  EXPECT_LE(ratio, 2.0);
}

TEST(MinRuntime, VacuousTargetPassesImmediately) {
  auto inst = instance(6, 2);
  for (Scheme s : all_schemes) {
    SearchConfig cfg;
    cfg.target_fidelity = 0.0;
    RuntimeResult r = min_runtime(make_problem({s, 6, 3, inst}), cfg);
    EXPECT_EQ(r.status, RunStatus::ok);
    EXPECT_EQ(r.t_min, cfg.t_start);
    EXPECT_EQ(r.trace.size(), 1U);
  }
}

TEST(MinRuntime, XyResultMeetsContract) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = instance(6, seed);
    AdiabaticProblem p = make_problem({Scheme::xy_ec3, 6, 0, inst});
    RuntimeResult r = min_runtime(p);
    ASSERT_EQ(r.status, RunStatus::ok);
    ASSERT_TRUE(r.result);
    EXPECT_GE(fidelity(*r.result, p.target), 0.125);
    EXPECT_LE(r.result->norm_drift, 1e-6);
  }
}

TEST(MinRuntime, BracketAndTrace) {
  auto inst = instance(8, 1);
  RuntimeResult r = min_runtime(make_problem({Scheme::conventional, 8, 0, inst}));
  ASSERT_EQ(r.status, RunStatus::ok);
  // doubling probes are 1, 2, 4, ...; the final bracket is within 5%
  double last_fail = 0.0;
  for (const Probe& p : r.trace)
    if (p.fidelity < 0.125 && p.runtime < r.t_min) last_fail = std::max(last_fail, p.runtime);
  EXPECT_GT(last_fail, 0.0);
  EXPECT_LE((r.t_min - last_fail) / r.t_min, 0.05);
  EXPECT_EQ(r.trace.front().runtime, 1.0);
}

TEST(MinRuntime, RuntimeExceededIsReportedNotThrown) {
  SearchConfig cfg;
  cfg.t_max = 4.0;
  RuntimeResult r = min_runtime(make_problem({Scheme::grover, 10, 0, nullptr}), cfg);
  EXPECT_EQ(r.status, RunStatus::runtime_exceeded);
  EXPECT_TRUE(std::isnan(r.t_min));
  EXPECT_FALSE(r.message.empty());
}

TEST(MinRuntime, TargetOutsideSectorNeverPasses) {
  auto inst = instance(6, 1);
  const int k = hamming_weight(*inst->solution);
  AdiabaticProblem p = make_problem({Scheme::xy_ec3, 6, 0, inst}, SpaceMode::sector,
                                    SectorChoice::from_k(6, k == 1 ? 2 : 1));
  EXPECT_TRUE(p.target_outside);
  SearchConfig cfg;
  cfg.t_max = 8.0;
  RuntimeResult r = min_runtime(p, cfg);
  EXPECT_EQ(r.status, RunStatus::runtime_exceeded);
  EXPECT_NE(r.message.find("outside"), std::string::npos);
}

TEST(MinRuntime, SlowerIsNotWorseAtBracketScale) {
  auto inst = instance(6, 7);
  for (Scheme s : all_schemes) {
    AdiabaticProblem p = make_problem({s, 6, 9, inst});
    RuntimeResult r = min_runtime(p);
    ASSERT_EQ(r.status, RunStatus::ok) << scheme_name(s);
    EvolutionResult slow = evolve(p.hamiltonian, p.initial, 8.0 * r.t_min);
    EXPECT_GE(fidelity(slow, p.target), r.fidelity) << scheme_name(s);
  }
}
