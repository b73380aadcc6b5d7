#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aqc/evolve.hpp"
#include "aqc/spectra.hpp"
#include "oracles.hpp"

using namespace aqc;

namespace {

const EigenOptions lanczos{.method = EigenOptions::Method::lanczos};
const EigenOptions dense{.method = EigenOptions::Method::dense};

double min_gap(const InterpolatedOperator& pair, std::size_t points, std::optional<Space> sector = {}) {
  SweepOptions opt;
  opt.sector = std::move(sector);
  return gap_sweep(pair, uniform_grid(points), opt).min_gap;
}

}  // namespace

TEST(LowestEigs, DiagonalExample) {
  Operator d = OperatorBuilder(Space::full(2)).set_diagonal({0, 1, 1, 2}).build();
  EigenResult e = lowest_eigs(d, 2);
  EXPECT_NEAR(e.values[0], 0.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
  EXPECT_THROW(lowest_eigs(d, 5), ValidationError);
}

TEST(LowestEigs, Ec3GroundEnergyIsZero) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Ec3Instance inst = generate(10, seed, false);
    EigenResult e = lowest_eigs(build_ec3_out(inst), 1, lanczos);
    EXPECT_NEAR(e.values[0], 0.0, 1e-9);
  }
}

TEST(LowestEigs, RandomNumberConservingOperatorMatchesDense) {
  Rng rng(21);
  Space sp = Space::full(8);
  OperatorBuilder b(sp);
  std::vector<double> diag(256);
  for (basis_t x = 0; x < 256; ++x) {
    // any function of the spin configuration commutes with Sigma^z
    double v = 0.0;
    for (int q = 1; q <= 8; ++q) v += 0.3 * q * spin(x, q) * spin(x, q % 8 + 1);
    diag[x] = v + 0.1 * total_z(x, 8);
  }
  b.set_diagonal(diag);
  for (int a = 1; a <= 8; ++a)
    for (int c = a + 1; c <= 8; ++c) b.add_exchange(a, c, standard_normal(rng));
  Operator h = b.build();
  EigenResult k = lowest_eigs(h, 4, lanczos);
  EigenResult d = lowest_eigs(h, 4, dense);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(k.values[j], d.values[j], 1e-8);
  Space sec = Space::sector(8, 3);
  Operator r = restrict(h, sec);
  k = lowest_eigs(r, 4, lanczos);
  d = lowest_eigs(r, 4, dense);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(k.values[j], d.values[j], 1e-8);
}

TEST(LowestEigs, KrylovMatchesDenseOnAllBuilders) {
  Ec3Instance inst = generate(9, 4, false);
  const int k = hamming_weight(*inst.solution);
  std::vector<InterpolatedOperator> pairs = {
      build_grover(9, 17), build_ising(9), build_hybrid(9), build_conventional(inst),
      build_xy_ec3(inst, Space::sector(9, k)), build_heisenberg_ec3(inst, Space::sector(9, k)),
      restrict(build_ising(10), Space::flip_even(10))};
  for (const auto& pair : pairs) {
    for (double g : {0.0, 0.35, 0.5, 0.9, 1.0}) {
      Operator h = interpolate(pair, g);
      EigenResult kr = lowest_eigs(h, 3, lanczos);
      EigenResult de = lowest_eigs(h, 3, dense);
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(kr.values[j], de.values[j], 1e-8) << h.space().describe() << " g=" << g;
        EXPECT_LE(kr.residuals[j], 1e-8 * std::max(1.0, h.bounds().scale()));
      }
    }
  }
}

TEST(LowestEigs, PhaseConventionIsDeterministic) {
  Operator h = interpolate(build_ising(6), 0.4);
  for (const auto& opt : {lanczos, dense}) {
    EigenResult e = lowest_eigs(h, 2, opt);
    for (const StateVector& v : e.vectors) {
      double big = 0.0;
      for (std::size_t i = 0; i < v.dim(); ++i) big = std::max(big, std::abs(v[i]));
      for (std::size_t i = 0; i < v.dim(); ++i) {
        if (std::abs(v[i]) > 1e-10 * big) {
          EXPECT_NEAR(v[i].imag(), 0.0, 1e-15);
          EXPECT_GT(v[i].real(), 0.0);
          break;
        }
      }
    }
  }
  EigenResult a = lowest_eigs(h, 1, lanczos);
  EigenResult b = lowest_eigs(h, 1, dense);
  EXPECT_LE(max_abs_difference(a.vectors[0], b.vectors[0]), 1e-7);
}

TEST(LowestEigs, NonConvergenceReportsResidual) {
  EigenOptions opt = lanczos;
  opt.max_krylov = 2;
  opt.max_restarts = 0;
  try {
    lowest_eigs(interpolate(build_ising(10), 0.5), 2, opt);
    FAIL() << "expected non-convergence";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(GapSweep, GroverMinimumGap) {
  GapCurve c = gap_sweep(build_grover(8, 0), uniform_grid(1001));
  EXPECT_NEAR(c.min_gap, 1.0 / 16, 1e-6);
  EXPECT_NEAR(c.g_star, 0.5, 1e-3);
  EXPECT_EQ(c.points.size(), 1001U);
  EXPECT_EQ(c.points.front().g, 0.0);
  EXPECT_EQ(c.points.back().g, 1.0);
  for (const GapPoint& p : c.points) EXPECT_LE(p.energies[0], p.energies[1]);
}

TEST(GapSweep, GroverGapLawAndLocation) {
  for (int n = 4; n <= 12; ++n) {
    GapCurve c = gap_sweep(build_grover(n, 1), uniform_grid(201));
    EXPECT_NEAR(c.min_gap / std::pow(2.0, -0.5 * n), 1.0, 0.01) << "n=" << n;
    EXPECT_NEAR(c.g_star, 0.5, 1.0 / 200) << "n=" << n;
  }
}

TEST(GapSweep, IsingEvenSectorInverseLinear) {
  std::vector<double> scaled;
  for (int n : {6, 8, 10, 12}) scaled.push_back(n * min_gap(build_ising(n), 101, Space::flip_even(n)));
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LE(*hi / *lo, 1.3);
}

TEST(GapSweep, HybridClosesFasterThanIsing) {
  auto even = [](int n) { return Space::flip_even(n); };
  const double hybrid10 = min_gap(build_hybrid(10), 101, even(10));
  const double ising10 = min_gap(build_ising(10), 101, even(10));
  EXPECT_LT(hybrid10, ising10);
  const double hr = min_gap(build_hybrid(12), 101, even(12)) / min_gap(build_hybrid(6), 101, even(6));
  const double ir = min_gap(build_ising(12), 101, even(12)) / min_gap(build_ising(6), 101, even(6));
  EXPECT_LT(hr, ir);
}

TEST(GapSweep, EndpointGroundEnergies) {
  auto at = [](const InterpolatedOperator& p, double g) { return lowest_eigs(interpolate(p, g), 2).values[0]; };
  EXPECT_NEAR(at(build_grover(7, 3), 0.0), 0.0, 1e-10);
  EXPECT_NEAR(at(build_grover(7, 3), 1.0), 0.0, 1e-10);
  EXPECT_NEAR(at(build_ising(7), 0.0), -7.0, 1e-10);
  EXPECT_NEAR(at(build_ising(7), 1.0), -7.0, 1e-10);
  Ec3Instance inst = generate(9, 2, false);
  EXPECT_NEAR(at(build_conventional(inst), 0.0), 0.0, 1e-10);
  EXPECT_NEAR(at(build_conventional(inst), 1.0), 0.0, 1e-10);
  const int k = hamming_weight(*inst.solution);
  for (auto pair : {build_xy_ec3(inst, Space::sector(9, k)), build_heisenberg_ec3(inst, Space::sector(9, k))}) {
    EXPECT_NEAR(at(pair, 0.0), lowest_eigs(pair.h_in, 1, dense).values[0], 1e-9);
    EXPECT_NEAR(at(pair, 1.0), 0.0, 1e-9);
  }
}

TEST(GapSweep, RejectsBadGrid) {
  auto pair = build_grover(3, 0);
  std::vector<double> bad = {0.0, 0.5, 0.4};
  EXPECT_THROW(gap_sweep(pair, bad), ValidationError);
  std::vector<double> out = {0.0, 1.5};
  EXPECT_THROW(gap_sweep(pair, out), ValidationError);
}

TEST(OrderParameter, GroverAtZero) {
  for (int n : {3, 6, 9}) {
    std::vector<double> grid = {0.0};
    auto c = order_parameter(build_grover(n, 2), grid);
    EXPECT_NEAR(c[0].value, 1.0 - std::ldexp(1.0, -n), 1e-10);
    EXPECT_FALSE(c[0].degenerate);
  }
}

TEST(OrderParameter, EqualsDerivativeOfGroundEnergy) {
  Ec3Instance inst = generate(8, 3, false);
  const int k = hamming_weight(*inst.solution);
  std::vector<std::pair<InterpolatedOperator, std::optional<Space>>> cases = {
      {build_ising(8), Space::flip_even(8)},
      {build_grover(6, 4), std::nullopt},
      {build_xy_ec3(inst, Space::full(8)), Space::sector(8, k)}};
  for (const auto& [pair, sector] : cases) {
    SweepOptions opt;
    opt.sector = sector;
    std::vector<double> grid;
    for (int i = 1; i < 20; ++i) grid.push_back(i / 20.0);
    auto c = order_parameter(pair, grid, opt);
    const auto restricted = sector ? restrict(pair, *sector) : pair;
    const double h = 1e-5;
    for (const CurvePoint& p : c) {
      if (p.degenerate) continue;
      const double e_plus = lowest_eigs(interpolate(restricted, p.g + h), 1).values[0];
      const double e_minus = lowest_eigs(interpolate(restricted, p.g - h), 1).values[0];
      EXPECT_NEAR(p.value, (e_plus - e_minus) / (2 * h), 1e-4) << "g=" << p.g;
    }
  }
}

TEST(OrderParameter, GroverSteepestAtCriticalPoint) {
  auto grid = uniform_grid(201);
  auto c = order_parameter(build_grover(10, 0), grid);
  double best = 0.0;
  double where = -1.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double slope = std::abs(c[i + 1].value - c[i].value) / (c[i + 1].g - c[i].g);
    if (slope > best) {
      best = slope;
      where = 0.5 * (c[i].g + c[i + 1].g);
    }
  }
  EXPECT_NEAR(where, 0.5, 1.0 / 200);
}

TEST(OrderParameter, FlagsDegeneratePoints) {
  std::vector<double> grid = {0.5, 1.0};
  auto c = order_parameter(build_ising(6), grid);
  EXPECT_FALSE(c[0].degenerate);
  EXPECT_TRUE(c[1].degenerate);
}

TEST(Diagnostic, ConstantPairIsZero) {
  Operator h = interpolate(build_ising(5), 0.3);
  auto d = adiabatic_diagnostic(make_interpolation(h, h), uniform_grid(11), 2);
  for (const DiagnosticPoint& p : d)
    for (double v : p.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Diagnostic, GroverMaximumTracksMinimalRuntime) {
  auto d = adiabatic_diagnostic(build_grover(6, 0), uniform_grid(201), 1);
  double peak = 0.0;
  for (const DiagnosticPoint& p : d) peak = std::max(peak, p.max_value());
  RuntimeResult r = min_runtime(make_problem({Scheme::grover, 6, 0, nullptr}));
  ASSERT_EQ(r.status, RunStatus::ok);
  const double ratio = peak / r.t_min;
  RecordProperty("diagnostic_peak", std::to_string(peak));
  RecordProperty("t_min", std::to_string(r.t_min));
  EXPECT_GE(ratio, 1.0 / 3);
  EXPECT_LE(ratio, 3.0) << "peak " << peak << " vs T_min " << r.t_min;
}

TEST(Diagnostic, IsingPeakAtGapMinimum) {
  const auto grid = uniform_grid(201);
  SweepOptions opt;
  opt.sector = Space::flip_even(8);
  opt.refine = false;
  GapCurve gap = gap_sweep(build_ising(8), grid, opt);
  auto d = adiabatic_diagnostic(build_ising(8), grid, 1, opt);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i].max_value() > d[arg].max_value()) arg = i;
  EXPECT_NEAR(d[arg].g, gap.g_star, 2.0 / 200 + 1e-12);
}

TEST(CurveFiles, Headers) {
  GapCurve c = gap_sweep(build_grover(3, 0), uniform_grid(3), {.levels = 3});
  std::ostringstream os;
  write_gap_csv(os, c);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "g,E0,E1,E2");
  std::ostringstream o2;
  std::vector<double> grid = {0.0, 1.0};
  auto op = order_parameter(build_ising(4), grid);
  write_curve_csv(o2, std::span<const CurvePoint>(op));
  EXPECT_EQ(o2.str().substr(0, o2.str().find('\n')), "g,value,flag");
  EXPECT_NE(o2.str().find("\n1,"), std::string::npos);
  EXPECT_EQ(o2.str().back(), '\n');
}
