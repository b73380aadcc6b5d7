// Grover search as an adiabatic sweep: minimum gap and runtime for small n.

#include <cmath>
#include <cstdio>

#include "aqc/evolve.hpp"
#include "aqc/spectra.hpp"

int main() {
  using namespace aqc;
  std::printf("%3s %12s %12s %10s\n", "n", "min_gap", "2^(-n/2)", "T_min");
  for (int n = 2; n <= 8; n += 2) {
    const auto pair = build_grover(n, 0);
    const auto grid = uniform_grid(101);
    GapCurve curve = gap_sweep(pair, grid);
    AdiabaticProblem problem = make_problem({Scheme::grover, n, 0, nullptr});
    RuntimeResult r = min_runtime(problem);
    std::printf("%3d %12.6g %12.6g %10.4g\n", n, curve.min_gap, std::pow(2.0, -0.5 * n), r.t_min);
  }
}
