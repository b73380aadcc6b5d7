#pragma once

// Low-lying spectra along g: gap curves, the ground-state order parameter
// <psi0|dH/dg|psi0> and the adiabatic-condition diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "aqc/eigen.hpp"
#include "aqc/hamiltonians.hpp"
#include "aqc/sector.hpp"

namespace aqc {

inline constexpr double degeneracy_tolerance = 1e-10;

/// `points` equally spaced values covering [0, 1].
inline std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

struct GapPoint {
  double g = 0.0;
  std::vector<double> energies;

  double gap() const { return energies.at(1) - energies.at(0); }
};

struct GapCurve {
  std::vector<GapPoint> points;
  double min_gap = std::numeric_limits<double>::infinity();
  double g_star = 0.0;
  /// Extra evaluations made while refining the minimum.
  std::vector<GapPoint> refinement;
};

struct SweepOptions {
  int levels = 2;
  /// Restrict the pair to this space first (sector or flip-even).
  std::optional<Space> sector;
  /// Golden-section refinement of the coarse minimum.
  bool refine = true;
  double refine_tolerance = 1e-8;
  int refine_max_iterations = 60;
  EigenOptions eigen;
};

namespace detail {

inline InterpolatedOperator maybe_restrict(const InterpolatedOperator& pair,
                                           const std::optional<Space>& sector) {
  if (!sector || *sector == pair.space()) return pair;
  return restrict(pair, *sector);
}

inline EigenResult eigs_at(const InterpolatedOperator& pair, double g, int levels,
                           const EigenOptions& opt) {
  try {
    return lowest_eigs(interpolate(pair, g), levels, opt);
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " (at g=" + std::to_string(g) + ")");
  }
}

inline void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("empty g grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw ValidationError("grid value " + std::to_string(grid[i]) + " outside [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ValidationError("grid must be strictly ascending");
  }
}

}  // namespace detail

/// Lowest `levels` eigenvalues at each grid point, the minimum gap E1 - E0 and
/// its location (refined by golden-section search around the coarse minimum).
inline GapCurve gap_sweep(const InterpolatedOperator& full_pair, std::span<const double> grid,
                          const SweepOptions& opt = {}) {
  detail::check_grid(grid);
  if (opt.levels < 2) throw ValidationError("gap_sweep needs at least 2 levels");
  const InterpolatedOperator pair = detail::maybe_restrict(full_pair, opt.sector);

  GapCurve curve;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EigenResult e = detail::eigs_at(pair, grid[i], opt.levels, opt.eigen);
    curve.points.push_back({grid[i], e.values});
    if (curve.points.back().gap() < curve.min_gap) {
      curve.min_gap = curve.points.back().gap();
      curve.g_star = grid[i];
      best = i;
    }
  }
  if (!opt.refine || grid.size() < 3) return curve;

  auto gap_at = [&](double g) {
    EigenResult e = detail::eigs_at(pair, g, opt.levels, opt.eigen);
    curve.refinement.push_back({g, e.values});
    return curve.refinement.back().gap();
  };
  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[best + 1 == grid.size() ? best : best + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = gap_at(x1);
  double f2 = gap_at(x2);
  for (int it = 0; it < opt.refine_max_iterations && hi - lo > opt.refine_tolerance; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = gap_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = gap_at(x2);
    }
  }
  for (const GapPoint& p : curve.refinement) {
    if (p.gap() < curve.min_gap) {
      curve.min_gap = p.gap();
      curve.g_star = p.g;
    }
  }
  return curve;
}

struct CurvePoint {
  double g = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();
  /// Ground state (or the level pair) degenerate within 1e-10.
  bool degenerate = false;
};

/// <psi0(g)| H_out - H_in |psi0(g)>, which equals dE0/dg wherever the ground
/// state is unique.
inline std::vector<CurvePoint> order_parameter(const InterpolatedOperator& full_pair,
                                               std::span<const double> grid,
                                               const SweepOptions& opt = {}) {
  detail::check_grid(grid);
  const InterpolatedOperator pair = detail::maybe_restrict(full_pair, opt.sector);
  const Operator dh = derivative(pair);
  std::vector<CurvePoint> out;
  for (double g : grid) {
    EigenResult e = detail::eigs_at(pair, g, 2, opt.eigen);
    CurvePoint p{g, inner(e.vectors[0], dh.apply(e.vectors[0])).real(),
                 e.values[1] - e.values[0] <= degeneracy_tolerance};
    out.push_back(p);
  }
  return out;
}

struct DiagnosticPoint {
  double g = 0.0;
  /// |<psi0|dH/dg|psi_j>| / (E_j - E0)^2 for j = 1..n_excited; NaN where
  /// the level is degenerate with the ground state.
  std::vector<double> values;
  bool degenerate = false;

  double max_value() const {
    double m = std::numeric_limits<double>::quiet_NaN();
    for (double v : values)
      if (!std::isnan(v) && (std::isnan(m) || v > m)) m = v;
    return m;
  }
};

inline std::vector<DiagnosticPoint> adiabatic_diagnostic(const InterpolatedOperator& full_pair,
                                                         std::span<const double> grid,
                                                         int n_excited,
                                                         const SweepOptions& opt = {}) {
  detail::check_grid(grid);
  if (n_excited < 1) throw ValidationError("adiabatic_diagnostic needs n_excited >= 1");
  const InterpolatedOperator pair = detail::maybe_restrict(full_pair, opt.sector);
  const Operator dh = derivative(pair);
  std::vector<DiagnosticPoint> out;
  for (double g : grid) {
    EigenResult e = detail::eigs_at(pair, g, n_excited + 1, opt.eigen);
    DiagnosticPoint p;
    p.g = g;
    const StateVector dpsi0 = dh.apply(e.vectors[0]);
    for (int j = 1; j <= n_excited; ++j) {
      const double gap = e.values[j] - e.values[0];
      if (gap <= degeneracy_tolerance) {
        p.values.push_back(std::numeric_limits<double>::quiet_NaN());
        p.degenerate = true;
      } else {
        p.values.push_back(std::abs(inner(e.vectors[j], dpsi0)) / (gap * gap));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Header g,E0,...,E{r-1}; one row per grid point.
inline void write_gap_csv(std::ostream& os, const GapCurve& curve) {
  const std::size_t r = curve.points.empty() ? 0 : curve.points.front().energies.size();
  os << "g";
  for (std::size_t k = 0; k < r; ++k) os << ",E" << k;
  os << "\n";
  for (const GapPoint& p : curve.points) {
    os << format_number(p.g);
    for (double e : p.energies) os << "," << format_number(e);
    os << "\n";
  }
}

/// Header g,value,flag; flag is 1 at degenerate points.
inline void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "g,value,flag\n";
  for (const CurvePoint& p : curve)
    os << format_number(p.g) << "," << format_number(p.value) << "," << (p.degenerate ? 1 : 0)
       << "\n";
}

/// Diagnostic curve in the g,value,flag layout, value = max over levels.
inline void write_curve_csv(std::ostream& os, std::span<const DiagnosticPoint> curve) {
  os << "g,value,flag\n";
  for (const DiagnosticPoint& p : curve)
    os << format_number(p.g) << "," << format_number(p.max_value()) << ","
       << (p.degenerate ? 1 : 0) << "\n";
}

}  // namespace aqc
