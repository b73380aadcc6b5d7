// aqc: command-line front end for the simulator.
//
//   aqc gen         --n 9 --instances 10 --seed 3 --hard-only --out inst/
//   aqc min-time    --scheme xy_ec3 --instance inst/n9/n9-s....json
//   aqc gap-sweep   --scheme grover --n 8 --grid 201 --out gap.csv
//   aqc order-param --scheme ising --n 8 --diagnostic 3
//   aqc experiment  --config run.json --threads 8
//   aqc summarize   --out results/

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aqc/harness.hpp"

namespace {

using namespace aqc;

struct ProblemArgs {
  std::string scheme = "xy_ec3";
  int n = 8;
  std::uint64_t seed = 1;
  bool hard_only = false;
  std::string instance_file;
  std::string marked;
  bool sector = true;
};

void add_problem_flags(CLI::App* app, ProblemArgs& a) {
  app->add_option("--scheme", a.scheme, "grover, ising, hybrid, conventional, heisenberg_ec3, xy_ec3")
      ->capture_default_str();
  app->add_option("--n", a.n, "qubit count")->capture_default_str();
  app->add_option("--seed", a.seed, "instance seed when no --instance is given")->capture_default_str();
  app->add_flag("--hard-only", a.hard_only, "generate from the hard subset");
  app->add_option("--instance", a.instance_file, "instance JSON file");
  app->add_option("--marked", a.marked, "grover marked state, qubit 1 first (default all zeros)");
  app->add_flag("--sector,!--full", a.sector, "simulate in the symmetry sector (default) or full space");
}

SchemeSpec make_spec(const ProblemArgs& a) {
  SchemeSpec spec;
  spec.scheme = parse_scheme(a.scheme);
  spec.n = a.n;
  if (needs_instance(spec.scheme)) {
    Ec3Instance inst = a.instance_file.empty() ? generate(a.n, a.seed, a.hard_only) : load(a.instance_file);
    spec.n = inst.n;
    spec.instance = std::make_shared<const Ec3Instance>(std::move(inst));
  } else if (!a.marked.empty()) {
    if (static_cast<int>(a.marked.size()) != a.n)
      throw ValidationError("--marked has " + std::to_string(a.marked.size()) + " bits, expected " +
                            std::to_string(a.n));
    spec.marked = from_assignment_string(a.marked);
  }
  return spec;
}

/// The space a sweep is restricted to in sector mode, if any.
std::optional<Space> sweep_space(const SchemeSpec& spec, bool sector) {
  if (!sector) return std::nullopt;
  switch (spec.scheme) {
    case Scheme::ising:
    case Scheme::hybrid: return Space::flip_even(spec.n);
    case Scheme::heisenberg_ec3:
    case Scheme::xy_ec3: return Space::sector(spec.n, choose_delta(*spec.instance).k);
    default: return std::nullopt;
  }
}

std::vector<double> make_grid(const std::string& text) {
  // "201" or "a:b:points"
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) return uniform_grid(std::stoul(text));
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ValidationError("grid must be N or lo:hi:N");
  const double lo = std::stod(text.substr(0, c1));
  const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const std::size_t points = std::stoul(text.substr(c2 + 1));
  if (points < 2 || !(hi > lo)) throw ValidationError("grid needs hi > lo and at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

template <class Fn>
void write_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free adiabatic quantum algorithm simulator"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate exact cover-3 instances");
  std::vector<int> gen_ns{8};
  int gen_count = 10;
  std::uint64_t gen_seed = 1;
  bool gen_hard = false;
  std::string gen_out = "instances";
  gen->add_option("--n", gen_ns, "qubit counts")->capture_default_str();
  gen->add_option("--instances", gen_count, "instances per n")->capture_default_str();
  gen->add_option("--seed", gen_seed, "base seed")->capture_default_str();
  gen->add_flag("--hard-only", gen_hard, "unique solution with at most round(2n/3) clauses");
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();

  // min-time
  auto* mt = app.add_subcommand("min-time", "minimal runtime reaching the target fidelity");
  ProblemArgs mt_args;
  double mt_fidelity = 0.125;
  double mt_tmax = 1048576.0;
  double mt_step = 0.25;
  add_problem_flags(mt, mt_args);
  mt->add_option("--fidelity", mt_fidelity, "target fidelity")->capture_default_str();
  mt->add_option("--t-max", mt_tmax, "runtime cap")->capture_default_str();
  mt->add_option("--step-factor", mt_step, "step size times spectral half-width")->capture_default_str();

  // gap-sweep
  auto* gs = app.add_subcommand("gap-sweep", "lowest levels along g and the minimum gap");
  ProblemArgs gs_args;
  std::string gs_grid = "201";
  int gs_levels = 2;
  std::string gs_out;
  add_problem_flags(gs, gs_args);
  gs->add_option("--grid", gs_grid, "points, or lo:hi:points")->capture_default_str();
  gs->add_option("--levels", gs_levels, "levels per point")->capture_default_str();
  gs->add_option("--out", gs_out, "CSV file (default stdout)");

  // order-param
  auto* op = app.add_subcommand("order-param", "ground-state order parameter or adiabatic diagnostic");
  ProblemArgs op_args;
  std::string op_grid = "201";
  int op_diag = 0;
  std::string op_out;
  add_problem_flags(op, op_args);
  op->add_option("--grid", op_grid, "points, or lo:hi:points")->capture_default_str();
  op->add_option("--diagnostic", op_diag, "write the adiabatic diagnostic over this many excited levels");
  op->add_option("--out", op_out, "CSV file (default stdout)");

  // experiment
  auto* ex = app.add_subcommand("experiment", "batch minimal-runtime experiment");
  std::string ex_config;
  std::vector<std::string> ex_schemes;
  std::vector<int> ex_ns;
  int ex_instances = 100;
  bool ex_hard = false;
  double ex_fidelity = 0.125;
  std::uint64_t ex_seed = 1;
  bool ex_sector = true;
  bool ex_scan = false;
  int ex_threads = 0;
  std::string ex_out = "results";
  double ex_tmax = 1048576.0;
  ex->add_option("--config", ex_config, "JSON config; flags given here override it");
  ex->add_option("--scheme", ex_schemes, "schemes");
  ex->add_option("--n", ex_ns, "qubit counts");
  ex->add_option("--instances", ex_instances, "instances per n");
  ex->add_flag("--hard-only", ex_hard, "hard subset only");
  ex->add_option("--fidelity", ex_fidelity, "target fidelity");
  ex->add_option("--seed", ex_seed, "base seed");
  ex->add_flag("--sector,!--full", ex_sector, "sector (default) or full-space simulation");
  ex->add_flag("--delta-scan", ex_scan, "record the sector scan cost");
  ex->add_option("--threads", ex_threads, "worker threads (default AQC_THREADS or all cores)");
  ex->add_option("--out", ex_out, "output directory");
  ex->add_option("--t-max", ex_tmax, "runtime cap");

  // summarize
  auto* su = app.add_subcommand("summarize", "median and CI per (n, scheme)");
  std::string su_dir = "results";
  su->add_option("--out", su_dir, "experiment directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      for (int n : gen_ns) {
        for (int i = 0; i < gen_count; ++i) {
          Ec3Instance inst = generate(n, instance_seed(gen_seed, n, i), gen_hard);
          const fs::path path = fs::path(gen_out) / ("n" + std::to_string(n)) / (inst.id() + ".json");
          write_atomic(path, serialize(inst));
          std::cout << path.string() << " m=" << inst.m() << "\n";
        }
      }
    } else if (mt->parsed()) {
      SchemeSpec spec = make_spec(mt_args);
      AdiabaticProblem problem = make_problem(spec, mt_args.sector ? SpaceMode::sector : SpaceMode::full);
      SearchConfig cfg;
      cfg.target_fidelity = mt_fidelity;
      cfg.t_max = mt_tmax;
      cfg.evolve.step_factor = mt_step;
      RuntimeResult r = min_runtime(problem, cfg);
      nlohmann::ordered_json j;
      j["scheme"] = std::string(scheme_name(spec.scheme));
      j["n"] = spec.n;
      if (spec.instance) j["instance_id"] = spec.instance->id();
      if (problem.sector) {
        j["delta"] = problem.sector->delta;
        j["k"] = problem.sector->k;
      }
      j["status"] = std::string(status_name(r.status));
      j["t_min"] = detail::number_or_null(r.t_min);
      j["fidelity"] = r.fidelity;
      if (r.result) {
        j["norm_drift"] = r.result->norm_drift;
        j["total_z_drift"] = detail::number_or_null(r.result->total_z_drift);
        j["steps"] = r.result->steps;
      }
      j["message"] = r.message;
      nlohmann::ordered_json trace = nlohmann::ordered_json::array();
      for (const Probe& p : r.trace) trace.push_back({p.runtime, p.fidelity});
      j["trace"] = trace;
      std::cout << j.dump(2) << "\n";
      return r.status == RunStatus::failed ? 1 : 0;
    } else if (gs->parsed()) {
      SchemeSpec spec = make_spec(gs_args);
      SweepOptions opt;
      opt.levels = gs_levels;
      opt.sector = sweep_space(spec, gs_args.sector);
      const std::vector<double> grid = make_grid(gs_grid);
      GapCurve curve = gap_sweep(build_scheme(spec), grid, opt);
      write_output(gs_out, [&](std::ostream& os) { write_gap_csv(os, curve); });
      std::cerr << "min_gap=" << format_number(curve.min_gap) << " g*=" << format_number(curve.g_star)
                << "\n";
    } else if (op->parsed()) {
      SchemeSpec spec = make_spec(op_args);
      SweepOptions opt;
      opt.sector = sweep_space(spec, op_args.sector);
      const std::vector<double> grid = make_grid(op_grid);
      if (op_diag > 0) {
        auto curve = adiabatic_diagnostic(build_scheme(spec), grid, op_diag, opt);
        write_output(op_out, [&](std::ostream& os) { write_curve_csv(os, std::span<const DiagnosticPoint>(curve)); });
      } else {
        auto curve = order_parameter(build_scheme(spec), grid, opt);
        write_output(op_out, [&](std::ostream& os) { write_curve_csv(os, std::span<const CurvePoint>(curve)); });
      }
    } else if (ex->parsed()) {
      ExperimentConfig cfg;
      if (!ex_config.empty()) cfg = load_config(ex_config);
      if (ex->count("--scheme")) {
        cfg.schemes.clear();
        for (const auto& s : ex_schemes) cfg.schemes.push_back(parse_scheme(s));
      }
      if (ex->count("--n")) cfg.ns = ex_ns;
      if (ex->count("--instances")) cfg.instances = ex_instances;
      if (ex->count("--hard-only")) cfg.hard_only = ex_hard;
      if (ex->count("--fidelity")) cfg.target_fidelity = ex_fidelity;
      if (ex->count("--seed")) cfg.seed = ex_seed;
      if (ex->count("--sector") || ex->count("--full")) cfg.mode = ex_sector ? SpaceMode::sector : SpaceMode::full;
      if (ex->count("--delta-scan")) cfg.delta_scan = ex_scan;
      if (ex->count("--threads")) cfg.threads = ex_threads;
      if (ex->count("--out")) cfg.out_dir = ex_out;
      if (ex->count("--t-max")) cfg.t_max = ex_tmax;
      ExperimentReport rep = run_experiment(cfg, &std::cerr);
      std::cerr << "computed " << rep.computed << ", skipped " << rep.skipped << " existing";
      if (rep.generation_failures) std::cerr << ", " << rep.generation_failures << " generation failures";
      std::cerr << "\n";
      summarize(cfg.out_dir, &std::cerr);
    } else if (su->parsed()) {
      auto rows = summarize(su_dir, &std::cerr);
      std::cout << fig3_csv(rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
