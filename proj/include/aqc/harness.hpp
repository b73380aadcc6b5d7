#pragma once

// Batch experiments: configuration, per-run records, resumable execution over
// (n, instance, scheme) and the median/CI summary.
//
// Output directory layout:
//   config.json
//   instances/n<N>/<id>.json          generated instances
//   records/n<N>/<scheme>/<id>.json   one single-line record per run
//   summary.csv, fig3.csv             derived, always recomputable
//
// Every file is written to a temporary name and renamed into place, so an
// interrupted batch loses at most the runs in flight.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aqc/evolve.hpp"
#include "aqc/instances.hpp"
#include "aqc/spectra.hpp"
#include "aqc/stats.hpp"

namespace aqc {

namespace fs = std::filesystem;

inline constexpr const char* threads_env_var = "AQC_THREADS";

struct ExperimentConfig {
  std::vector<Scheme> schemes;
  std::vector<int> ns;
  int instances = 100;
  bool hard_only = false;
  double target_fidelity = 0.125;
  std::uint64_t seed = 1;
  SpaceMode mode = SpaceMode::sector;
  /// Account for trying sectors in order of |k - n/3| instead of using the
  /// solution's sector directly.
  bool delta_scan = false;
  /// 0 = AQC_THREADS, else hardware concurrency.
  int threads = 0;
  std::string out_dir = "results";
  double t_start = 1.0;
  double t_max = 1048576.0;
  double rel_width = 0.05;
  double step_factor = 2.0;
  double norm_tolerance = 1e-6;
  std::uint64_t max_restarts = 10'000'000;
};

inline void validate(const ExperimentConfig& c) {
  if (c.schemes.empty()) throw ValidationError("config: no schemes given");
  for (Scheme s : c.schemes)
    if (!needs_instance(s))
      throw ValidationError("config: scheme " + std::string(scheme_name(s)) +
                            " is not an exact cover-3 scheme; experiments run conventional, "
                            "heisenberg_ec3 and xy_ec3");
  if (c.ns.empty()) throw ValidationError("config: no qubit counts given");
  for (int n : c.ns)
    if (n < 4 || n > max_generate_qubits)
      throw ValidationError("config: n=" + std::to_string(n) + " outside [4, " +
                            std::to_string(max_generate_qubits) + "]");
  if (c.instances < 1) throw ValidationError("config: instances must be positive");
  if (!(c.target_fidelity >= 0.0 && c.target_fidelity <= 1.0))
    throw ValidationError("config: fidelity must lie in [0, 1]");
  if (!(c.t_start > 0.0 && c.t_max >= c.t_start))
    throw ValidationError("config: need 0 < t_start <= t_max");
  if (!(c.rel_width > 0.0 && c.rel_width < 1.0))
    throw ValidationError("config: rel_width must lie in (0, 1)");
  if (!(c.step_factor > 0.0)) throw ValidationError("config: step_factor must be positive");
  if (!(c.norm_tolerance > 0.0)) throw ValidationError("config: norm_tolerance must be positive");
  if (c.threads < 0) throw ValidationError("config: threads must be non-negative");
  if (c.out_dir.empty()) throw ValidationError("config: output directory not set");
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(threads_env_var)) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  std::vector<std::string> schemes;
  for (Scheme s : c.schemes) schemes.emplace_back(scheme_name(s));
  j["schemes"] = schemes;
  j["n"] = c.ns;
  j["instances"] = c.instances;
  j["hard_only"] = c.hard_only;
  j["fidelity"] = c.target_fidelity;
  j["seed"] = c.seed;
  j["sector"] = c.mode == SpaceMode::sector;
  j["delta_scan"] = c.delta_scan;
  j["threads"] = c.threads;
  j["out"] = c.out_dir;
  j["t_start"] = c.t_start;
  j["t_max"] = c.t_max;
  j["rel_width"] = c.rel_width;
  j["step_factor"] = c.step_factor;
  j["norm_tolerance"] = c.norm_tolerance;
  j["max_restarts"] = c.max_restarts;
  return j;
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are rejected.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "schemes",  "n",     "instances", "hard_only", "fidelity",  "seed",
      "sector",   "delta_scan", "threads", "out",    "t_start",   "t_max",
      "rel_width", "step_factor", "norm_tolerance", "max_restarts"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ValidationError("config: unknown key '" + it.key() + "'");
  try {
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("n")) {
      const auto& jn = j.at("n");
      c.ns = jn.is_array() ? jn.get<std::vector<int>>() : std::vector<int>{jn.get<int>()};
    }
    if (j.contains("instances")) c.instances = j.at("instances").get<int>();
    if (j.contains("hard_only")) c.hard_only = j.at("hard_only").get<bool>();
    if (j.contains("fidelity")) c.target_fidelity = j.at("fidelity").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sector")) c.mode = j.at("sector").get<bool>() ? SpaceMode::sector : SpaceMode::full;
    if (j.contains("delta_scan")) c.delta_scan = j.at("delta_scan").get<bool>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("t_start")) c.t_start = j.at("t_start").get<double>();
    if (j.contains("t_max")) c.t_max = j.at("t_max").get<double>();
    if (j.contains("rel_width")) c.rel_width = j.at("rel_width").get<double>();
    if (j.contains("step_factor")) c.step_factor = j.at("step_factor").get<double>();
    if (j.contains("norm_tolerance")) c.norm_tolerance = j.at("norm_tolerance").get<double>();
    if (j.contains("max_restarts")) c.max_restarts = j.at("max_restarts").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  ExperimentConfig c;
  apply_json(c, j);
  return c;
}

/// Seed of instance slot `slot` at qubit count n; distinct per slot.
inline std::uint64_t instance_seed(std::uint64_t base, int n, int slot) {
  return derive_seed(base, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(slot));
}

// ---------------------------------------------------------------------------
// Records

struct RunRecord {
  int n = 0;
  std::string instance_id;
  std::uint64_t seed = 0;
  int m = 0;
  std::string scheme;
  int delta = 0;
  int k = -1;
  double t_min = std::numeric_limits<double>::quiet_NaN();
  double fidelity = 0.0;
  double norm_drift = std::numeric_limits<double>::quiet_NaN();
  double total_z_drift = std::numeric_limits<double>::quiet_NaN();
  double wall_time = 0.0;
  std::uint64_t steps = 0;
  RunStatus status = RunStatus::failed;
  /// Sectors tried before the right one, inclusive (delta scan only).
  int sectors_tried = 1;
  std::string message;
  std::vector<Probe> trace;
};

namespace detail {

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["instance_id"] = r.instance_id;
  j["seed"] = r.seed;
  j["m"] = r.m;
  j["scheme"] = r.scheme;
  j["delta"] = r.delta;
  j["k"] = r.k;
  j["t_min"] = detail::number_or_null(r.t_min);
  j["fidelity"] = r.fidelity;
  j["norm_drift"] = detail::number_or_null(r.norm_drift);
  j["total_z_drift"] = detail::number_or_null(r.total_z_drift);
  j["wall_time"] = r.wall_time;
  j["steps"] = r.steps;
  j["status"] = std::string(status_name(r.status));
  j["sectors_tried"] = r.sectors_tried;
  j["message"] = r.message;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const Probe& p : r.trace)
    trace.push_back({p.runtime, p.fidelity, detail::number_or_null(p.norm_drift), p.steps, p.failed});
  j["trace"] = trace;
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.n = j.at("n").get<int>();
  r.instance_id = j.at("instance_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.m = j.at("m").get<int>();
  r.scheme = j.at("scheme").get<std::string>();
  r.delta = j.at("delta").get<int>();
  r.k = j.at("k").get<int>();
  r.t_min = detail::number_or_nan(j.at("t_min"));
  r.fidelity = j.at("fidelity").get<double>();
  r.norm_drift = detail::number_or_nan(j.at("norm_drift"));
  r.total_z_drift = detail::number_or_nan(j.at("total_z_drift"));
  r.wall_time = j.at("wall_time").get<double>();
  r.steps = j.at("steps").get<std::uint64_t>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.sectors_tried = j.at("sectors_tried").get<int>();
  r.message = j.at("message").get<std::string>();
  for (const auto& p : j.at("trace"))
    r.trace.push_back({p.at(0).get<double>(), p.at(1).get<double>(), detail::number_or_nan(p.at(2)),
                       p.at(3).get<std::uint64_t>(), p.at(4).get<bool>()});
  return r;
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << "." << counter.fetch_add(1);
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline fs::path instance_path(const fs::path& dir, int n, const std::string& id) {
  return dir / "instances" / ("n" + std::to_string(n)) / (id + ".json");
}

inline fs::path record_path(const fs::path& dir, int n, std::string_view scheme,
                            const std::string& id) {
  return dir / "records" / ("n" + std::to_string(n)) / std::string(scheme) / (id + ".json");
}

inline RunRecord read_record(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  try {
    return record_from_json(nlohmann::json::parse(line));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// All records below dir/records, sorted by (n, scheme, instance id).
inline std::vector<RunRecord> read_records(const fs::path& dir) {
  std::vector<RunRecord> out;
  const fs::path root = dir / "records";
  if (!fs::exists(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    out.push_back(read_record(entry.path()));
  }
  std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.n, a.scheme, a.instance_id) < std::tie(b.n, b.scheme, b.instance_id);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Running

inline SearchConfig search_config(const ExperimentConfig& c) {
  SearchConfig s;
  s.target_fidelity = c.target_fidelity;
  s.t_start = c.t_start;
  s.t_max = c.t_max;
  s.rel_width = c.rel_width;
  s.evolve.step_factor = c.step_factor;
  s.evolve.norm_tolerance = c.norm_tolerance;
  return s;
}

/// One (instance, scheme) run; failures are reported in the record.
inline RunRecord run_single(const Ec3Instance& inst, Scheme scheme, const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.n = inst.n;
  rec.instance_id = inst.id();
  rec.seed = inst.seed;
  rec.m = inst.m();
  rec.scheme = std::string(scheme_name(scheme));
  try {
    auto shared = std::make_shared<const Ec3Instance>(inst);
    AdiabaticProblem problem = make_problem({scheme, inst.n, 0, shared}, c.mode);
    if (problem.sector) {
      rec.delta = problem.sector->delta;
      rec.k = problem.sector->k;
      if (c.delta_scan) {
        const auto order = delta_candidates(inst.n);
        rec.sectors_tried = 1 + static_cast<int>(std::find(order.begin(), order.end(), *problem.sector) -
                                                 order.begin());
      }
    } else if (inst.solution) {
      rec.k = hamming_weight(*inst.solution);
      rec.delta = inst.n - 2 * rec.k;
    }
    RuntimeResult rr = min_runtime(problem, search_config(c));
    rec.status = rr.status;
    rec.t_min = rr.t_min;
    rec.fidelity = rr.fidelity;
    rec.trace = rr.trace;
    rec.message = rr.message;
    if (rr.result) {
      rec.norm_drift = rr.result->norm_drift;
      rec.total_z_drift = rr.result->total_z_drift;
      rec.steps = rr.result->steps;
    }
  } catch (const std::exception& e) {
    rec.status = RunStatus::failed;
    rec.message = e.what();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Runs fn(i) for i in [0, count) on `threads` workers pulling from a shared
/// counter.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (t == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int i = 0; i < t; ++i) pool.emplace_back(worker);
}

struct ExperimentReport {
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::size_t generation_failures = 0;
};

/// Generates (or loads) instances and runs every missing (n, slot, scheme)
/// task. Existing records are never recomputed.
inline ExperimentReport run_experiment(const ExperimentConfig& c,
                                       std::ostream* log = nullptr) {
  validate(c);
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);
  write_atomic(dir / "config.json", to_json(c).dump(2) + "\n");
  const int threads = resolve_threads(c.threads);
  std::mutex log_mutex;
  auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    *log << msg << "\n";
  };

  struct Slot {
    int n;
    int slot;
    std::uint64_t seed;
    std::optional<Ec3Instance> instance;
    std::string error;
  };
  std::vector<Slot> slots;
  for (int n : c.ns)
    for (int i = 0; i < c.instances; ++i) slots.push_back({n, i, instance_seed(c.seed, n, i), {}, {}});

  parallel_for(slots.size(), threads, [&](std::size_t i) {
    Slot& s = slots[i];
    Ec3Instance probe;
    probe.n = s.n;
    probe.seed = s.seed;
    const fs::path path = instance_path(dir, s.n, probe.id());
    try {
      if (fs::exists(path)) {
        s.instance = load(path.string());
      } else {
        s.instance = generate(s.n, s.seed, c.hard_only, c.max_restarts);
        write_atomic(path, serialize(*s.instance));
        say("generated " + s.instance->id() + " m=" + std::to_string(s.instance->m()));
      }
    } catch (const std::exception& e) {
      s.error = e.what();
      say("instance " + probe.id() + " failed: " + s.error);
    }
  });

  struct Task {
    std::size_t slot;
    Scheme scheme;
  };
  std::vector<Task> tasks;
  ExperimentReport report;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].error.empty()) ++report.generation_failures;
    for (Scheme sc : c.schemes) {
      Ec3Instance probe;
      probe.n = slots[i].n;
      probe.seed = slots[i].seed;
      if (fs::exists(record_path(dir, slots[i].n, scheme_name(sc), probe.id())))
        ++report.skipped;
      else
        tasks.push_back({i, sc});
    }
  }

  std::atomic<std::size_t> done{0};
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const Slot& s = slots[tasks[t].slot];
    RunRecord rec;
    if (s.instance) {
      rec = run_single(*s.instance, tasks[t].scheme, c);
    } else {
      Ec3Instance probe;
      probe.n = s.n;
      probe.seed = s.seed;
      rec.n = s.n;
      rec.instance_id = probe.id();
      rec.seed = s.seed;
      rec.scheme = std::string(scheme_name(tasks[t].scheme));
      rec.status = RunStatus::failed;
      rec.message = "instance generation failed: " + s.error;
    }
    write_atomic(record_path(dir, rec.n, rec.scheme, rec.instance_id), to_json(rec).dump() + "\n");
    const std::size_t k = ++done;
    say("[" + std::to_string(k) + "/" + std::to_string(tasks.size()) + "] n=" +
        std::to_string(rec.n) + " " + rec.scheme + " " + rec.instance_id + " " +
        std::string(status_name(rec.status)) + " T=" + format_number(rec.t_min));
  });
  report.computed = tasks.size();
  return report;
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
  int n = 0;
  std::string scheme;
  std::size_t s = 0;
  std::size_t censored = 0;
  std::size_t failed = 0;
  double median = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  std::size_t lo_rank = 0;
  std::size_t hi_rank = 0;
  double coverage = std::numeric_limits<double>::quiet_NaN();
};

/// Groups records by (n, scheme). Runtime-exceeded runs are censored:
/// excluded from the median and counted. With fewer than six passing runs
/// the CI is left NaN.
inline std::vector<SummaryRow> summarize_records(const std::vector<RunRecord>& records,
                                                 std::ostream* warn = nullptr) {
  std::map<std::pair<int, std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) groups[{r.n, r.scheme}].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.n = key.first;
    row.scheme = key.second;
    std::vector<double> t;
    for (const RunRecord* r : group) {
      if (r->status == RunStatus::ok)
        t.push_back(r->t_min);
      else if (r->status == RunStatus::runtime_exceeded)
        ++row.censored;
      else
        ++row.failed;
    }
    row.s = t.size();
    if (t.empty()) {
      if (warn)
        *warn << "warning: no completed runs for n=" << row.n << " scheme=" << row.scheme
              << "; group skipped\n";
      continue;
    }
    if (t.size() >= min_ci_samples) {
      MedianSummary m = median_ci(t);
      row.median = m.median;
      row.ci_lo = m.lo;
      row.ci_hi = m.hi;
      row.lo_rank = m.lo_rank;
      row.hi_rank = m.hi_rank;
      row.coverage = m.coverage;
    } else {
      std::sort(t.begin(), t.end());
      row.median = median_of_sorted(t);
      if (warn)
        *warn << "warning: n=" << row.n << " scheme=" << row.scheme << " has only " << t.size()
              << " completed runs; no confidence interval\n";
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string fig3_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "n,scheme,median_T,ci_lo,ci_hi,s,censored\n";
  for (const SummaryRow& r : rows)
    os << r.n << "," << r.scheme << "," << format_number(r.median) << ","
       << format_number(r.ci_lo) << "," << format_number(r.ci_hi) << "," << r.s << ","
       << r.censored << "\n";
  return os.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "n,scheme,s,censored,failed,median_T,ci_lo,ci_hi,lo_rank,hi_rank,coverage\n";
  for (const SummaryRow& r : rows)
    os << r.n << "," << r.scheme << "," << r.s << "," << r.censored << "," << r.failed << ","
       << format_number(r.median) << "," << format_number(r.ci_lo) << ","
       << format_number(r.ci_hi) << "," << r.lo_rank << "," << r.hi_rank << ","
       << format_number(r.coverage) << "\n";
  return os.str();
}

/// Reads all records in `dir`, writes summary.csv and fig3.csv there.
inline std::vector<SummaryRow> summarize(const fs::path& dir, std::ostream* warn = nullptr) {
  if (!fs::exists(dir / "records"))
    throw Error("summarize: " + (dir / "records").string() + " does not exist");
  std::vector<SummaryRow> rows = summarize_records(read_records(dir), warn);
  write_atomic(dir / "summary.csv", summary_csv(rows));
  write_atomic(dir / "fig3.csv", fig3_csv(rows));
  return rows;
}

}  // namespace aqc
