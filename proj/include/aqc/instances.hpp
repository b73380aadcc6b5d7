#pragma once

// Exact cover-3 instances: model, brute-force oracles, unique-solution
// generation and the on-disk text format.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqc/bits.hpp"
#include "aqc/rng.hpp"

namespace aqc {

/// Three distinct 1-based qubits, sorted ascending. Satisfied iff exactly one
/// of the three bits is 1.
struct Clause {
  int a = 0;
  int b = 0;
  int c = 0;

  auto operator<=>(const Clause&) const = default;

  bool contains(int q) const { return q == a || q == b || q == c; }
  basis_t mask() const { return qubit_mask(a) | qubit_mask(b) | qubit_mask(c); }
  int ones(basis_t x) const { return bit_value(x, a) + bit_value(x, b) + bit_value(x, c); }
  bool satisfied_by(basis_t x) const { return ones(x) == 1; }
};

inline Clause make_clause(int a, int b, int c) {
  int v[3] = {a, b, c};
  std::sort(v, v + 3);
  if (v[0] == v[1] || v[1] == v[2])
    throw ValidationError("clause (" + std::to_string(a) + "," + std::to_string(b) + "," +
                          std::to_string(c) + ") repeats a qubit");
  return Clause{v[0], v[1], v[2]};
}

/// round(2n/3); 2n/3 is never a half-integer.
constexpr int hard_clause_limit(int n) { return (2 * n + 1) / 3; }

struct Ec3Instance {
  int n = 0;
  std::vector<Clause> clauses;
  std::optional<basis_t> solution;
  std::uint64_t seed = 0;
  bool hard = false;

  int m() const { return static_cast<int>(clauses.size()); }
  std::string id() const { return "n" + std::to_string(n) + "-s" + std::to_string(seed); }

  bool operator==(const Ec3Instance&) const = default;
};

inline void check_instance_shape(const Ec3Instance& inst) {
  if (inst.n < 3 || inst.n > max_sector_qubits)
    throw ValidationError("instance: n=" + std::to_string(inst.n) + " outside [3, " +
                          std::to_string(max_sector_qubits) + "]");
  std::set<Clause> seen;
  for (std::size_t i = 0; i < inst.clauses.size(); ++i) {
    const Clause& c = inst.clauses[i];
    const std::string where = "clause " + std::to_string(i);
    if (!(c.a < c.b && c.b < c.c))
      throw ValidationError(where + ": indices must be distinct and sorted ascending");
    if (c.a < 1 || c.c > inst.n)
      throw ValidationError(where + ": index outside [1, " + std::to_string(inst.n) + "]");
    if (!seen.insert(c).second) throw ValidationError(where + ": duplicate clause");
  }
}

inline bool is_satisfied(const Ec3Instance& inst, basis_t assignment) {
  if (assignment > all_ones(inst.n))
    throw ValidationError("assignment " + std::to_string(assignment) + " has more than n=" +
                          std::to_string(inst.n) + " bits");
  return std::all_of(inst.clauses.begin(), inst.clauses.end(),
                     [&](const Clause& c) { return c.satisfied_by(assignment); });
}

/// Assignment given as a '0'/'1' string with qubit 1 first.
inline bool is_satisfied(const Ec3Instance& inst, const std::string& assignment) {
  if (static_cast<int>(assignment.size()) != inst.n)
    throw ValidationError("assignment has length " + std::to_string(assignment.size()) +
                          ", instance has n=" + std::to_string(inst.n));
  return is_satisfied(inst, from_assignment_string(assignment));
}

inline constexpr int max_count_qubits = 30;

/// Number of satisfying assignments by depth-first enumeration over qubits
/// 1..n, pruning as soon as a clause has two ones or is complete without one.
inline std::uint64_t count_solutions(const Ec3Instance& inst) {
  const int n = inst.n;
  if (n > max_count_qubits)
    throw ValidationError("count_solutions: n=" + std::to_string(n) +
                          " exceeds the brute-force budget of " +
                          std::to_string(max_count_qubits));
  if (n < 1) return 0;
  // clauses touching each qubit, and clauses completed at each qubit
  std::vector<std::vector<Clause>> touching(static_cast<std::size_t>(n) + 1);
  std::vector<std::vector<Clause>> closing(static_cast<std::size_t>(n) + 1);
  for (const Clause& c : inst.clauses) {
    touching[c.a].push_back(c);
    touching[c.b].push_back(c);
    touching[c.c].push_back(c);
    closing[c.c].push_back(c);
  }
  std::uint64_t count = 0;
  auto visit = [&](auto&& self, int q, basis_t x) -> void {
    if (q > n) {
      ++count;
      return;
    }
    for (basis_t bit : {basis_t{0}, qubit_mask(q)}) {
      const basis_t y = x | bit;
      const basis_t assigned = all_ones(q);
      bool ok = true;
      for (const Clause& c : touching[q]) {
        if (c.ones(y & assigned) > 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (const Clause& c : closing[q]) {
          if (c.ones(y) != 1) {
            ok = false;
            break;
          }
        }
      }
      if (ok) self(self, q + 1, y);
    }
  };
  visit(visit, 1, 0);
  return count;
}

/// Co-occurrence counts. pair(a,b) = clauses containing both a and b (a != b);
/// count(a) = clauses containing a. Indices are 1-based.
struct CouplingData {
  int n = 0;
  std::vector<int> pairs;   // n*n, row-major, zero diagonal
  std::vector<int> counts;  // n

  int pair(int a, int b) const { return pairs[static_cast<std::size_t>((a - 1) * n + (b - 1))]; }
  int count(int a) const { return counts[static_cast<std::size_t>(a - 1)]; }
};

inline CouplingData coupling_data(const Ec3Instance& inst) {
  CouplingData d;
  d.n = inst.n;
  d.pairs.assign(static_cast<std::size_t>(inst.n) * inst.n, 0);
  d.counts.assign(static_cast<std::size_t>(inst.n), 0);
  auto bump = [&](int a, int b) {
    ++d.pairs[static_cast<std::size_t>((a - 1) * inst.n + (b - 1))];
    ++d.pairs[static_cast<std::size_t>((b - 1) * inst.n + (a - 1))];
  };
  for (const Clause& c : inst.clauses) {
    bump(c.a, c.b);
    bump(c.a, c.c);
    bump(c.b, c.c);
    ++d.counts[c.a - 1];
    ++d.counts[c.b - 1];
    ++d.counts[c.c - 1];
  }
  return d;
}

struct GenerationStats {
  std::uint64_t attempts = 0;
  std::uint64_t exhausted = 0;     // ran out of triples before uniqueness
  std::uint64_t over_limit = 0;    // discarded by the clause-count filter
  std::uint64_t triples_drawn = 0;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, GenerationStats stats)
      : Error(what), stats_(stats) {}
  const GenerationStats& stats() const { return stats_; }

 private:
  GenerationStats stats_;
};

inline constexpr int max_generate_qubits = 24;

/// Random exact cover-3 instance with a unique satisfying assignment.
///
/// Clauses are drawn one at a time as uniformly random unseen triples. A
/// clause is kept iff the number of satisfying assignments stays >= 1 and
/// strictly decreases. A rejected triple can never become useful later (the
/// satisfying set only shrinks), so an attempt restarts from scratch once all
/// triples are drawn. With hard_only, an attempt is abandoned as soon as it
/// would need more than round(2n/3) clauses; that yields the same accepted
/// instances as generating to completion and discarding.
inline Ec3Instance generate(int n, std::uint64_t seed, bool hard_only,
                            std::uint64_t max_restarts = 1'000'000,
                            GenerationStats* stats_out = nullptr) {
  if (n < 4 || n > max_generate_qubits)
    throw ValidationError("generate: n=" + std::to_string(n) + " outside [4, " +
                          std::to_string(max_generate_qubits) + "]");
  Rng rng(seed);
  std::vector<Clause> triples;
  triples.reserve(static_cast<std::size_t>(binomial(n, 3)));
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c) triples.push_back({a, b, c});

  const int limit = hard_clause_limit(n);
  GenerationStats stats;
  std::vector<basis_t> sat;
  std::vector<basis_t> next;
  std::vector<Clause> kept;

  while (stats.attempts <= max_restarts) {
    ++stats.attempts;
    sat.resize(std::size_t{1} << n);
    for (std::size_t x = 0; x < sat.size(); ++x) sat[x] = x;
    kept.clear();
    bool abandoned = false;

    for (std::size_t i = 0; i < triples.size() && sat.size() > 1; ++i) {
      // partial Fisher-Yates: triples[i] becomes a uniform pick among the unseen
      std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, triples.size() - i));
      std::swap(triples[i], triples[j]);
      ++stats.triples_drawn;
      const Clause& c = triples[i];
      next.clear();
      for (basis_t x : sat)
        if (c.satisfied_by(x)) next.push_back(x);
      if (next.empty() || next.size() == sat.size()) continue;
      if (hard_only && static_cast<int>(kept.size()) == limit) {
        abandoned = true;
        break;
      }
      kept.push_back(c);
      sat.swap(next);
    }

    if (sat.size() == 1 && !abandoned) {
      Ec3Instance inst;
      inst.n = n;
      inst.clauses = kept;
      std::sort(inst.clauses.begin(), inst.clauses.end());
      inst.solution = sat.front();
      inst.seed = seed;
      inst.hard = hard_only;
      if (stats_out) *stats_out = stats;
      return inst;
    }
    if (abandoned)
      ++stats.over_limit;
    else
      ++stats.exhausted;
  }
  if (stats_out) *stats_out = stats;
  throw GenerationError("generate: no unique-solution instance for n=" + std::to_string(n) +
                            " after " + std::to_string(stats.attempts) + " attempts (" +
                            std::to_string(stats.exhausted) + " exhausted, " +
                            std::to_string(stats.over_limit) + " over the clause limit)",
                        stats);
}

// ---------------------------------------------------------------------------
// Instance files

inline std::string serialize(const Ec3Instance& inst) {
  std::vector<Clause> sorted = inst.clauses;
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream os;
  os << "{\n";
  os << "  \"n\": " << inst.n << ",\n";
  os << "  \"m\": " << sorted.size() << ",\n";
  os << "  \"clauses\": [";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    os << (i ? ", " : "") << "[" << sorted[i].a << ", " << sorted[i].b << ", " << sorted[i].c
       << "]";
  }
  os << "],\n";
  if (inst.solution)
    os << "  \"solution\": \"" << to_assignment_string(*inst.solution, inst.n) << "\",\n";
  else
    os << "  \"solution\": null,\n";
  os << "  \"seed\": " << inst.seed << ",\n";
  os << "  \"hard\": " << (inst.hard ? "true" : "false") << "\n";
  os << "}\n";
  return os.str();
}

inline Ec3Instance parse_instance(const std::string& text, const std::string& source = "<text>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  auto field_error = [&](const std::string& field, const std::string& msg) {
    return ValidationError(source + ": field '" + field + "': " + msg);
  };
  if (!j.is_object()) throw ParseError(source + ": expected a JSON object at top level");
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw field_error(key, "missing");
    return j.at(key);
  };

  Ec3Instance inst;
  const auto& jn = need("n");
  if (!jn.is_number_integer()) throw field_error("n", "expected an integer");
  inst.n = jn.get<int>();
  if (inst.n < 3 || inst.n > max_sector_qubits)
    throw field_error("n", "value " + std::to_string(inst.n) + " outside [3, " +
                               std::to_string(max_sector_qubits) + "]");

  const auto& jc = need("clauses");
  if (!jc.is_array()) throw field_error("clauses", "expected an array");
  std::set<Clause> seen;
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string f = "clauses[" + std::to_string(i) + "]";
    const auto& t = jc[i];
    if (!t.is_array() || t.size() != 3) throw field_error(f, "expected three integers");
    int v[3];
    for (int k = 0; k < 3; ++k) {
      if (!t[k].is_number_integer()) throw field_error(f, "expected three integers");
      v[k] = t[k].get<int>();
      if (v[k] < 1 || v[k] > inst.n)
        throw field_error(f, "qubit index " + std::to_string(v[k]) + " outside [1, " +
                                 std::to_string(inst.n) + "] (indices are 1-based)");
    }
    if (!(v[0] < v[1] && v[1] < v[2]))
      throw field_error(f, "indices must be distinct and sorted ascending");
    Clause c{v[0], v[1], v[2]};
    if (!seen.insert(c).second) throw field_error(f, "duplicate clause");
    inst.clauses.push_back(c);
  }
  std::sort(inst.clauses.begin(), inst.clauses.end());

  const auto& jm = need("m");
  if (!jm.is_number_integer()) throw field_error("m", "expected an integer");
  if (jm.get<long long>() != static_cast<long long>(inst.clauses.size()))
    throw field_error("m", "declares " + std::to_string(jm.get<long long>()) + " clauses, found " +
                               std::to_string(inst.clauses.size()));

  if (j.contains("solution") && !j.at("solution").is_null()) {
    const auto& js = j.at("solution");
    if (!js.is_string()) throw field_error("solution", "expected a string of '0'/'1'");
    const std::string s = js.get<std::string>();
    if (static_cast<int>(s.size()) != inst.n)
      throw field_error("solution", "length " + std::to_string(s.size()) + " != n=" +
                                        std::to_string(inst.n));
    try {
      inst.solution = from_assignment_string(s);
    } catch (const ValidationError& e) {
      throw field_error("solution", e.what());
    }
    if (!is_satisfied(inst, *inst.solution))
      throw field_error("solution", "does not satisfy every clause");
  }

  const auto& jseed = need("seed");
  if (!jseed.is_number_integer()) throw field_error("seed", "expected an integer");
  inst.seed = jseed.get<std::uint64_t>();

  const auto& jh = need("hard");
  if (!jh.is_boolean()) throw field_error("hard", "expected a boolean");
  inst.hard = jh.get<bool>();
  if (inst.hard && inst.m() > hard_clause_limit(inst.n))
    throw field_error("hard", "instance marked hard has m=" + std::to_string(inst.m()) +
                                  " > round(2n/3)=" + std::to_string(hard_clause_limit(inst.n)));
  return inst;
}

inline void save(const Ec3Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << serialize(inst);
  if (!out) throw Error("failed writing " + path);
}

inline Ec3Instance load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path);
}

}  // namespace aqc
