#include <algorithm>
#include <map>

#include "kolmolab/complexity.hpp"
#include "kolmolab/constructions.hpp"
#include "kolmolab/errors.hpp"

namespace kolmolab {

namespace {

std::vector<BitString> columns_of_length(std::uint64_t n) {
  return first_strings_of_length(n, std::uint64_t{1} << n);
}

std::vector<Program> programs_below(std::uint64_t n) {
  std::vector<Program> out;
  for (std::uint64_t i = 0; i + 1 < (std::uint64_t{1} << n); ++i) {
    out.push_back(index_to_string(CanonicalIndex{i}));
  }
  return out;
}

struct Firing {
  Program p;
  GameCase which;
  std::uint64_t column;
  Value value;
};

// The least p ∈ I that satisfies (a) or (b) at budget s; (a) uses the least j.
std::optional<Firing> find_firing(const std::set<Program>& i_set, const std::set<std::uint64_t>& j_set,
                                  const std::vector<BitString>& columns, std::uint64_t s,
                                  MachineOracle& machine) {
  if (j_set.empty()) return std::nullopt;
  for (const auto& p : i_set) {
    bool all_bottom = true;
    for (auto j : j_set) {
      const Value v = value_of(machine.outcome(p, columns[j - 1], s));
      if (is_bit(v)) return Firing{p, GameCase::kA, j, v};
      if (v != Value::kBottom) all_bottom = false;
    }
    if (all_bottom) return Firing{p, GameCase::kB, *j_set.begin(), Value::kBottom};
  }
  return std::nullopt;
}

Json state_json(const HIGameState& g) {
  Json a = Json::array(), i_set = Json::array(), j_set = Json::array();
  for (auto j : g.a) a.push_back(g.columns[j - 1].text());
  for (const auto& p : g.i_set) i_set.push_back(p.text());
  for (auto j : g.j_set) j_set.push_back(j);
  return {{"a", a},     {"i_set", i_set}, {"j_set", j_set},
          {"i", g.i},   {"x_i", g.columns[g.i - 1].text()},
          {"quiescent", g.quiescent},     {"steps", g.log.size()},
          {"decided_at", g.decided_at}};
}

}  // namespace

std::string to_string(ProgramVerdict v) {
  switch (v) {
    case ProgramVerdict::kInconsistentAt:
      return "inconsistent_at_decided_column";
    case ProgramVerdict::kBottomAtI0:
      return "bottom_at_i0";
    case ProgramVerdict::kPendingOnJ:
      return "pending_on_open_column";
    case ProgramVerdict::kValueErrorOnJ:
      return "value_error_on_open_column";
    case ProgramVerdict::kUnexplained:
      break;
  }
  return "unexplained";
}

HIGameState hard_instances_run(std::uint64_t n, std::uint64_t budget, MachineOracle& raw_machine) {
  if (n < 1 || n > 4) throw Error(ErrorKind::kRange, "hard-instances game supports 1 <= n <= 4");
  CheckedMachineOracle machine(raw_machine);

  HIGameState g;
  g.n = n;
  g.budget = budget;
  g.columns = columns_of_length(n);
  const std::uint64_t width = g.columns.size();
  g.decided_at.assign(width, 0);

  // Step 0.
  g.a.insert(1);
  g.i = 1;
  for (const auto& p : programs_below(n)) g.i_set.insert(p);
  for (std::uint64_t j = 2; j <= width; ++j) g.j_set.insert(j);
  g.trace.construction = "hard-instances";
  g.trace.params = {{"n", n}, {"budget", budget}};

  CheckResult balance{"i_j_balance"};
  balance.expect(g.i_set.size() == g.j_set.size(), 0, "|I| != |J| after step 0");

  // Steps s+1 for s < budget, then repeat at s = budget until nothing fires.
  std::uint64_t step = 0;
  for (std::uint64_t s = 0;; s = std::min(s + 1, budget)) {
    const auto fire = find_firing(g.i_set, g.j_set, g.columns, s, machine);
    if (!fire) {
      if (s == budget) break;
      continue;
    }
    ++step;
    GameStep rec;
    rec.step = step;
    rec.p = fire->p;
    rec.which = fire->which;
    rec.column = fire->column;
    g.i_set.erase(fire->p);
    if (fire->which == GameCase::kA) {
      rec.enumerated = fire->value == Value::kZero;
      if (rec.enumerated) g.a.insert(fire->column);
    } else {
      g.i = fire->column;
      rec.enumerated = true;
      g.a.insert(fire->column);
    }
    g.j_set.erase(fire->column);
    g.decided_at[fire->column - 1] = step;
    rec.i_after = g.i;
    rec.i_size = g.i_set.size();
    rec.j_size = g.j_set.size();
    g.log.push_back(rec);
    balance.expect(rec.i_size == rec.j_size, step, "|I| != |J|");
    g.trace.events.push_back({{"step", step},
                              {"budget", s},
                              {"p", fire->p.text()},
                              {"case", fire->which == GameCase::kA ? "a" : "b"},
                              {"column", fire->column},
                              {"x", g.columns[fire->column - 1].text()},
                              {"value", std::string(to_string(fire->value))},
                              {"enumerated", rec.enumerated},
                              {"i", g.i},
                              {"i_size", rec.i_size},
                              {"j_size", rec.j_size}});
  }
  g.quiescent = true;
  g.trace.final_state = state_json(g);

  const auto report = verify_certificate(g, budget);
  g.trace.final_state["certified"] = report.ok;
  g.trace.final_state["verdicts"] = Json::object();
  for (const auto& [p, v] : report.programs) g.trace.final_state["verdicts"][p.text()] = to_string(v);
  g.trace.final_state["ic_below_n"] = report.ic_below_n ? Json(*report.ic_below_n) : Json("inf");
  auto checks = check_hard_instances(g.trace);
  checks.insert(checks.begin(), balance);
  g.trace.checks = checks;
  return g;
}

CertificateReport verify_certificate(const HIGameState& g, std::uint64_t budget) {
  CertificateReport report;
  if (g.i_set.size() != g.j_set.size()) {
    report.failure = "invariant |I| = |J| violated (" + std::to_string(g.i_set.size()) + " vs " +
                     std::to_string(g.j_set.size()) + ")";
    return report;
  }
  VmMachineOracle vm;
  if (find_firing(g.i_set, g.j_set, g.columns, budget, vm)) {
    throw Error(ErrorKind::kPrecondition, "game is not quiescent at budget " + std::to_string(budget));
  }

  std::map<Program, const GameStep*> removed;
  for (const auto& rec : g.log) removed[rec.p] = &rec;
  const BitString& x_i0 = g.columns[g.i - 1];

  report.ok = true;
  for (const auto& p : programs_below(g.n)) {
    ProgramVerdict verdict = ProgramVerdict::kUnexplained;
    if (auto it = removed.find(p); it != removed.end()) {
      const GameStep& rec = *it->second;
      if (rec.which == GameCase::kA) {
        const Value v = value_of(run(p, g.columns[rec.column - 1], budget));
        if (is_bit(v) && (v == Value::kOne) != g.chi(rec.column)) verdict = ProgramVerdict::kInconsistentAt;
      } else if (value_of(run(p, x_i0, budget)) == Value::kBottom) {
        verdict = ProgramVerdict::kBottomAtI0;
      }
    } else if (g.i_set.contains(p)) {
      for (auto j : g.j_set) {
        const Value v = value_of(run(p, g.columns[j - 1], budget));
        if (v == Value::kPending) {
          verdict = ProgramVerdict::kPendingOnJ;
          break;
        }
        if (v == Value::kValueError) verdict = ProgramVerdict::kValueErrorOnJ;
      }
    }
    if (verdict == ProgramVerdict::kUnexplained && report.ok) {
      report.ok = false;
      report.failure = "program '" + p.text() + "' is not ruled out";
    }
    report.programs.emplace_back(p, verdict);
  }

  // Independent cross-check: no program shorter than n is an ic witness for
  // x_{i_0} on the full game window.
  ConsistencyWindow w;
  for (std::uint64_t j = 1; j <= g.columns.size(); ++j) w.insert(g.columns[j - 1], g.chi(j));
  report.ic_below_n = ic_window(x_i0, w, budget, g.n - 1).value;
  if (report.ic_below_n && report.ok) {
    report.ok = false;
    report.failure = "program of length " + std::to_string(*report.ic_below_n) + " decides x_i0";
  }
  if (!g.chi(g.i) && report.ok) {
    report.ok = false;
    report.failure = "x_i0 is not in A";
  }
  return report;
}

std::vector<CheckResult> check_hard_instances(const StageTrace& trace) {
  CheckResult replay{"replay"}, balance{"i_j_balance_replayed"}, immutable{"decided_columns_immutable"},
      probes{"probe_reverification"}, certificate{"certificate"};
  try {
    const auto n = trace.params.at("n").get<std::uint64_t>();
    if (n < 1 || n > 4) throw Error(ErrorKind::kRange, "game trace with n outside 1..4");
    const auto columns = columns_of_length(n);
    std::set<std::string> i_set;
    for (const auto& p : programs_below(n)) i_set.insert(p.text());
    std::set<std::uint64_t> j_set, a{1};
    for (std::uint64_t j = 2; j <= columns.size(); ++j) j_set.insert(j);
    std::uint64_t i = 1;
    std::set<std::uint64_t> decided;
    HIGameState g;
    g.n = n;
    g.columns = columns;
    balance.expect(i_set.size() == j_set.size(), 0, "|I| != |J| after step 0");
    for (const auto& e : trace.events) {
      const auto step = e.at("step").get<std::uint64_t>();
      const auto s = e.at("budget").get<std::uint64_t>();
      const Program p = BitString::from_bits(e.at("p").get<std::string>());
      const auto column = e.at("column").get<std::uint64_t>();
      const bool case_a = e.at("case").get<std::string>() == "a";
      replay.expect(i_set.erase(p.text()) == 1 && j_set.contains(column), step,
                    "step removes a program or column that is not present");
      immutable.expect(!decided.contains(column) && !a.contains(column), step,
                       "column " + std::to_string(column) + " changes after being decided");
      // Re-verify the logged probe.
      const Value v = value_of(run(p, columns.at(column - 1), s));
      if (case_a) {
        probes.expect(is_bit(v) && std::string(to_string(v)) == e.at("value").get<std::string>(), step,
                      "case (a) probe does not re-verify");
        if (v == Value::kZero) a.insert(column);
      } else {
        bool all_bottom = true;
        for (auto j : j_set) all_bottom = all_bottom && value_of(run(p, columns[j - 1], s)) == Value::kBottom;
        probes.expect(all_bottom && column == *j_set.begin(), step, "case (b) probe does not re-verify");
        i = column;
        a.insert(column);
      }
      j_set.erase(column);
      decided.insert(column);
      GameStep rec;
      rec.step = step;
      rec.p = p;
      rec.which = case_a ? GameCase::kA : GameCase::kB;
      rec.column = column;
      g.log.push_back(rec);
      balance.expect(i_set.size() == j_set.size() && e.at("i_size").get<std::size_t>() == i_set.size(), step,
                     "|I| != |J|");
    }
    const auto& fin = trace.final_state;
    std::set<std::string> final_a;
    for (const auto& x : fin.at("a")) final_a.insert(x.get<std::string>());
    std::set<std::string> replay_a;
    for (auto j : a) replay_a.insert(columns[j - 1].text());
    replay.expect(final_a == replay_a && fin.at("i").get<std::uint64_t>() == i, trace.events.size(),
                  "final state differs from the replayed steps");

    // Certificate over the replayed state; verdicts must match the logged ones.
    g.a = a;
    g.i = i;
    g.j_set = j_set;
    for (const auto& p : i_set) g.i_set.insert(BitString::from_bits(p));
    const auto budget = trace.params.at("budget").get<std::uint64_t>();
    try {
      const auto report = verify_certificate(g, budget);
      bool same = true;
      for (const auto& [p, v] : report.programs) {
        same = same && fin.at("verdicts").value(p.text(), std::string()) == to_string(v);
      }
      certificate.expect(report.ok && same, trace.events.size(),
                         report.ok ? "logged verdicts differ from re-derived ones" : report.failure);
    } catch (const Error& ex) {
      certificate.fail(trace.events.size(), ex.detail());
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("game trace: ") + ex.what());
  }
  return {replay, balance, immutable, probes, certificate};
}

}  // namespace kolmolab
