#include <set>

#include "kolmolab/constructions.hpp"
#include "kolmolab/errors.hpp"

namespace kolmolab {

namespace {

std::vector<Program> programs_up_to(std::uint64_t k) {
  std::vector<Program> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{2} << k) - 1; ++i) {
    out.push_back(index_to_string(CanonicalIndex{i}));
  }
  return out;
}

Json mask_programs(const std::vector<Program>& programs, std::uint64_t mask) {
  Json out = Json::array();
  for (std::size_t j = 0; j < programs.size(); ++j) {
    if ((mask >> j) & 1U) out.push_back(programs[j].text());
  }
  return out;
}

}  // namespace

GapState gap_bk_run(std::uint64_t k, std::uint64_t budget, MachineOracle& raw_machine) {
  if (k > 3) throw Error(ErrorKind::kRange, "gap enumeration supports k <= 3");
  CheckedMachineOracle machine(raw_machine);

  GapState g;
  g.k = k;
  g.programs = programs_up_to(k);
  const std::uint64_t subsets = std::uint64_t{1} << g.programs.size();
  g.alive.assign(subsets, true);
  g.alive_count = subsets;
  g.trace.construction = "gap";
  g.trace.params = {{"k", k}, {"budget", budget}};

  for (std::uint64_t s = 1; g.alive_count > 0 && g.work < budget; ++s) {
    g.last_s = s;
    // bot[xi]: programs giving ⊥ on x_xi within s steps.
    std::vector<std::uint64_t> bot(s, 0);
    for (std::uint64_t xi = 0; xi < s; ++xi) {
      const BitString x = index_to_string(CanonicalIndex{xi});
      for (std::size_t j = 0; j < g.programs.size(); ++j) {
        if (value_of(machine.outcome(g.programs[j], x, s)) == Value::kBottom) bot[xi] |= std::uint64_t{1} << j;
      }
    }
    for (std::uint64_t mask = 0; mask < subsets && g.work < budget; ++mask) {
      if (!g.alive[mask]) continue;
      for (std::uint64_t xi = 0; xi < s && g.work < budget; ++xi) {
        ++g.work;
        if ((mask & ~bot[xi]) != 0) continue;
        const BitString x = index_to_string(CanonicalIndex{xi});
        g.alive[mask] = false;
        --g.alive_count;
        g.b.insert(x);
        g.removals.push_back({mask, x, s, g.work});
        g.trace.events.push_back({{"work", g.work},
                                  {"subset", mask},
                                  {"programs", mask_programs(g.programs, mask)},
                                  {"x", x.text()},
                                  {"s", s}});
        break;
      }
    }
  }

  Json b = Json::array();
  for (const auto& x : g.b) b.push_back(x.text());
  g.trace.final_state = {{"alive", g.alive_count}, {"b", b},          {"work", g.work},
                         {"last_s", g.last_s},     {"exhausted", g.alive_count == 0},
                         {"subsets", subsets}};
  g.trace.checks = check_gap(g.trace);
  return g;
}

std::vector<CheckResult> check_gap(const StageTrace& trace) {
  CheckResult sound{"removal_soundness"}, shrink{"s_k_shrinks"}, bound{"b_k_bound"},
      nonempty{"b_k_nonempty"}, order{"dovetail_order"};
  try {
    const auto k = trace.params.at("k").get<std::uint64_t>();
    if (k > 3) throw Error(ErrorKind::kRange, "gap trace with k > 3");
    const auto programs = programs_up_to(k);
    const std::uint64_t subsets = std::uint64_t{1} << programs.size();
    std::set<std::uint64_t> removed;
    std::set<std::string> b;
    std::pair<std::uint64_t, std::uint64_t> prev{0, 0};
    bool first = true;
    for (const auto& e : trace.events) {
      const auto mask = e.at("subset").get<std::uint64_t>();
      const auto s = e.at("s").get<std::uint64_t>();
      const BitString x = BitString::from_bits(e.at("x").get<std::string>());
      // Re-run every program of the subset on x at budget s.
      bool ok = mask < subsets && string_to_index(x).value < s;
      for (std::size_t j = 0; ok && j < programs.size(); ++j) {
        if ((mask >> j) & 1U) ok = value_of(run(programs[j], x, s)) == Value::kBottom;
      }
      sound.expect(ok && e.at("programs") == mask_programs(programs, mask), s,
                   "subset " + std::to_string(mask) + " does not give ⊥ on '" + x.text() + "'");
      shrink.expect(removed.insert(mask).second, s, "subset " + std::to_string(mask) + " removed twice");
      const std::pair<std::uint64_t, std::uint64_t> pos{s, mask};
      order.expect(first || prev < pos, s, "removals out of dovetail order");
      prev = pos;
      first = false;
      b.insert(x.text());
    }
    const auto& fin = trace.final_state;
    std::set<std::string> final_b;
    for (const auto& x : fin.at("b")) final_b.insert(x.get<std::string>());
    const std::uint64_t last = fin.at("last_s").get<std::uint64_t>();
    sound.expect(final_b == b, last, "final B_k differs from the logged removals");
    shrink.expect(fin.at("alive").get<std::uint64_t>() == subsets - removed.size(), last,
                  "alive count does not match the removals");
    bound.expect(b.size() <= subsets, last, "|B_k| exceeds 2^|P_k|");
    nonempty.expect(!b.empty() || fin.at("work").get<std::uint64_t>() == 0, last, "B_k is empty");
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("gap trace: ") + ex.what());
  }
  return {sound, shrink, bound, nonempty, order};
}

}  // namespace kolmolab
