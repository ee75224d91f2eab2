#include <algorithm>
#include <map>
#include <set>

#include "kolmolab/constructions.hpp"
#include "kolmolab/errors.hpp"

namespace kolmolab {

namespace {

constexpr const char* kChecksName[] = {"downward_closed", "non_exhaustion", "one_per_k_per_stage",
                                       "final_witness"};

std::string policy_name(ExhaustionPolicy p) {
  return p == ExhaustionPolicy::kStrict ? "strict" : "pigeonhole_only";
}

bool downward_closed(const std::set<std::uint64_t>& a, const IntervalParams& ip) {
  bool gap_seen = false;
  for (std::uint64_t n = ip.t_k + 1; n <= ip.t_k1; ++n) {
    const bool in = a.contains(n);
    if (in && gap_seen) return false;
    if (!in) gap_seen = true;
  }
  return true;
}

std::uint64_t count_in(const std::set<std::uint64_t>& a, const IntervalParams& ip) {
  return static_cast<std::uint64_t>(std::distance(a.upper_bound(ip.t_k), a.upper_bound(ip.t_k1)));
}

Json set_json(const std::set<std::uint64_t>& a) { return Json(std::vector<std::uint64_t>(a.begin(), a.end())); }

// Invariant checks over one stage's state.
void check_stage(const std::set<std::uint64_t>& a, std::uint64_t k_max, std::uint64_t stage,
                 CheckResult& closed, CheckResult& non_exhaustion) {
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    const IntervalParams ip = interval_params(k);
    closed.expect(downward_closed(a, ip), stage,
                  "A ∩ I_" + std::to_string(k) + " is not an initial segment of the interval");
    non_exhaustion.expect(count_in(a, ip) < ip.size(), stage,
                          "A ∩ I_" + std::to_string(k) + " = I_" + std::to_string(k));
  }
}

}  // namespace

IntervalParams interval_params(std::uint64_t k) {
  if (k >= 5) throw Error(ErrorKind::kRange, "interval parameters overflow for k >= 5");
  std::uint64_t t = 0;
  for (std::uint64_t j = 0; j < k; ++j) t = std::uint64_t{1} << t;
  IntervalParams ip;
  ip.k = k;
  ip.t_k = t;
  ip.t_k1 = std::uint64_t{1} << t;
  const std::uint64_t len = ip.size();
  ip.f_k = (len + 1) * (len + 2) / 2 - 1;  // Σ_{j=2}^{len+1} j
  while ((std::uint64_t{4} << ip.g_k) - 1 < ip.f_k) ++ip.g_k;
  return ip;
}

BitString chi_prefix(const std::set<std::uint64_t>& a, std::uint64_t n) {
  std::string bits(n + 1, '0');
  for (auto it = a.begin(); it != a.end() && *it <= n; ++it) bits[*it] = '1';
  return BitString::from_bits(bits);
}

ComplexSetResult complex_set_run(const ComplexSetConfig& config, ComplexityOracle& raw_oracle,
                                 const Json& oracle_desc) {
  if (config.k_max > 4) throw Error(ErrorKind::kRange, "k_max must be at most 4");
  MonotoneComplexityOracle oracle(raw_oracle);

  ComplexSetResult result;
  StageTrace& trace = result.trace;
  trace.construction = "complex-set";
  trace.params = {{"k_max", config.k_max},
                  {"stages", config.stages},
                  {"policy", policy_name(config.policy)},
                  {"oracle", oracle_desc}};

  CheckResult closed{kChecksName[0]}, non_exhaustion{kChecksName[1]}, one_per{kChecksName[2]},
      final_witness{kChecksName[3]};

  std::vector<IntervalParams> params;
  for (std::uint64_t k = 0; k <= config.k_max; ++k) params.push_back(interval_params(k));
  std::vector<std::set<BitString>> certified(config.k_max + 1);
  std::set<std::uint64_t>& a = result.a;

  check_stage(a, config.k_max, 0, closed, non_exhaustion);
  for (std::uint64_t s = 0; s < config.stages && !result.violation; ++s) {
    const std::set<std::uint64_t> snapshot = a;
    std::uint64_t enumerated_this_stage = 0;
    for (std::uint64_t k = 0; k <= std::min(s, config.k_max); ++k) {
      const IntervalParams& ip = params[k];
      Json licenses = Json::array();
      std::vector<BitString> prefixes;
      bool licensed = true;
      for (std::uint64_t n = ip.t_k + 1; n <= ip.t_k1; ++n) {
        BitString x = chi_prefix(snapshot, n);
        const auto v = oracle.value(x, s);
        if (!v || *v > ip.g_k) {
          licensed = false;
          break;
        }
        licenses.push_back(Json::array({n, x.text(), *v}));
        prefixes.push_back(std::move(x));
      }
      if (!licensed) continue;

      certified[k].insert(prefixes.begin(), prefixes.end());
      const std::uint64_t present = count_in(snapshot, ip);
      std::optional<std::string> reason;
      if (certified[k].size() > ip.capacity()) {
        reason = "certified_too_many";
      } else if (present + 1 >= ip.size() && config.policy == ExhaustionPolicy::kStrict) {
        reason = "exhaustion_attempt";
      } else if (present == ip.size()) {
        reason = "interval_full";
      }
      if (reason) {
        result.violation = PigeonholeViolation{s + 1, k, *reason, certified[k].size(), ip.capacity()};
        trace.events.push_back({{"stage", s + 1},
                                {"k", k},
                                {"violation", *reason},
                                {"certified", certified[k].size()},
                                {"capacity", ip.capacity()},
                                {"licenses", licenses}});
        break;
      }
      const std::uint64_t next = ip.t_k + 1 + present;  // downward closed: least absent element
      a.insert(next);
      ++result.enumerations;
      ++enumerated_this_stage;
      trace.events.push_back({{"stage", s + 1}, {"k", k}, {"enumerate", next}, {"licenses", licenses}});
    }
    one_per.expect(enumerated_this_stage <= std::min(s, config.k_max) + 1, s + 1,
                   "more enumerations than intervals in one stage");
    check_stage(a, config.k_max, s + 1, closed, non_exhaustion);
  }

  // Final report: each interval keeps a prefix of complexity above g_k.
  const std::uint64_t last = result.violation ? result.violation->stage : config.stages;
  Json witnesses = Json::array();
  for (std::uint64_t k = 0; k <= config.k_max; ++k) {
    const IntervalParams& ip = params[k];
    Json w = {{"k", k}, {"g", ip.g_k}, {"n", nullptr}, {"prefix", nullptr}, {"value", nullptr}};
    for (std::uint64_t n = ip.t_k + 1; n <= ip.t_k1; ++n) {
      const BitString x = chi_prefix(a, n);
      const auto v = oracle.value(x, last);
      if (!v || *v > ip.g_k) {
        w["n"] = n;
        w["prefix"] = x.text();
        w["value"] = v ? Json(*v) : Json("inf");
        break;
      }
    }
    // After an abort the run certified an impossible oracle; no witness is owed.
    if (!result.violation) final_witness.expect(!w["n"].is_null(), last,
                         "no prefix over I_" + std::to_string(k) + " exceeds g_k");
    witnesses.push_back(w);
  }

  trace.final_state = {{"stage", last},
                       {"a", set_json(a)},
                       {"enumerations", result.enumerations},
                       {"witnesses", witnesses},
                       {"violation", nullptr}};
  if (result.violation) {
    const auto& v = *result.violation;
    trace.final_state["violation"] = {{"kind", std::string(to_string(ErrorKind::kOraclePigeonhole))},
                                      {"stage", v.stage},
                                      {"k", v.k},
                                      {"reason", v.reason},
                                      {"certified", v.certified},
                                      {"capacity", v.capacity}};
  }
  trace.checks = {closed, non_exhaustion, one_per, final_witness};
  return result;
}

std::vector<CheckResult> check_complex_set(const StageTrace& trace) {
  CheckResult replay{"replay"}, closed{kChecksName[0]}, non_exhaustion{kChecksName[1]},
      one_per{kChecksName[2]}, final_witness{kChecksName[3]}, ledger{"certified_capacity"};
  try {
    const auto k_max = trace.params.at("k_max").get<std::uint64_t>();
    const auto stages = trace.params.at("stages").get<std::uint64_t>();
    const bool strict = trace.params.at("policy").get<std::string>() == "strict";
    std::vector<IntervalParams> params;
    for (std::uint64_t k = 0; k <= k_max; ++k) params.push_back(interval_params(k));

    std::map<std::uint64_t, std::vector<Json>> by_stage;
    for (const auto& e : trace.events) by_stage[e.at("stage").get<std::uint64_t>()].push_back(e);

    std::set<std::uint64_t> a;
    std::vector<std::set<std::string>> certified(k_max + 1);
    bool aborted = false;
    std::uint64_t last = stages;
    check_stage(a, k_max, 0, closed, non_exhaustion);
    for (std::uint64_t stage = 1; stage <= stages && !aborted; ++stage) {
      const std::set<std::uint64_t> snapshot = a;
      std::set<std::uint64_t> ks;
      for (const auto& e : by_stage[stage]) {
        const auto k = e.at("k").get<std::uint64_t>();
        if (k > std::min(stage - 1, k_max) || !ks.insert(k).second) {
          one_per.fail(stage, "interval " + std::to_string(k) + " acted twice or out of range");
          continue;
        }
        const IntervalParams& ip = params[k];
        // The licenses must cover I_k exactly with the snapshot prefixes at <= g_k.
        const auto& lic = e.at("licenses");
        bool ok = lic.size() == ip.size();
        for (std::size_t j = 0; ok && j < lic.size(); ++j) {
          const auto n = lic[j][0].get<std::uint64_t>();
          ok = n == ip.t_k + 1 + j && lic[j][1].get<std::string>() == chi_prefix(snapshot, n).text() &&
               lic[j][2].get<std::uint64_t>() <= ip.g_k;
          if (ok) certified[k].insert(lic[j][1].get<std::string>());
        }
        replay.expect(ok, stage, "licenses for I_" + std::to_string(k) + " do not match the snapshot");
        if (e.contains("violation")) {
          aborted = true;
          last = stage;
          const bool full_next = count_in(snapshot, ip) + 1 >= ip.size();
          const bool justified = certified[k].size() > ip.capacity() || (strict && full_next) ||
                                 count_in(snapshot, ip) == ip.size();
          replay.expect(justified, stage, "violation raised without cause");
          break;
        }
        const auto n = e.at("enumerate").get<std::uint64_t>();
        std::uint64_t least = ip.t_k + 1;
        while (least <= ip.t_k1 && snapshot.contains(least)) ++least;
        replay.expect(n == least, stage, "enumerated element is not min(Ā_s ∩ I_k)");
        ledger.expect(certified[k].size() <= ip.capacity(), stage,
                      "more certified strings than programs of length <= g_k");
        a.insert(n);
      }
      one_per.pass();
      check_stage(a, k_max, stage, closed, non_exhaustion);
    }

    const auto& fin = trace.final_state;
    std::vector<std::uint64_t> final_a = fin.at("a").get<std::vector<std::uint64_t>>();
    replay.expect(std::set<std::uint64_t>(final_a.begin(), final_a.end()) == a, last,
                  "final A differs from the replayed events");
    replay.expect(fin.at("violation").is_null() != aborted, last, "violation flag mismatch");
    for (const auto& w : fin.at("witnesses")) {
      const auto k = w.at("k").get<std::uint64_t>();
      if (w.at("n").is_null()) {
        if (!aborted) final_witness.fail(last, "no witness for I_" + std::to_string(k));
        continue;
      }
      const auto n = w.at("n").get<std::uint64_t>();
      const bool high = w.at("value").is_string() || w.at("value").get<std::uint64_t>() > params.at(k).g_k;
      final_witness.expect(params.at(k).contains(n) &&
                               w.at("prefix").get<std::string>() == chi_prefix(a, n).text() && high,
                           last, "witness for I_" + std::to_string(k) + " does not verify");
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("complex-set trace: ") + ex.what());
  }
  return {replay, closed, non_exhaustion, one_per, final_witness, ledger};
}

}  // namespace kolmolab
