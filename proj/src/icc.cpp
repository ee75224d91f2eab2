#include "kolmolab/icc.hpp"

#include <algorithm>

#include "kolmolab/errors.hpp"

namespace kolmolab {

namespace {

Json set_json(const std::set<BitString>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(x.text());
  return out;
}

std::uint64_t m_size(std::uint64_t k) { return (std::uint64_t{1} << k) - 2; }

std::string outcome_kind(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::kHalt:
      return "halt";
    case OutcomeKind::kBottom:
      return "bottom";
    case OutcomeKind::kOutOfBudget:
      break;
  }
  return "out_of_budget";
}

IccKState make_kstate(std::uint64_t k) {
  IccKState ks;
  ks.k = k;
  ks.programs = first_strings_of_length(k, m_size(k));
  ks.sigma = BitString::from_bits(std::string(ks.programs.size(), '0'));
  ks.psi.resize(ks.programs.size());
  return ks;
}

// First element of A covered by a snapshot band that the snapshot gets wrong.
std::optional<BitString> band_violation(const Band& b, const EntryMap& a) {
  if (b.kind != BandKind::kChiSnapshot) return std::nullopt;
  for (const auto& [z, entered] : a) {
    if (z.size() < b.lo || z.size() > b.hi || b.r.contains(z)) continue;
    if (entered > b.snapshot) return z;
  }
  return std::nullopt;
}

bool range_contains(const DiagPoint& d, const BitString& x) {
  if (!x.all_zero()) return false;
  for (const auto& [stage, len] : d.history) {
    if (len == x.size()) return true;
  }
  return false;
}

struct Claim4Row {
  BitString x;
  std::uint64_t k = 0;
  std::uint64_t c = 0;
  std::string witness;
  std::uint64_t witness_length = 0;
  bool found = false;
  bool exempt = false;
  bool minimal = false;
  bool exact = false;
  bool ceil = false;

  Json to_json() const {
    return {{"x", x.text()},         {"k", k},
            {"c", c},                {"witness", found ? Json(witness) : Json(nullptr)},
            {"witness_length", witness_length}, {"exempt", exempt},
            {"minimal", minimal},    {"bound_exact", exact},
            {"bound_ceil", ceil}};
  }
};

std::uint64_t ceil_log2(std::uint64_t c) {
  std::uint64_t l = 0;
  while ((std::uint64_t{1} << l) < c) ++l;
  return l;
}

// claim_4 over a final state: each emitted x, at the least k whose stream
// emitted it, needs a witness of length <= k, and k <= log2 C(x) + 2 when
// C(x) >= 2. `c_final` holds C at the final stage.
std::vector<Claim4Row> claim4_rows(IccState& st, const std::map<BitString, std::uint64_t>& c_final) {
  std::vector<Claim4Row> rows;
  std::set<BitString> done;
  for (auto& ks : st.ks) {
    const auto r = st.r_set(ks.k);
    for (const auto& em : ks.emissions) {
      if (!done.insert(em.x).second) continue;
      Claim4Row row;
      row.x = em.x;
      row.k = ks.k;
      row.c = c_final.at(em.x);
      const bool in_a = st.a.contains(em.x);
      if (r.contains(em.x)) {
        for (std::uint64_t e = 1; e < ks.k && !row.found; ++e) {
          const DiagPoint& d = st.diag[e - 1];
          if (!range_contains(d, em.x)) continue;
          const TauTables tau = tau_table(e, d);
          const auto& table = d.active() ? tau.tau1 : *tau.tau2;
          bool consistent = true;
          for (const auto& [y, bit] : table) consistent = consistent && bit == st.a.contains(y);
          auto it = table.find(em.x);
          if (consistent && it != table.end() && it->second == in_a) {
            row.found = true;
            row.witness = tau_programs(e).first.text();
            if (!d.active()) row.witness = tau_programs(e).second.text();
            row.witness_length = e;
          }
        }
      } else {
        for (auto i : set_positions(ks.sigma)) {
          const PsiTable& psi = ks.psi[i - 1];
          const PsiValue v = psi.eval(em.x, st.a);
          if (v != (in_a ? PsiValue::kOne : PsiValue::kZero)) continue;
          bool consistent = true;
          for (const auto& b : psi.bands()) consistent = consistent && !band_violation(b, st.a);
          if (!consistent) continue;
          row.found = true;
          row.witness = ks.programs[i - 1].text();
          row.witness_length = ks.k;
          break;
        }
      }
      row.exempt = row.c < 2;
      row.minimal = ks.k < 2 || row.c + 2 >= (std::uint64_t{1} << (ks.k - 1));
      row.exact = ks.k < 2 || (std::uint64_t{1} << (ks.k - 2)) <= row.c;
      row.ceil = row.c >= 1 && ks.k <= ceil_log2(row.c) + 2;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Bands and ψ tables

Json Band::to_json() const {
  Json j = {{"lo", lo}, {"hi", hi}, {"installed", installed}};
  if (kind == BandKind::kAllBottom) {
    j["kind"] = "all_bot";
  } else {
    j["kind"] = "chi";
    j["snapshot"] = snapshot;
    j["r"] = set_json(r);
  }
  return j;
}

Band Band::from_json(const Json& j) {
  Band b;
  b.lo = j.at("lo").get<std::uint64_t>();
  b.hi = j.at("hi").get<std::uint64_t>();
  b.installed = j.at("installed").get<std::uint64_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "chi") {
    b.kind = BandKind::kChiSnapshot;
    b.snapshot = j.at("snapshot").get<std::uint64_t>();
    for (const auto& x : j.at("r")) b.r.insert(BitString::from_bits(x.get<std::string>()));
  } else if (kind != "all_bot") {
    throw Error(ErrorKind::kParse, "unknown band kind '" + kind + "'");
  }
  return b;
}

std::string to_string(PsiValue v) {
  switch (v) {
    case PsiValue::kUndefined:
      return "undefined";
    case PsiValue::kBottom:
      return "bottom";
    case PsiValue::kZero:
      return "0";
    case PsiValue::kOne:
      break;
  }
  return "1";
}

void PsiTable::install(Band band) {
  if (band.lo != defined_upto() || band.lo > band.hi) {
    throw Error(ErrorKind::kInvariant, "band [" + std::to_string(band.lo) + ", " + std::to_string(band.hi) +
                                           "] does not extend a domain ending below length " +
                                           std::to_string(defined_upto()));
  }
  if (band.kind == BandKind::kAllBottom && !bands_.empty() && bands_.back().kind == BandKind::kAllBottom) {
    bands_.back().hi = band.hi;
    return;
  }
  bands_.push_back(std::move(band));
}

const Band* PsiTable::band_at(std::uint64_t length) const {
  auto it = std::upper_bound(bands_.begin(), bands_.end(), length,
                             [](std::uint64_t l, const Band& b) { return l < b.lo; });
  if (it == bands_.begin()) return nullptr;
  --it;
  return length <= it->hi ? &*it : nullptr;
}

PsiValue PsiTable::eval(const BitString& z, const EntryMap& a) const {
  const Band* b = band_at(z.size());
  if (!b) return PsiValue::kUndefined;
  if (b->kind == BandKind::kAllBottom || b->r.contains(z)) return PsiValue::kBottom;
  return in_a_at(a, z, b->snapshot) ? PsiValue::kOne : PsiValue::kZero;
}

Json PsiTable::to_json() const {
  Json out = Json::array();
  for (const auto& b : bands_) out.push_back(b.to_json());
  return out;
}

// ---------------------------------------------------------------------------
// E_k streams and W probes

EStream::EStream(std::uint64_t k) : k_(k), threshold_((std::uint64_t{1} << k) - 2) {}

std::optional<BitString> EStream::step(std::uint64_t t, ComplexityOracle& oracle) {
  for (auto& x : oracle.below(threshold_, t)) discovered_.insert(std::move(x));
  for (const auto& x : discovered_) {
    if (x.size() >= t) break;  // canonical order is length-first
    if (emitted_.insert(x).second) return x;
  }
  return std::nullopt;
}

bool w_probe(MachineOracle& machine, std::uint64_t e, const BitString& z, std::uint64_t s) {
  if (z.size() >= s) return false;
  return machine.outcome(index_to_string(CanonicalIndex{e}), z, s).terminal();
}

// ---------------------------------------------------------------------------
// State helpers

void IccState::materialize(std::uint64_t e) {
  while (diag.size() < e) {
    const std::uint64_t next = diag.size() + 1;
    DiagPoint d;
    d.history.emplace_back(0, pair(next, 0));
    // Unmaterialized points were never probed, hence still active.
    for (const auto& [stage, k] : repoints) {
      if (k <= next) d.history.emplace_back(stage, pair(next, stage));
    }
    diag.push_back(std::move(d));
  }
}

std::set<BitString> IccState::r_set(std::uint64_t k) {
  std::set<BitString> r;
  if (k < 2) return r;
  materialize(k - 1);
  for (std::uint64_t e = 1; e < k; ++e) {
    for (const auto& [stage, len] : diag[e - 1].history) r.insert(BitString::zero_run(len));
  }
  return r;
}

std::pair<Program, Program> tau_programs(std::uint64_t e) {
  if (e < 1 || e > 63) throw Error(ErrorKind::kRange, "tau programs need 1 <= e <= 63");
  const std::uint64_t last = (std::uint64_t{1} << e) - 1;
  return {BitString::from_bits(binary(last - 1, e)), BitString::from_bits(binary(last, e))};
}

TauTables tau_table(std::uint64_t, const DiagPoint& d) {
  TauTables t;
  for (const auto& [stage, len] : d.history) t.tau1[BitString::zero_run(len)] = false;
  if (d.passive_stage) {
    std::map<BitString, bool> tau2;
    const BitString final_value = d.current();
    for (const auto& [stage, len] : d.history) tau2[BitString::zero_run(len)] = false;
    tau2[final_value] = true;
    t.tau2 = std::move(tau2);
  }
  return t;
}

Json psi_json(const IccState& state) {
  Json out = Json::array();
  for (const auto& ks : state.ks) {
    Json programs = Json::array();
    for (std::size_t i = 0; i < ks.programs.size(); ++i) {
      programs.push_back({{"i", i + 1},
                          {"program", ks.programs[i].text()},
                          {"assigned", ks.sigma.bit(i)},
                          {"bands", ks.psi[i].to_json()}});
    }
    out.push_back({{"k", ks.k}, {"sigma", ks.sigma.text()}, {"len", ks.len}, {"programs", programs}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulator

IccSimulator::IccSimulator(const IccConfig& config, ComplexityOracle& oracle, MachineOracle& machine,
                           Json oracle_desc)
    : config_(config), oracle_(oracle), machine_(machine), oracle_desc_(std::move(oracle_desc)) {
  if (config.k_max < 1 || config.k_max > 4) throw Error(ErrorKind::kRange, "icc needs 1 <= k_max <= 4");
  state_.k_max = config.k_max;
  for (std::uint64_t k = 1; k <= config.k_max; ++k) {
    state_.ks.push_back(make_kstate(k));
    streams_.emplace_back(k);
  }
  trace_.construction = "icc";
  trace_.params = {{"k_max", config.k_max}, {"stages", config.stages}, {"oracle", oracle_desc_}, {"machine", "vm"}};
}

bool IccSimulator::probe(std::uint64_t e, std::uint64_t s, Json& record) {
  DiagPoint& d = state_.diag[e - 1];
  const BitString z = d.current();
  if (!d.probe_known) {
    // One run at the horizon answers every later budget exactly.
    const Outcome o = machine_.outcome(index_to_string(CanonicalIndex{e}), z, config_.stages);
    d.probe_from.reset();
    if (o.terminal()) d.probe_from = std::max(z.size() + 1, o.steps);
    d.probe_known = true;
  }
  if (!d.probe_from || s < *d.probe_from) return false;
  const Outcome at_s = machine_.outcome(index_to_string(CanonicalIndex{e}), z, s);
  record = {{"p", index_to_string(CanonicalIndex{e}).text()},
            {"budget", s},
            {"kind", outcome_kind(at_s)},
            {"steps", at_s.steps}};
  return true;
}

void IccSimulator::case_one(std::uint64_t s) {
  for (std::uint64_t e = 1; e * (e + 1) / 2 < s; ++e) {
    state_.materialize(e);
    DiagPoint& d = state_.diag[e - 1];
    if (!d.active()) continue;
    const BitString z = d.current();
    if (state_.a.contains(z)) continue;
    Json record;
    if (!probe(e, s, record)) continue;
    state_.a[z] = s + 1;
    d.passive_stage = s + 1;
    trace_.events.push_back({{"stage", s + 1}, {"case", "I"}, {"e", e}, {"x", z.text()}, {"probe", record}});
  }
}

void IccSimulator::case_two(std::uint64_t s) {
  const auto [k, t] = unpair((s - 1) / 2);
  if (k < 1 || k > config_.k_max) return;
  IccKState& ks = state_.ks[k - 1];
  const std::uint64_t stage = s + 1;

  Json all_bot = Json::array();
  for (auto i : set_positions(ks.sigma)) {
    Band b;
    b.lo = t;
    b.hi = t;
    b.installed = stage;
    ks.psi[i - 1].install(b);
    all_bot.push_back(i);
  }

  Json event = {{"stage", stage}, {"case", "II"},      {"k", k},        {"t", t},
                {"all_bot", all_bot}, {"emitted", nullptr}, {"c", nullptr}, {"action", "none"}};
  if (const auto x = streams_[k - 1].step(t, oracle_)) {
    Emission em;
    em.x = *x;
    em.t = t;
    em.stage = stage;
    em.c = oracle_.value(*x, t).value();
    const auto r = state_.r_set(k);
    event["emitted"] = x->text();
    event["c"] = em.c;
    if (r.contains(*x) || x->size() < ks.len) {
      em.action = "a";
    } else {
      em.action = "b";
      if (ks.sigma.size() == set_positions(ks.sigma).size()) {
        throw Error(ErrorKind::kInvariant, "succ applied to all-ones sigma for k = " + std::to_string(k));
      }
      ks.sigma = succ(ks.sigma);
      ++ks.b_actions;
      const std::size_t i = set_positions(ks.sigma).front();
      Band b;
      b.lo = ks.psi[i - 1].defined_upto();
      b.hi = t;
      b.kind = BandKind::kChiSnapshot;
      b.snapshot = s;
      b.r = r;
      b.installed = stage;
      event["i"] = i;
      event["band"] = b.to_json();
      ks.psi[i - 1].install(std::move(b));
      ks.len = t + 1;
      state_.repoints.emplace_back(stage, k);
      Json repointed = Json::array();
      for (std::uint64_t e = k; e <= state_.diag.size(); ++e) {
        DiagPoint& d = state_.diag[e - 1];
        if (!d.active()) continue;
        d.history.emplace_back(stage, pair(e, stage));
        d.probe_known = false;
        repointed.push_back(e);
      }
      event["repointed"] = repointed;
    }
    event["action"] = em.action;
    ks.emissions.push_back(std::move(em));
  }
  event["sigma"] = ks.sigma.text();
  event["len"] = ks.len;
  trace_.events.push_back(std::move(event));
}

void IccSimulator::step() {
  const std::uint64_t s = state_.stage;
  if (s % 2 == 0) {
    case_one(s);
  } else {
    case_two(s);
  }
  ++state_.stage;
}

void IccSimulator::run() {
  while (state_.stage < config_.stages) step();
}

StageTrace IccSimulator::trace() {
  StageTrace t = trace_;
  Json& fin = t.final_state;
  fin = Json::object();
  fin["stage"] = state_.stage;
  Json a = Json::array();
  for (const auto& [x, stage] : state_.a) a.push_back(Json::array({x.text(), stage}));
  fin["a"] = a;
  Json diag = Json::array();
  for (std::size_t e = 1; e <= state_.diag.size(); ++e) {
    const DiagPoint& d = state_.diag[e - 1];
    Json h = Json::array();
    for (const auto& [stage, len] : d.history) h.push_back(Json::array({stage, len}));
    diag.push_back({{"e", e},
                    {"history", h},
                    {"passive", d.passive_stage ? Json(*d.passive_stage) : Json(nullptr)}});
  }
  fin["diag"] = diag;
  Json repoints = Json::array();
  for (const auto& [stage, k] : state_.repoints) repoints.push_back(Json::array({stage, k}));
  fin["repoints"] = repoints;
  Json ks_json = Json::array();
  std::map<BitString, std::uint64_t> c_final;
  for (const auto& ks : state_.ks) {
    Json ems = Json::array();
    for (const auto& em : ks.emissions) {
      const std::uint64_t c = oracle_.value(em.x, state_.stage).value();
      c_final[em.x] = c;
      ems.push_back({{"x", em.x.text()},
                     {"t", em.t},
                     {"stage", em.stage},
                     {"c", em.c},
                     {"c_final", c},
                     {"action", em.action}});
    }
    ks_json.push_back({{"k", ks.k},
                       {"sigma", ks.sigma.text()},
                       {"len", ks.len},
                       {"b_actions", ks.b_actions},
                       {"emissions", ems}});
  }
  fin["k"] = ks_json;
  fin["psi"] = psi_json(state_);
  Json rows = Json::array();
  for (const auto& row : claim4_rows(state_, c_final)) rows.push_back(row.to_json());
  fin["claim4"] = rows;
  t.checks = check_icc(t);
  return t;
}

// ---------------------------------------------------------------------------
// Checker

std::vector<CheckResult> check_icc(const StageTrace& trace) {
  CheckResult replay("replay"), c1a("claim_1a"), c1b("claim_1b"), c1c("claim_1c"), c1d("claim_1d"),
      c1e("claim_1e"), c2("claim_2"), c3a("claim_3a"), c3b("claim_3b"), c3c("claim_3c"), c4("claim_4"),
      ledger("coverage_ledger");
  try {
    const auto k_max = trace.params.at("k_max").get<std::uint64_t>();
    const auto stages = trace.params.at("stages").get<std::uint64_t>();
    if (k_max < 1 || k_max > 4) throw Error(ErrorKind::kRange, "icc trace with k_max outside 1..4");

    IccState st;
    st.k_max = k_max;
    for (std::uint64_t k = 1; k <= k_max; ++k) st.ks.push_back(make_kstate(k));
    std::map<std::uint64_t, std::vector<const Json*>> by_stage;
    for (const auto& e : trace.events) by_stage[e.at("stage").get<std::uint64_t>()].push_back(&e);
    std::vector<std::set<BitString>> emitted(k_max);
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::size_t, Band>> chi_bands;

    for (std::uint64_t stage = 1; stage <= stages; ++stage) {
      const std::uint64_t s = stage - 1;
      const auto& events = by_stage[stage];
      if (s % 2 == 0) {
        for (const Json* ev : events) {
          const auto e = ev->at("e").get<std::uint64_t>();
          const BitString z = BitString::from_bits(ev->at("x").get<std::string>());
          if (ev->at("case") != "I" || e < 1 || e * (e + 1) / 2 >= s) {
            replay.fail(stage, "Case I event outside the diagonalization sweep");
            continue;
          }
          st.materialize(e);
          DiagPoint& d = st.diag[e - 1];
          replay.expect(d.active() && d.current() == z && !st.a.contains(z), stage,
                        "d_" + std::to_string(e) + " enumerated while passive or stale");
          // Re-run the logged probe on the machine.
          const Program p = index_to_string(CanonicalIndex{e});
          const Outcome o = run(p, z, s);
          c1e.expect(z.size() < s && o.terminal() && ev->at("probe").at("steps").get<std::uint64_t>() == o.steps,
                     stage, "probe of W_" + std::to_string(e) + " on " + z.text() + " does not re-verify");
          st.a[z] = stage;
          d.passive_stage = stage;
        }
        continue;
      }

      const auto [k, t] = unpair((s - 1) / 2);
      if (k < 1 || k > k_max) {
        replay.expect(events.empty(), stage, "events at a stage that acts for no simulated k");
        continue;
      }
      IccKState& ks = st.ks[k - 1];
      if (events.size() != 1 || events[0]->at("case") != "II" || events[0]->at("k").get<std::uint64_t>() != k ||
          events[0]->at("t").get<std::uint64_t>() != t) {
        replay.fail(stage, "missing or malformed Case II event for k = " + std::to_string(k));
        c3b.fail(stage, "no Case II record for k = " + std::to_string(k));
        continue;
      }
      const Json& ev = *events[0];

      std::vector<std::size_t> ones = set_positions(ks.sigma);
      replay.expect(ev.at("all_bot").get<std::vector<std::size_t>>() == ones, stage,
                    "⊥ extension does not match sigma");
      for (auto i : ones) {
        Band b;
        b.lo = t;
        b.hi = t;
        b.installed = stage;
        try {
          ks.psi[i - 1].install(b);
        } catch (const Error& ex) {
          replay.fail(stage, "p_{" + std::to_string(k) + "," + std::to_string(i) + "}: " + ex.detail());
        }
      }

      const auto r = st.r_set(k);
      if (!ev.at("emitted").is_null()) {
        const BitString x = BitString::from_bits(ev.at("emitted").get<std::string>());
        replay.expect(x.size() < t && emitted[k - 1].insert(x).second &&
                          ev.at("c").get<std::uint64_t>() + 2 < (std::uint64_t{1} << k),
                      stage, "E_" + std::to_string(k) + " emission breaks the stream contract");
        const bool case_a = r.contains(x) || x.size() < ks.len;
        const std::string action = ev.at("action").get<std::string>();
        replay.expect(action == (case_a ? "a" : "b"), stage, "wrong sub-case for " + x.text());
        Emission em;
        em.x = x;
        em.t = t;
        em.stage = stage;
        em.c = ev.at("c").get<std::uint64_t>();
        em.action = action;
        ks.emissions.push_back(em);
        if (action == "b") {
          if (ks.sigma.size() == ones.size()) {
            ledger.fail(stage, "E_" + std::to_string(k) + " needs more than 2^|M_k| - 1 covering actions");
          } else {
            ledger.pass();
            ks.sigma = succ(ks.sigma);
            ++ks.b_actions;
          }
          const std::size_t i = set_positions(ks.sigma).empty() ? 0 : set_positions(ks.sigma).front();
          Band b = Band::from_json(ev.at("band"));
          replay.expect(ev.at("i").get<std::size_t>() == i && ev.at("sigma").get<std::string>() == ks.sigma.text(),
                        stage, "sigma or i does not follow succ");
          replay.expect(b.kind == BandKind::kChiSnapshot && b.hi == t && b.snapshot == s && b.r == r &&
                            b.installed == stage,
                        stage, "snapshot band does not match the stage");
          if (i >= 1) {
            try {
              ks.psi[i - 1].install(b);
              chi_bands.emplace_back(stage, k, i, b);
            } catch (const Error& ex) {
              replay.fail(stage, ex.detail());
            }
          }
          ks.len = t + 1;
          st.repoints.emplace_back(stage, k);
          for (std::uint64_t e = k; e <= st.diag.size(); ++e) {
            DiagPoint& d = st.diag[e - 1];
            if (!d.active()) continue;
            const std::uint64_t len = pair(e, stage);
            d.history.emplace_back(stage, len);
          }
        }
      }
      replay.expect(ev.at("sigma").get<std::string>() == ks.sigma.text() &&
                        ev.at("len").get<std::uint64_t>() == ks.len,
                    stage, "logged sigma/len differ from the replay");

      // claim_3b: every assigned program is defined exactly on lengths <= t.
      for (auto i : set_positions(ks.sigma)) {
        c3b.expect(ks.psi[i - 1].defined_upto() == t + 1, stage,
                   "dom(psi_{p_{" + std::to_string(k) + "," + std::to_string(i) + "}}) ends at length " +
                       std::to_string(ks.psi[i - 1].defined_upto()) + ", not " + std::to_string(t + 1));
      }

      // claim_3c: coverage of every length below len(k, s+1).
      const auto assigned = set_positions(ks.sigma);
      for (std::uint64_t l = 0; l < ks.len; ++l) {
        bool generic = false;
        for (auto i : assigned) {
          const Band* b = ks.psi[i - 1].band_at(l);
          generic = generic || (b && b->kind == BandKind::kChiSnapshot);
        }
        c3c.expect(generic, stage, "no assigned program computes chi_A at length " + std::to_string(l));
      }
      for (const auto& [z, entered] : st.a) {
        if (z.size() >= ks.len || r.contains(z)) continue;
        bool covered = false;
        for (auto i : assigned) covered = covered || ks.psi[i - 1].eval(z, st.a) == PsiValue::kOne;
        c3c.expect(covered, stage, "element " + z.text() + " of A is not covered");
      }
    }

    // claim_3a: every snapshot band is A-consistent for the final A.
    for (const auto& [stage, k, i, band] : chi_bands) {
      const auto bad = band_violation(band, st.a);
      c3a.expect(!bad, stage,
                 "psi_{p_{" + std::to_string(k) + "," + std::to_string(i) + "}} reads 0 on " +
                     (bad ? bad->text() : std::string()) + ", which enters A later");
    }

    // Claims 1b, 1c and 2 over the materialized points.
    const auto& fin = trace.final_state;
    const auto logged_diag = fin.at("diag");
    st.materialize(logged_diag.size());
    std::map<std::uint64_t, std::uint64_t> owner;
    for (std::size_t e = 1; e <= st.diag.size(); ++e) {
      const DiagPoint& d = st.diag[e - 1];
      for (const auto& [stage, len] : d.history) {
        auto [it, fresh] = owner.emplace(len, e);
        c1b.expect(fresh || it->second == e, stage,
                   "range(d_" + std::to_string(e) + ") meets range(d_" + std::to_string(it->second) + ")");
      }
      // Claims 1a and 1d on every change, including points materialized late.
      for (std::size_t j = 1; j < d.history.size(); ++j) {
        const auto [stage, len] = d.history[j];
        c1a.expect(len >= d.history[j - 1].second && len + 1 > stage, stage,
                   "l(d_" + std::to_string(e) + ") shrinks or stays within the stage");
        c1d.expect(len >= stage, stage,
                   "d_" + std::to_string(e) + " takes a value of length below the stage");
      }
      for (const auto& [stage, len] : d.history) {
        const BitString v = BitString::zero_run(len);
        if (st.a.contains(v)) c1c.expect(v == d.current(), st.a.at(v), "A holds a non-final value of d_e");
      }
      const TauTables tau = tau_table(e, d);
      const auto& table = d.active() ? tau.tau1 : *tau.tau2;
      bool ok = true;
      for (const auto& [y, bit] : table) ok = ok && bit == st.a.contains(y);
      c2.expect(ok, d.passive_stage.value_or(stages),
                "tau_{" + std::to_string(e) + (d.active() ? ",1}" : ",2}") + " is not A-consistent");
      const Json& logged = logged_diag.at(e - 1);
      Json h = Json::array();
      for (const auto& [stage, len] : d.history) h.push_back(Json::array({stage, len}));
      replay.expect(logged.at("history") == h && logged.at("passive").is_null() == d.active(), stages,
                    "final d_" + std::to_string(e) + " differs from the replay");
    }
    std::vector<std::pair<std::string, std::uint64_t>> final_a;
    for (const auto& [x, stage] : st.a) final_a.emplace_back(x.text(), stage);
    replay.expect(fin.at("a").get<std::vector<std::pair<std::string, std::uint64_t>>>() == final_a, stages,
                  "final A differs from the replay");
    replay.expect(fin.at("psi") == psi_json(st), stages, "final psi bands differ from the replay");

    // claim_4 with the logged final complexity values.
    std::map<BitString, std::uint64_t> c_final;
    for (const auto& kj : fin.at("k")) {
      for (const auto& em : kj.at("emissions")) {
        c_final[BitString::from_bits(em.at("x").get<std::string>())] = em.at("c_final").get<std::uint64_t>();
      }
    }
    for (const auto& row : claim4_rows(st, c_final)) {
      std::string why;
      if (!row.found) why = "no witness for " + row.x.text();
      else if (!row.minimal) why = row.x.text() + " lies in E_" + std::to_string(row.k - 1) + " but was not emitted there";
      else if (!row.exempt && !row.exact) why = "k = " + std::to_string(row.k) + " exceeds log2 C + 2 for " + row.x.text();
      c4.expect(why.empty(), stages, why);
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("icc trace: ") + ex.what());
  }
  return {replay, c1a, c1b, c1c, c1d, c1e, c2, c3a, c3b, c3c, c4, ledger};
}

std::optional<std::uint64_t> inject_snapshot_fault(StageTrace& trace) {
  EntryMap a;
  for (const auto& entry : trace.final_state.at("a")) {
    a[BitString::from_bits(entry.at(0).get<std::string>())] = entry.at(1).get<std::uint64_t>();
  }
  for (auto& ev : trace.events) {
    if (ev.at("case") != "II" || ev.value("action", "") != "b") continue;
    Band b = Band::from_json(ev.at("band"));
    std::optional<BitString> target;
    for (const auto& [z, entered] : a) {
      if (entered <= b.snapshot || z.size() < b.lo || b.r.contains(z)) continue;
      if (!target || z.size() < target->size()) target = z;
    }
    if (!target) continue;
    b.hi = std::max(b.hi, target->size());
    ev["band"] = b.to_json();
    return ev.at("stage").get<std::uint64_t>();
  }
  return std::nullopt;
}

}  // namespace kolmolab
