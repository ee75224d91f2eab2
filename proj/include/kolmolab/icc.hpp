#pragma once

// Stage simulator for the finite-injury construction of an r.e. nonrecursive
// set A together with a partial function ψ such that ic_ψ(x:A) stays within
// log C(x) + 2. Programs p_{k,i} ∈ M_k cover the elements of
// E_k = {x : C(x) < 2^k - 2}; diagonalization points d_e = 0^{<e,s>} make A
// differ from every W_e.
//
// ψ_p is stored as length bands: Case II defines ψ on every string of one
// length at once, so explicit storage is out of the question past t ≈ 20.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kolmolab/bitstr.hpp"
#include "kolmolab/oracles.hpp"
#include "kolmolab/trace.hpp"
#include "kolmolab/vm.hpp"

namespace kolmolab {

/// x -> the stage s with x ∈ A_s \ A_{s-1}.
using EntryMap = std::map<BitString, std::uint64_t>;

/// χ_{A_s}(x) under `a`.
inline bool in_a_at(const EntryMap& a, const BitString& x, std::uint64_t s) {
  auto it = a.find(x);
  return it != a.end() && it->second <= s;
}

enum class BandKind { kAllBottom, kChiSnapshot };

/// ψ on every z with lo <= l(z) <= hi. A snapshot band reads ⊥ on `r` and
/// χ_{A_snapshot} elsewhere.
struct Band {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  BandKind kind = BandKind::kAllBottom;
  std::uint64_t snapshot = 0;
  std::set<BitString> r;
  std::uint64_t installed = 0;  // stage at which the band was defined

  Json to_json() const;
  static Band from_json(const Json& j);
};

enum class PsiValue { kUndefined, kBottom, kZero, kOne };

std::string to_string(PsiValue v);

/// Bands partition lengths [0, defined_upto()); everything longer is
/// undefined. Adjacent all-⊥ bands are coalesced.
class PsiTable {
 public:
  std::uint64_t defined_upto() const { return bands_.empty() ? 0 : bands_.back().hi + 1; }
  /// Throws kInvariant unless band.lo == defined_upto() and band.lo <= band.hi.
  void install(Band band);
  const Band* band_at(std::uint64_t length) const;
  PsiValue eval(const BitString& z, const EntryMap& a) const;
  const std::vector<Band>& bands() const { return bands_; }
  Json to_json() const;

 private:
  std::vector<Band> bands_;
};

/// Step-indexed enumeration of E_k: at step t it discovers every x with
/// C^t(x) < 2^k - 2 and emits the least undischarged one with l(x) < t.
class EStream {
 public:
  explicit EStream(std::uint64_t k);
  std::optional<BitString> step(std::uint64_t t, ComplexityOracle& oracle);
  std::uint64_t threshold() const { return threshold_; }
  const std::set<BitString>& discovered() const { return discovered_; }

 private:
  std::uint64_t k_;
  std::uint64_t threshold_;
  std::set<BitString> discovered_;
  std::set<BitString> emitted_;
};

/// W_{e,s} membership: l(z) < s and program index_to_string(e) halts on z
/// within s steps.
bool w_probe(MachineOracle& machine, std::uint64_t e, const BitString& z, std::uint64_t s);

struct Emission {
  BitString x;
  std::uint64_t t = 0;
  std::uint64_t stage = 0;
  std::uint64_t c = 0;  // C^t(x)
  std::string action;   // "a" or "b"
};

struct IccKState {
  std::uint64_t k = 0;
  std::vector<Program> programs;  // M_k: the first 2^k - 2 strings of length k
  BitString sigma;
  std::uint64_t len = 0;
  std::vector<PsiTable> psi;
  std::vector<Emission> emissions;
  std::uint64_t b_actions = 0;
};

/// History of one diagonalization point: (stage, l(d_e)) pairs, first at 0.
struct DiagPoint {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> history;
  std::optional<std::uint64_t> passive_stage;
  // W-probe cache for the current value: probes succeed from this budget on.
  std::optional<std::uint64_t> probe_from;
  bool probe_known = false;

  BitString current() const { return BitString::zero_run(history.back().second); }
  bool active() const { return !passive_stage; }
};

struct IccState {
  std::uint64_t stage = 0;  // stages completed
  std::uint64_t k_max = 0;
  EntryMap a;
  std::vector<IccKState> ks;  // index k - 1
  std::vector<DiagPoint> diag;  // index e - 1, materialized on demand
  std::vector<std::pair<std::uint64_t, std::uint64_t>> repoints;  // (stage, k)

  /// Extends `diag` through e, replaying every re-point.
  void materialize(std::uint64_t e);
  /// R(k, s): every value any d_e with e < k has held.
  std::set<BitString> r_set(std::uint64_t k);
};

/// The two special programs of length e: the lexicographically last strings.
std::pair<Program, Program> tau_programs(std::uint64_t e);

/// ψ_{τ_{e,1}} and ψ_{τ_{e,2}} as point maps. τ_{e,1} is ⊥ off its points;
/// τ_{e,2} is ⊥ off its points when defined and nowhere defined while e is
/// active.
struct TauTables {
  std::map<BitString, bool> tau1;
  std::optional<std::map<BitString, bool>> tau2;
};

TauTables tau_table(std::uint64_t e, const DiagPoint& d);

struct IccConfig {
  std::uint64_t k_max = 3;
  std::uint64_t stages = 10000;
};

class IccSimulator {
 public:
  /// Requires 1 <= k_max <= 4.
  IccSimulator(const IccConfig& config, ComplexityOracle& oracle, MachineOracle& machine,
               Json oracle_desc = "custom");

  /// Runs stage s + 1 for s = state().stage.
  void step();
  void run();

  const IccState& state() const { return state_; }
  /// Trace with final state and re-derived claim checks.
  StageTrace trace();

 private:
  void case_one(std::uint64_t s);
  void case_two(std::uint64_t s);
  bool probe(std::uint64_t e, std::uint64_t s, Json& record);

  IccConfig config_;
  MonotoneComplexityOracle oracle_;
  CheckedMachineOracle machine_;
  Json oracle_desc_;
  IccState state_;
  std::vector<EStream> streams_;
  StageTrace trace_;
};

/// Band structure per k and program, as emitted by --dump-psi.
Json psi_json(const IccState& state);

/// Replays an icc trace and checks claim_1a..claim_4 stage by
/// stage, plus replay consistency and the coverage ledger.
std::vector<CheckResult> check_icc(const StageTrace& trace);

/// Corrupts the first snapshot band that can be stretched over an element
/// entering A after its snapshot. Returns the stage of the corrupted band.
std::optional<std::uint64_t> inject_snapshot_fault(StageTrace& trace);

}  // namespace kolmolab
