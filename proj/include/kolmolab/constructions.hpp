#pragma once

// Stage simulators for three effective constructions over naturals and
// programs, each paired with an offline checker that re-derives every
// invariant from the trace alone.
//
//   complex set     an r.e. A whose initial segments are incompressible on
//                   infinitely many intervals I_k
//   gap             enumeration of the sets B_k by dovetailed search for
//                   program subsets that output ⊥ on some x
//   hard instances  the finite game that builds A_n ⊆ {0,1}^n with a string
//                   whose instance complexity is at least n

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kolmolab/bitstr.hpp"
#include "kolmolab/oracles.hpp"
#include "kolmolab/trace.hpp"
#include "kolmolab/vm.hpp"

namespace kolmolab {

// ---------------------------------------------------------------------------
// Complex set

/// t_0 = 0, t_{k+1} = 2^{t_k}, I_k = (t_k, t_{k+1}],
/// f_k = Σ_{i ∈ I_k} (i - t_k + 1), g_k = max{l : 2^{l+1} - 1 < f_k}.
struct IntervalParams {
  std::uint64_t k = 0;
  std::uint64_t t_k = 0;
  std::uint64_t t_k1 = 0;
  std::uint64_t f_k = 0;
  std::uint64_t g_k = 0;

  std::uint64_t size() const { return t_k1 - t_k; }
  bool contains(std::uint64_t n) const { return t_k < n && n <= t_k1; }
  /// Number of distinct programs of length <= g_k.
  std::uint64_t capacity() const { return (std::uint64_t{2} << g_k) - 1; }
};

/// Throws kRange for k >= 5 (t_6 does not fit a machine word).
IntervalParams interval_params(std::uint64_t k);

enum class ExhaustionPolicy {
  /// Abort when a licensed enumeration would fill I_k, or when the distinct
  /// strings certified at complexity <= g_k outnumber the programs of that
  /// length.
  kStrict,
  /// Abort only on the counting argument.
  kPigeonholeOnly,
};

struct ComplexSetConfig {
  std::uint64_t k_max = 3;
  std::uint64_t stages = 200;
  ExhaustionPolicy policy = ExhaustionPolicy::kStrict;
};

struct PigeonholeViolation {
  std::uint64_t stage = 0;
  std::uint64_t k = 0;
  std::string reason;  // "exhaustion_attempt" or "certified_too_many"
  std::uint64_t certified = 0;
  std::uint64_t capacity = 0;
};

struct ComplexSetResult {
  std::set<std::uint64_t> a;
  std::uint64_t enumerations = 0;
  std::optional<PigeonholeViolation> violation;
  StageTrace trace;
};

/// χ_A(0)..χ_A(n), n+1 bits.
BitString chi_prefix(const std::set<std::uint64_t>& a, std::uint64_t n);

/// Runs stages 1..stages. Stage s+1 visits k = 0..min(s, k_max) against the
/// snapshot A_s and enumerates min(Ā_s ∩ I_k) when every prefix over I_k has
/// C^s <= g_k. `oracle_desc` is stored in the trace parameters.
ComplexSetResult complex_set_run(const ComplexSetConfig& config, ComplexityOracle& oracle,
                                 const Json& oracle_desc = "custom");

/// Replays a complex-set trace and re-derives every check.
std::vector<CheckResult> check_complex_set(const StageTrace& trace);

// ---------------------------------------------------------------------------
// Gap enumeration

struct GapRemoval {
  std::uint64_t subset = 0;  // bitmask over P_k
  BitString x;
  std::uint64_t s = 0;
  std::uint64_t work = 0;  // candidates examined when found
};

struct GapState {
  std::uint64_t k = 0;
  std::vector<Program> programs;  // P_k = {0,1}^{<=k}, canonical order
  std::vector<bool> alive;        // S_k membership by bitmask
  std::uint64_t alive_count = 0;
  std::set<BitString> b;
  std::vector<GapRemoval> removals;
  std::uint64_t work = 0;  // (I, x, s) candidates examined
  std::uint64_t last_s = 0;
  StageTrace trace;
};

/// Dovetails over s = 1, 2, ...; per s over alive subsets by ascending bitmask;
/// per subset over x with canonical index < s. (I, x, s) qualifies when every
/// p ∈ I gives ⊥ on x within s steps. Stops once `budget` candidates have been
/// examined or S_k is empty. Requires k <= 3.
GapState gap_bk_run(std::uint64_t k, std::uint64_t budget, MachineOracle& machine);

std::vector<CheckResult> check_gap(const StageTrace& trace);

// ---------------------------------------------------------------------------
// Hard-instances game

enum class GameCase { kA, kB };

struct GameStep {
  std::uint64_t step = 0;  // s+1
  Program p;
  GameCase which = GameCase::kA;
  std::uint64_t column = 0;  // j in case (a), the old i in case (b)
  bool enumerated = false;
  std::uint64_t i_after = 0;
  std::size_t i_size = 0;
  std::size_t j_size = 0;
};

struct HIGameState {
  std::uint64_t n = 0;
  std::uint64_t budget = 0;
  std::vector<BitString> columns;  // x_1..x_{2^n}, stored 0-based
  std::set<std::uint64_t> a;       // 1-based column indices enumerated into A_n
  std::set<Program> i_set;
  std::set<std::uint64_t> j_set;
  std::uint64_t i = 1;
  std::vector<GameStep> log;
  std::vector<std::uint64_t> decided_at;  // per column: step it left J (0 = never)
  bool quiescent = false;
  StageTrace trace;

  bool chi(std::uint64_t column) const { return a.contains(column); }
};

/// Step 0, then steps s+1 for s = 0..budget-1, each firing at most one rule
/// for the least p ∈ I that can fire; quiescence is tested at the budget.
/// Requires 1 <= n <= 4.
HIGameState hard_instances_run(std::uint64_t n, std::uint64_t budget, MachineOracle& machine);

enum class ProgramVerdict {
  kInconsistentAt,  // removed in case (a): decided column disagrees with χ
  kBottomAtI0,      // removed in case (b): ⊥ on x_{i_0}
  kPendingOnJ,      // still in I: runs out of budget on some column in J
  kValueErrorOnJ,   // still in I: halts with a non-bit on some column in J
  kUnexplained,
};

std::string to_string(ProgramVerdict v);

struct CertificateReport {
  bool ok = false;
  std::string failure;
  std::vector<std::pair<Program, ProgramVerdict>> programs;
  /// ic on the full game window at the budget, restricted to programs shorter
  /// than n. Must be infinite for the certificate to hold.
  std::optional<std::uint64_t> ic_below_n;
};

/// Throws kPrecondition when the state is not quiescent at `budget`. Returns
/// a failed report, before any classification, when |I| != |J|.
CertificateReport verify_certificate(const HIGameState& g, std::uint64_t budget);

std::vector<CheckResult> check_hard_instances(const StageTrace& trace);

}  // namespace kolmolab
