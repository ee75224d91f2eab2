#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "kolmolab/bitstr.hpp"

namespace kolmolab {

/// Every bitstring is a program; decoding is total.
using Program = BitString;

enum class OutcomeKind { kHalt, kBottom, kOutOfBudget };

/// Result of a budgeted run. `steps` never exceeds the budget; for
/// kOutOfBudget it equals the budget.
struct Outcome {
  OutcomeKind kind = OutcomeKind::kOutOfBudget;
  BitString output;
  std::uint64_t steps = 0;

  static Outcome halt(BitString out, std::uint64_t steps) {
    return {OutcomeKind::kHalt, std::move(out), steps};
  }
  static Outcome bottom(std::uint64_t steps) { return {OutcomeKind::kBottom, {}, steps}; }
  static Outcome out_of_budget(std::uint64_t budget) {
    return {OutcomeKind::kOutOfBudget, {}, budget};
  }

  bool terminal() const noexcept { return kind != OutcomeKind::kOutOfBudget; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

std::string_view to_string(OutcomeKind kind);

/// Executes the BitVM for at most `budget` fetch-execute steps.
///
/// Machine state: bit-offset pc, input cursor, output buffer and one flag A,
/// all starting at zero/empty. Opcodes are 3 bits, one step each:
///
///   000 EMIT0     append 0
///   001 EMIT1     append 1
///   010 EMITREST  append the remaining program bits, halt with the output
///   011 HALT      halt with the output
///   100 BOT       halt with ⊥
///   101 READ      A := next input bit, or halt with ⊥ if the input is used up
///   110 SKIPZ     if A = 0, skip the next opcode
///   111 LOOP      pc := 0
///
/// Fetching with fewer than 3 bits left halts with the current output and
/// costs one step.
Outcome run(const Program& p, const BitString& z, std::uint64_t budget);

/// Restricts an outcome observed at some budget to a smaller budget.
/// Halting outcomes are budget-stable, so this is exact whenever
/// `budget <= observed_budget` or `reference` is terminal.
Outcome restrict_to_budget(const Outcome& reference, std::uint64_t budget);

/// Three-valued reading of an outcome.
enum class Value { kZero, kOne, kBottom, kValueError, kPending };

std::string_view to_string(Value v);

Value value_of(const Outcome& o);

inline bool is_bit(Value v) { return v == Value::kZero || v == Value::kOne; }
inline bool is_three_valued(Value v) { return is_bit(v) || v == Value::kBottom; }

struct WindowFailure {
  BitString input;
  Value kind = Value::kPending;
};

struct TotalityResult {
  bool total = true;
  std::optional<WindowFailure> witness;
};

/// Budgeted totality on a finite window: every point must yield 0, 1 or ⊥.
/// On failure reports the first offending point in window order.
TotalityResult total_on_window(const Program& p, std::span<const BitString> window,
                               std::uint64_t budget);

}  // namespace kolmolab
