#include "kolmolab/vm.hpp"

#include <string>

namespace kolmolab {

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kHalt: return "halt";
    case OutcomeKind::kBottom: return "bot";
    case OutcomeKind::kOutOfBudget: return "oob";
  }
  return "?";
}

std::string_view to_string(Value v) {
  switch (v) {
    case Value::kZero: return "0";
    case Value::kOne: return "1";
    case Value::kBottom: return "bot";
    case Value::kValueError: return "value-error";
    case Value::kPending: return "pending";
  }
  return "?";
}

Outcome run(const Program& p, const BitString& z, std::uint64_t budget) {
  const std::string code = p.bits();
  const std::size_t len = code.size();
  const std::uint64_t input_len = z.size();
  const bool zero_input = z.all_zero();

  std::size_t pc = 0;
  std::uint64_t cursor = 0;
  bool flag = false;
  std::string out;
  std::uint64_t steps = 0;

  while (true) {
    if (steps == budget) return Outcome::out_of_budget(budget);
    ++steps;
    if (pc + 3 > len) return Outcome::halt(BitString::from_bits(out), steps);
    const int op = ((code[pc] - '0') << 2) | ((code[pc + 1] - '0') << 1) | (code[pc + 2] - '0');
    pc += 3;
    switch (op) {
      case 0b000:
        out.push_back('0');
        break;
      case 0b001:
        out.push_back('1');
        break;
      case 0b010:
        out.append(code, pc, std::string::npos);
        return Outcome::halt(BitString::from_bits(out), steps);
      case 0b011:
        return Outcome::halt(BitString::from_bits(out), steps);
      case 0b100:
        return Outcome::bottom(steps);
      case 0b101:
        if (cursor >= input_len) return Outcome::bottom(steps);
        flag = zero_input ? false : z.bit(cursor);
        ++cursor;
        break;
      case 0b110:
        if (!flag) pc += 3;
        break;
      case 0b111:
        pc = 0;
        break;
    }
  }
}

Outcome restrict_to_budget(const Outcome& reference, std::uint64_t budget) {
  if (reference.terminal() && reference.steps <= budget) return reference;
  return Outcome::out_of_budget(budget);
}

Value value_of(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::kOutOfBudget: return Value::kPending;
    case OutcomeKind::kBottom: return Value::kBottom;
    case OutcomeKind::kHalt:
      if (o.output.size() == 1) return o.output.bit(0) ? Value::kOne : Value::kZero;
      return Value::kValueError;
  }
  return Value::kValueError;
}

TotalityResult total_on_window(const Program& p, std::span<const BitString> window,
                               std::uint64_t budget) {
  for (const auto& z : window) {
    const Value v = value_of(run(p, z, budget));
    if (!is_three_valued(v)) return {false, WindowFailure{z, v}};
  }
  return {};
}

}  // namespace kolmolab
