#pragma once

// Description codecs for initial segments of r.e. sets. An enumeration is a
// finite prefix of an r.e. presentation (naturals, repeats allowed); encoders
// assume it already lists every element below the requested bound.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "kolmolab/bitstr.hpp"

namespace kolmolab {

using Enumeration = std::vector<std::uint64_t>;

inline constexpr std::size_t kUnboundedReplay = std::numeric_limits<std::size_t>::max();

Enumeration parse_enumeration(std::string_view json_text);
Enumeration load_enumeration(const std::filesystem::path& path);

/// χ_A(0)..χ_A(last) read off the enumeration.
BitString characteristic_prefix(std::span<const std::uint64_t> enumeration, std::uint64_t last);

/// Code for χ_A↾n = χ_A(0)..χ_A(n): bin(n) followed by bin(m), m = |A ∩ [0,n]|,
/// padded to equal halves; 2·ceil(log2(n+1)) bits. Requires n >= 1.
///
/// The one count that overflows a half, m = n+1 = 2^L, is written as the
/// half "01..1" (a genuine bin(n) always starts with 1) followed by 0^L.
BitString two_log_encode(std::span<const std::uint64_t> enumeration, std::uint64_t n);

/// Replays the enumeration until m distinct elements <= n have appeared.
/// Throws kPending when the replay runs out first, kValidation on a malformed code.
BitString two_log_decode(const BitString& code, std::span<const std::uint64_t> enumeration,
                         std::size_t replay_budget = kUnboundedReplay);

/// Conditional code for χ_A(0)..χ_A(n-1) given n: bin(m), m = |A ∩ [0,n)|,
/// padded to ceil(log2(n+1)) bits.
BitString log_cond_encode(std::span<const std::uint64_t> enumeration, std::uint64_t n);
BitString log_cond_decode(const BitString& code, std::uint64_t n,
                          std::span<const std::uint64_t> enumeration,
                          std::size_t replay_budget = kUnboundedReplay);

/// Bounded-mind-change approximation table: approx[x][s] = ḡ(x,s), plus a
/// finite presentation f(0), f(1), ... of a nondecreasing unbounded function.
struct MindChangeTable {
  std::vector<std::vector<BitString>> approx;
  std::vector<std::uint64_t> f;

  static MindChangeTable parse(std::string_view json_text);
  static MindChangeTable load_file(const std::filesystem::path& path);
  std::string to_json() const;
};

std::uint64_t mind_changes(std::span<const BitString> row);

/// Throws kValidation when a row changes more than x times or f decreases.
void validate(const MindChangeTable& table);

struct MindChangeCode {
  std::uint64_t x_count = 0;
  std::uint64_t n_prime = 0;
  friend bool operator==(const MindChangeCode&, const MindChangeCode&) = default;
};

/// n' = min{x : m(x) > n} with m(x) = 1 + max{j : f(j) <= x}. Throws kRange
/// when the finite presentation of f cannot settle n'.
std::uint64_t mindchange_n_prime(const MindChangeTable& table, std::uint64_t n);

MindChangeCode mindchange_encode(const MindChangeTable& table, std::uint64_t n);

/// Replays ḡ(n', ·) until x_count changes have happened and returns the first
/// n+1 bits of the value reached.
BitString mindchange_decode(const MindChangeTable& table, const MindChangeCode& code,
                            std::uint64_t n);

/// Self-delimiting bit form: bits of bin(x_count) doubled, then "01", then
/// bin(n'). Length 2·ceil(log2(x_count+1)) + 2 + ceil(log2(n'+1)).
BitString mindchange_pack(const MindChangeCode& code);
MindChangeCode mindchange_unpack(const BitString& bits);

}  // namespace kolmolab
