#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kolmolab {

/// A finite binary word.
///
/// Two representations share one value space: explicit bits, and the symbolic
/// zero run 0^n used for diagonalization points whose lengths are far beyond
/// what explicit storage allows. Equality, ordering and hashing are defined on
/// the denoted word, so `BitString::zero_run(3) == BitString::from_bits("000")`.
///
/// Ordering is the canonical length-lexicographic order (λ < 0 < 1 < 00 < ...).
class BitString {
 public:
  /// The empty word λ.
  BitString() = default;

  /// Parses a word over {'0','1'}. Also accepts the symbolic text "0^N".
  static BitString from_bits(std::string_view text);
  static BitString zero_run(std::uint64_t length);

  std::uint64_t size() const noexcept { return symbolic_ ? run_ : bits_.size(); }
  bool empty() const noexcept { return size() == 0; }
  bool is_symbolic() const noexcept { return symbolic_; }
  bool all_zero() const noexcept { return zero_; }

  /// 0-based bit access; out-of-range reads are a precondition violation.
  bool bit(std::uint64_t index) const;

  /// Explicit bits. Symbolic words are materialized when short enough.
  std::string bits() const;

  /// Text form used in JSON/CSV: explicit bits, or "0^N" for symbolic runs
  /// longer than 64 bits.
  std::string text() const;

  /// Concatenation of explicit words (symbolic operands are materialized).
  BitString operator+(const BitString& rhs) const;

  friend bool operator==(const BitString& a, const BitString& b) noexcept;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) noexcept;

  std::size_t hash() const noexcept;

 private:
  std::string bits_;
  std::uint64_t run_ = 0;
  bool symbolic_ = false;
  bool zero_ = true;
};

/// Position of a word in the canonical enumeration λ, 0, 1, 00, 01, ...
struct CanonicalIndex {
  std::uint64_t value = 0;
  friend auto operator<=>(const CanonicalIndex&, const CanonicalIndex&) = default;
};

BitString index_to_string(CanonicalIndex n);
/// Throws kRange when the word is too long for a 64-bit index.
CanonicalIndex string_to_index(const BitString& x);

/// Cantor pairing (e+s)(e+s+1)/2 + s; strictly increasing in `s`.
std::uint64_t pair(std::uint64_t e, std::uint64_t s);
std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t z);

/// Lexicographic successor with 1-based positions b_1..b_n: for
/// i = min{j : b_j = 0}, succ(b_1..b_n) = 0^{i-1} 1 b_{i+1}..b_n. Equivalently a
/// little-endian binary increment. Throws kPrecondition on 1^n.
BitString succ(const BitString& sigma);

/// 1-based positions j with sigma(j) = 1, ascending.
std::vector<std::size_t> set_positions(const BitString& sigma);

/// Little-endian n-bit word of m (bit b_1 is the least significant).
BitString little_endian(std::uint64_t m, std::size_t n);

/// First `m` words of length `k` in lexicographic order. Throws kRange if m > 2^k.
std::vector<BitString> first_strings_of_length(std::size_t k, std::uint64_t m);

/// Number of bits in the shortest binary numeral of n, i.e. ceil(log2(n+1)).
std::size_t bit_length(std::uint64_t n);

/// Binary numeral of n, most significant first, left-padded with zeros to
/// `width` bits (bin(0) is λ before padding).
std::string binary(std::uint64_t n, std::size_t width = 0);

}  // namespace kolmolab

template <>
struct std::hash<kolmolab::BitString> {
  std::size_t operator()(const kolmolab::BitString& x) const noexcept { return x.hash(); }
};
