#include "kolmolab/bitstr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <limits>

#include "kolmolab/errors.hpp"

namespace kolmolab {

namespace {

constexpr std::uint64_t kMaterializeLimit = std::uint64_t{1} << 24;

}  // namespace

BitString BitString::from_bits(std::string_view text) {
  if (text.size() > 2 && text.substr(0, 2) == "0^") {
    std::uint64_t n = 0;
    auto digits = text.substr(2);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw Error(ErrorKind::kParse, "bad zero-run literal '" + std::string(text) + "'");
    }
    return zero_run(n);
  }
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::kParse, "not a bitstring: '" + std::string(text) + "'");
    }
    out.zero_ = out.zero_ && c == '0';
    out.bits_.push_back(c);
  }
  return out;
}

BitString BitString::zero_run(std::uint64_t length) {
  BitString out;
  out.symbolic_ = true;
  out.run_ = length;
  return out;
}

bool BitString::bit(std::uint64_t index) const {
  if (index >= size()) {
    throw Error(ErrorKind::kPrecondition, "bit index out of range");
  }
  return symbolic_ ? false : bits_[index] == '1';
}

std::string BitString::bits() const {
  if (!symbolic_) return bits_;
  if (run_ > kMaterializeLimit) {
    throw Error(ErrorKind::kRange, "zero run too long to materialize");
  }
  return std::string(run_, '0');
}

std::string BitString::text() const {
  if (symbolic_ && run_ > 64) return "0^" + std::to_string(run_);
  return bits();
}

BitString BitString::operator+(const BitString& rhs) const {
  if (symbolic_ && rhs.symbolic_) return zero_run(run_ + rhs.run_);
  return from_bits(bits() + rhs.bits());
}

bool operator==(const BitString& a, const BitString& b) noexcept {
  if (a.size() != b.size()) return false;
  if (a.symbolic_ || b.symbolic_) return a.zero_ && b.zero_;
  return a.bits_ == b.bits_;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) noexcept {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (a.symbolic_ || b.symbolic_) {
    // Among words of one length the zero word is least.
    if (a.zero_ && b.zero_) return std::strong_ordering::equal;
    return a.zero_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.bits_.compare(b.bits_) <=> 0;
}

std::size_t BitString::hash() const noexcept {
  const std::size_t len_hash = std::hash<std::uint64_t>{}(size());
  if (zero_) return len_hash ^ 0x9e3779b97f4a7c15ULL;
  return std::hash<std::string>{}(bits_) ^ (len_hash << 1);
}

BitString index_to_string(CanonicalIndex n) {
  if (n.value == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorKind::kRange, "canonical index too large");
  }
  const std::uint64_t v = n.value + 1;
  const int width = std::bit_width(v);
  std::string out;
  out.reserve(static_cast<std::size_t>(width));
  for (int i = width - 2; i >= 0; --i) out.push_back(((v >> i) & 1U) ? '1' : '0');
  return BitString::from_bits(out);
}

CanonicalIndex string_to_index(const BitString& x) {
  if (x.size() >= 64) throw Error(ErrorKind::kRange, "word too long for a canonical index");
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < x.size(); ++i) v = (v << 1) | (x.bit(i) ? 1U : 0U);
  return CanonicalIndex{v - 1};
}

std::uint64_t pair(std::uint64_t e, std::uint64_t s) {
  std::uint64_t sum = 0;
  std::uint64_t prod = 0;
  std::uint64_t out = 0;
  if (__builtin_add_overflow(e, s, &sum) || __builtin_mul_overflow(sum, sum + 1, &prod) ||
      __builtin_add_overflow(prod / 2, s, &out)) {
    throw Error(ErrorKind::kRange, "pairing overflow");
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t z) {
  // w = largest integer with w(w+1)/2 <= z
  std::uint64_t w = 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = std::uint64_t{1} << 33;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    const unsigned __int128 tri = static_cast<unsigned __int128>(mid) * (mid + 1) / 2;
    if (tri <= z) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  w = lo;
  const std::uint64_t s = z - w * (w + 1) / 2;
  return {w - s, s};
}

BitString succ(const BitString& sigma) {
  std::string bits = sigma.bits();
  const auto first_zero = bits.find('0');
  if (first_zero == std::string::npos) {
    throw Error(ErrorKind::kPrecondition, "succ applied to all-ones word");
  }
  std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(first_zero), '0');
  bits[first_zero] = '1';
  return BitString::from_bits(bits);
}

std::vector<std::size_t> set_positions(const BitString& sigma) {
  std::vector<std::size_t> out;
  for (std::uint64_t i = 0; i < sigma.size(); ++i) {
    if (sigma.bit(i)) out.push_back(static_cast<std::size_t>(i + 1));
  }
  return out;
}

BitString little_endian(std::uint64_t m, std::size_t n) {
  std::string bits(n, '0');
  for (std::size_t i = 0; i < n && i < 64; ++i) bits[i] = ((m >> i) & 1U) ? '1' : '0';
  return BitString::from_bits(bits);
}

std::vector<BitString> first_strings_of_length(std::size_t k, std::uint64_t m) {
  if (k < 64 && m > (std::uint64_t{1} << k)) {
    throw Error(ErrorKind::kRange, "asked for more than 2^k words of length k");
  }
  std::vector<BitString> out;
  out.reserve(static_cast<std::size_t>(m));
  for (std::uint64_t i = 0; i < m; ++i) out.push_back(BitString::from_bits(binary(i, k)));
  return out;
}

std::size_t bit_length(std::uint64_t n) { return static_cast<std::size_t>(std::bit_width(n)); }

std::string binary(std::uint64_t n, std::size_t width) {
  std::string out;
  for (std::uint64_t v = n; v != 0; v >>= 1) out.push_back((v & 1U) ? '1' : '0');
  if (out.size() < width) out.append(width - out.size(), '0');
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace kolmolab
