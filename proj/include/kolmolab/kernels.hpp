#pragma once

// Program-space kernels. Every kernel has a serial reference and an OpenMP
// version; the two must agree bit-for-bit (tests/test_kernels.cpp, and
// bench/bench_kernels.cpp compares their speed).
//
// Programs are addressed by canonical index: all programs of length <= L are
// exactly the indices [0, 2^{L+1} - 1).

#include <algorithm>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <vector>

#include "kolmolab/bitstr.hpp"
#include "kolmolab/errors.hpp"
#include "kolmolab/vm.hpp"

namespace kolmolab::kernels {

inline constexpr std::size_t kMaxSearchLength = 40;
inline constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

/// Number of programs of length <= max_len.
inline std::uint64_t space_size(std::size_t max_len) {
  if (max_len > kMaxSearchLength) throw Error(ErrorKind::kRange, "program space too large");
  return (std::uint64_t{2} << max_len) - 1;
}

inline BitString program_at(std::uint64_t index) { return index_to_string(CanonicalIndex{index}); }

/// Least index in [lo, hi) whose program satisfies `pred`, or kNone.
template <class Pred>
std::uint64_t first_index_serial(std::uint64_t lo, std::uint64_t hi, Pred&& pred) {
  for (std::uint64_t i = lo; i < hi; ++i) {
    if (pred(program_at(i))) return i;
  }
  return kNone;
}

/// Same contract as first_index_serial; the range is split across threads and
/// the minimum index wins. `pred` must be safe to call concurrently.
template <class Pred>
std::uint64_t first_index_parallel(std::uint64_t lo, std::uint64_t hi, Pred&& pred) {
  std::uint64_t best = kNone;
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(hi - lo);
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best)
  for (std::int64_t j = 0; j < n; ++j) {
    const std::uint64_t i = lo + static_cast<std::uint64_t>(j);
    if (i >= best) continue;
    try {
      if (pred(program_at(i))) best = i;
    } catch (...) {
#pragma omp critical(kolmolab_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return best;
}

/// Shortest (then canonically least) program of length <= max_len satisfying
/// `pred`. Serial reference.
template <class Pred>
std::optional<BitString> first_program_serial(std::size_t max_len, Pred&& pred) {
  const std::uint64_t i = first_index_serial(0, space_size(max_len), pred);
  if (i == kNone) return std::nullopt;
  return program_at(i);
}

/// Parallel version: scans one length at a time so it can stop at the first
/// length with a hit, which keeps the answer equal to the serial one.
template <class Pred>
std::optional<BitString> first_program_parallel(std::size_t max_len, Pred&& pred) {
  space_size(max_len);
  for (std::size_t len = 0; len <= max_len; ++len) {
    const std::uint64_t lo = (std::uint64_t{1} << len) - 1;
    const std::uint64_t hi = (std::uint64_t{2} << len) - 1;
    const std::uint64_t i = first_index_parallel(lo, hi, pred);
    if (i != kNone) return program_at(i);
  }
  return std::nullopt;
}

/// Outcome of every program of length <= max_len on input z, by canonical index.
std::vector<Outcome> tabulate_serial(std::size_t max_len, const BitString& z, std::uint64_t budget);
std::vector<Outcome> tabulate_parallel(std::size_t max_len, const BitString& z,
                                       std::uint64_t budget);

}  // namespace kolmolab::kernels
