#include "kolmolab/kernels.hpp"

namespace kolmolab::kernels {

std::vector<Outcome> tabulate_serial(std::size_t max_len, const BitString& z,
                                     std::uint64_t budget) {
  const std::uint64_t n = space_size(max_len);
  std::vector<Outcome> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(run(program_at(i), z, budget));
  return out;
}

std::vector<Outcome> tabulate_parallel(std::size_t max_len, const BitString& z,
                                       std::uint64_t budget) {
  const auto n = static_cast<std::int64_t>(space_size(max_len));
  std::vector<Outcome> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run(program_at(static_cast<std::uint64_t>(i)), z, budget);
  }
  return out;
}

}  // namespace kolmolab::kernels
