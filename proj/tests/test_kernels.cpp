#include <doctest.h>

#include <random>

#include "kolmolab/errors.hpp"
#include "kolmolab/kernels.hpp"

using namespace kolmolab;
using namespace kolmolab::kernels;

TEST_CASE("space size counts programs of bounded length") {
  CHECK(space_size(0) == 1);
  CHECK(space_size(2) == 7);
  CHECK(space_size(10) == 2047);
  CHECK_THROWS_AS(space_size(41), Error);
}

TEST_CASE("parallel first-hit search equals the serial reference") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t salt = rng();
    const std::uint64_t mod = 1 + rng() % 700;
    auto pred = [&](const BitString& p) { return (p.hash() ^ salt) % mod == 0; };
    const std::size_t max_len = rng() % 11;
    REQUIRE(first_program_serial(max_len, pred) == first_program_parallel(max_len, pred));
    REQUIRE(first_index_serial(5, 900, pred) == first_index_parallel(5, 900, pred));
  }
}

TEST_CASE("no hit yields none") {
  auto never = [](const BitString&) { return false; };
  CHECK_FALSE(first_program_serial(6, never).has_value());
  CHECK_FALSE(first_program_parallel(6, never).has_value());
  CHECK(first_index_parallel(0, 100, never) == kNone);
}

TEST_CASE("predicate failures propagate out of the parallel region") {
  auto boom = [](const BitString& p) -> bool {
    if (p.size() == 3) throw Error(ErrorKind::kInvariant, "boom");
    return false;
  };
  CHECK_THROWS_AS(first_program_parallel(5, boom), Error);
}

TEST_CASE("parallel tabulation equals serial tabulation") {
  for (const char* z : {"", "0", "101"}) {
    const BitString input = BitString::from_bits(z);
    const auto a = tabulate_serial(10, input, 30);
    const auto b = tabulate_parallel(10, input, 30);
    REQUIRE(a.size() == space_size(10));
    REQUIRE(a == b);
    for (std::uint64_t i = 0; i < a.size(); i += 97) REQUIRE(a[i] == run(program_at(i), input, 30));
  }
}
