#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "kolmolab/codecs.hpp"
#include "kolmolab/errors.hpp"

using namespace kolmolab;

namespace {

BitString bs(const std::string& s) { return BitString::from_bits(s); }

// ceil(log2(n+1)) by repeated halving, independent of bit_length.
std::size_t ceil_log2_succ(std::uint64_t n) {
  std::size_t bits = 0;
  while (n > 0) {
    n /= 2;
    ++bits;
  }
  return bits;
}

// Random presentation of a random finite set: elements shuffled, some repeated.
Enumeration random_enumeration(std::mt19937_64& rng, std::uint64_t universe, double density) {
  std::bernoulli_distribution in(density);
  Enumeration out;
  for (std::uint64_t a = 0; a < universe; ++a) {
    if (in(rng)) out.push_back(a);
  }
  const std::size_t repeats = out.empty() ? 0 : rng() % 5;
  for (std::size_t r = 0; r < repeats; ++r) out.push_back(out[rng() % out.size()]);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::string chi_bits(const Enumeration& e, std::uint64_t count) {
  std::set<std::uint64_t> members(e.begin(), e.end());
  std::string out;
  for (std::uint64_t i = 0; i < count; ++i) out += members.count(i) ? '1' : '0';
  return out;
}

}  // namespace

TEST_CASE("two-log examples") {
  const Enumeration odd{1, 3, 5, 7};
  CHECK(two_log_encode(odd, 4) == bs("100010"));
  CHECK(two_log_decode(bs("100010"), odd) == bs("01010"));
  CHECK(two_log_decode(two_log_encode({}, 1), {}) == bs("00"));
  CHECK(two_log_encode({}, 100).size() == 14);
  CHECK_THROWS_AS(two_log_encode(odd, 0), Error);
}

TEST_CASE("two-log full segment uses the escape code") {
  const Enumeration all{0, 1, 2, 3};
  const BitString code = two_log_encode(all, 3);
  CHECK(code == bs("0100"));
  CHECK(two_log_decode(code, all) == bs("1111"));
}

TEST_CASE("log-conditional examples") {
  const Enumeration odd{1, 3, 5, 7};
  CHECK(log_cond_encode(odd, 4) == bs("010"));
  CHECK(log_cond_decode(bs("010"), 4, odd) == bs("0101"));
  CHECK(log_cond_encode({}, 7) == bs("000"));
  CHECK(log_cond_encode({}, 255).size() == 8);
}

TEST_CASE("decoders report a stalled enumeration as pending") {
  const Enumeration late{9, 8, 1};
  const BitString code = two_log_encode(late, 4);
  try {
    two_log_decode(code, late, 2);
    FAIL("expected pending");
  } catch (const Error& ex) {
    CHECK(ex.kind() == ErrorKind::kPending);
  }
  CHECK(two_log_decode(code, late, 3) == bs("01000"));
  CHECK_THROWS_AS(two_log_decode(code, Enumeration{9}), Error);
  CHECK_THROWS_AS(two_log_decode(bs("101"), late), Error);
  CHECK_THROWS_AS(log_cond_decode(bs("01"), 4, late), Error);
}

TEST_CASE("codec round-trips on random sets") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = 1 + rng() % 10000;
    const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Enumeration e = random_enumeration(rng, n + 1 + rng() % 50, density);

    const BitString two = two_log_encode(e, n);
    REQUIRE(two.size() == 2 * ceil_log2_succ(n));
    REQUIRE(two_log_decode(two, e).bits() == chi_bits(e, n + 1));

    const BitString one = log_cond_encode(e, n);
    REQUIRE(one.size() == ceil_log2_succ(n));
    REQUIRE(log_cond_decode(one, n, e).bits() == chi_bits(e, n));
  }
}

TEST_CASE("mind-change examples") {
  const BitString s0 = bs("0110"), s1 = bs("0111");
  MindChangeTable t;
  t.approx = {{bs("0")}, {bs("10")}, {s0, s0, s1, s1}};
  t.f = {0, 1, 2, 3, 4};
  validate(t);
  const MindChangeCode code{mind_changes(t.approx[2]), 2};
  CHECK(code.x_count == 1);
  CHECK(mindchange_decode(t, code, 3) == s1);

  MindChangeTable flat;
  flat.approx = {{bs("1")}, {bs("11"), bs("11")}, {bs("101"), bs("101")}};
  flat.f = {0, 5};
  const auto c = mindchange_encode(flat, 0);
  CHECK(c.x_count == 0);
  CHECK(mindchange_decode(flat, c, 0) == bs("1"));
}

TEST_CASE("mind-change n' follows the inverse of f") {
  MindChangeTable t;
  t.f = {0, 0, 3, 7, 9};
  t.approx.assign(10, {bs("0000000000")});
  // m(0..2) = 2, m(3..6) = 3, m(7..8) = 4; m(9) needs f(5).
  CHECK(mindchange_n_prime(t, 0) == 0);
  CHECK(mindchange_n_prime(t, 1) == 0);
  CHECK(mindchange_n_prime(t, 2) == 3);
  CHECK(mindchange_n_prime(t, 3) == 7);
  CHECK_THROWS_AS(mindchange_n_prime(t, 4), Error);
}

TEST_CASE("mind-change validation rejects too many changes") {
  MindChangeTable t;
  t.approx = {{bs("0")}, {bs("10"), bs("11"), bs("10")}};
  t.f = {0, 1};
  try {
    validate(t);
    FAIL("expected a validation error");
  } catch (const Error& ex) {
    CHECK(ex.kind() == ErrorKind::kValidation);
  }
  CHECK_THROWS_AS(mindchange_encode(t, 0), Error);
}

TEST_CASE("mind-change pack round-trip and length") {
  for (std::uint64_t x = 0; x < 40; ++x) {
    for (std::uint64_t np : {0, 1, 2, 7, 100, 4096}) {
      const MindChangeCode code{x, np};
      const BitString packed = mindchange_pack(code);
      REQUIRE(mindchange_unpack(packed) == code);
      REQUIRE(packed.size() == 2 * ceil_log2_succ(x) + 2 + ceil_log2_succ(np));
    }
  }
  CHECK_THROWS_AS(mindchange_unpack(bs("0011")), Error);
  CHECK_THROWS_AS(mindchange_unpack(bs("10")), Error);
}

TEST_CASE("mind-change round-trips on synthetic tables") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t rows = 4 + rng() % 20;
    const std::uint64_t width = rows + 2;
    MindChangeTable t;
    std::string truth(width, '0');
    for (auto& c : truth) c = (rng() & 1U) ? '1' : '0';
    for (std::uint64_t x = 0; x < rows; ++x) {
      // Guesses for χ↾x converge to the truth after at most x changes.
      const std::uint64_t changes = x == 0 ? 0 : rng() % (x + 1);
      std::vector<BitString> row;
      std::vector<std::string> values;
      for (std::uint64_t j = 0; j < changes; ++j) {
        std::string wrong = truth;
        wrong[rng() % (x + 1)] ^= 1;
        if (!values.empty() && values.back() == wrong) wrong[x + 1] ^= 1;
        values.push_back(wrong);
      }
      if (!values.empty() && values.back() == truth) values.back()[x + 1] ^= 1;
      values.push_back(truth);
      for (const auto& v : values) {
        const std::size_t hold = 1 + rng() % 3;
        for (std::size_t h = 0; h < hold; ++h) row.push_back(bs(v));
      }
      t.approx.push_back(row);
    }
    std::uint64_t step = 0;
    for (std::uint64_t j = 0; j < rows; ++j) {
      t.f.push_back(step);
      step += rng() % 3;
    }
    validate(t);
    for (std::uint64_t n = 0; n < rows; ++n) {
      std::uint64_t np = 0;
      try {
        np = mindchange_n_prime(t, n);
      } catch (const Error& ex) {
        REQUIRE(ex.kind() == ErrorKind::kRange);
        continue;
      }
      const MindChangeCode code = mindchange_encode(t, n);
      REQUIRE(code.n_prime == np);
      REQUIRE(code.x_count <= np);
      REQUIRE(t.f[n] >= code.n_prime);
      REQUIRE(mindchange_unpack(mindchange_pack(code)) == code);
      REQUIRE(mindchange_decode(t, code, n).bits() == truth.substr(0, n + 1));
    }
  }
}
