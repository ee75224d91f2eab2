#include <doctest.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kolmolab/complexity.hpp"
#include "kolmolab/errors.hpp"

using namespace kolmolab;

namespace {

BitString bs(const std::string& s) { return BitString::from_bits(s); }

// Independent brute force: plain loop over the canonical enumeration.
std::optional<std::uint64_t> brute_c(const BitString& x, const BitString& cond, std::uint64_t budget,
                                     std::size_t max_len) {
  for (std::uint64_t i = 0; i < (std::uint64_t{2} << max_len) - 1; ++i) {
    const BitString p = index_to_string(CanonicalIndex{i});
    const Outcome o = run(p, cond, budget);
    if (o.kind == OutcomeKind::kHalt && o.output == x) return p.size();
  }
  return std::nullopt;
}

std::optional<std::uint64_t> brute_ic(const BitString& x, const std::map<std::string, int>& w,
                                      std::uint64_t budget, std::size_t max_len, bool weak) {
  for (std::uint64_t i = 0; i < (std::uint64_t{2} << max_len) - 1; ++i) {
    const BitString p = index_to_string(CanonicalIndex{i});
    bool ok = true;
    for (const auto& [z, chi] : w) {
      const Outcome o = run(p, bs(z), budget);
      const bool at_x = bs(z) == x;
      if (o.kind == OutcomeKind::kOutOfBudget) {
        ok = weak && !at_x;
      } else if (o.kind == OutcomeKind::kBottom) {
        ok = !at_x;
      } else {
        ok = o.output == bs(std::to_string(chi));
      }
      if (!ok) break;
    }
    if (ok) return p.size();
  }
  return std::nullopt;
}

ConsistencyWindow window(const std::map<std::string, int>& w) {
  ConsistencyWindow out;
  for (const auto& [z, chi] : w) out.insert(bs(z), chi == 1);
  return out;
}

const std::vector<Parallelism> kModes{Parallelism::kSerial, Parallelism::kParallel};

}  // namespace

TEST_CASE("c_approx examples") {
  for (auto mode : kModes) {
    SearchOptions opts{mode, nullptr};
    CHECK(c_approx({}, 1, 8, opts).value == 0);
    const auto eleven = c_approx(bs("11"), 4, 8, opts);
    CHECK(eleven.value == 5);
    CHECK(eleven.witness == bs("01011"));
    CHECK(c_approx(bs("0"), 2, 8, opts).value == 3);
    CHECK(c_approx(bs("0"), 1, 8, opts).value == 4);
  }
}

TEST_CASE("cond_c_approx examples") {
  CHECK(cond_c_approx({}, bs("0110"), 1, 8).value == 0);
  CHECK(cond_c_approx(bs("1"), {}, 2, 8).value == 3);
  for (std::uint64_t i = 0; i < 31; ++i) {
    const BitString x = index_to_string(CanonicalIndex{i});
    const auto with_self = cond_c_approx(x, x, 8, 8);
    const auto plain = c_approx(x, 8, 8);
    REQUIRE(plain.value.has_value());
    REQUIRE(with_self.value.has_value());
    REQUIRE(*with_self.value <= *plain.value);
  }
}

TEST_CASE("c_approx agrees with brute force") {
  RunCache cache;
  for (std::uint64_t i = 0; i < 63; ++i) {
    const BitString x = index_to_string(CanonicalIndex{i});
    for (std::uint64_t b : {1, 2, 3, 6}) {
      for (const char* cond : {"", "01"}) {
        const auto got = cond_c_approx(x, bs(cond), b, 9, {Parallelism::kParallel, &cache});
        REQUIRE(got.value == brute_c(x, bs(cond), b, 9));
        if (got.witness) REQUIRE(run(*got.witness, bs(cond), b) == Outcome::halt(x, run(*got.witness, bs(cond), b).steps));
      }
    }
  }
}

TEST_CASE("C^s is non-increasing in the budget and meets the print bound") {
  for (std::uint64_t i = 0; i < 127; ++i) {
    const BitString x = index_to_string(CanonicalIndex{i});
    std::optional<std::uint64_t> prev;
    for (std::uint64_t b = 1; b <= 12; ++b) {
      const auto v = c_approx(x, b, x.size() + 3).value;
      if (prev) REQUIRE((v && *v <= *prev));
      prev = v;
    }
    REQUIRE(c_approx(x, 1, x.size() + 3).value <= x.size() + 3);
  }
}

TEST_CASE("ic_window examples") {
  const auto w = window({{"", 0}, {"0", 0}, {"1", 0}});
  const auto v = ic_window(bs("0"), w, 2, 8);
  CHECK(v.value == 3);
  CHECK(v.witness == bs("000"));
  CHECK(ic_window(bs("0"), window({{"0", 0}}), 2, 8).value == 3);
  CHECK(ic_window({}, window({{"", 1}}), 4, 2).infinite());
  CHECK(ic_bar_window(bs("0"), w, 2, 8).value == 3);
  try {
    ic_window(bs("11"), w, 2, 8);
    FAIL("expected a domain error");
  } catch (const Error& ex) {
    CHECK(ex.kind() == ErrorKind::kDomain);
  }
}

TEST_CASE("ic agrees with brute force on all windows over {λ,0,1}") {
  const std::vector<std::string> points{"", "0", "1"};
  RunCache cache;
  for (int chi = 0; chi < 8; ++chi) {
    std::map<std::string, int> w;
    for (int j = 0; j < 3; ++j) w[points[j]] = (chi >> j) & 1;
    const auto cw = window(w);
    for (const auto& x : points) {
      for (std::uint64_t b : {1, 3, 8}) {
        for (bool weak : {false, true}) {
          const auto got = weak ? ic_bar_window(bs(x), cw, b, 6, {Parallelism::kParallel, &cache})
                                : ic_window(bs(x), cw, b, 6, {Parallelism::kSerial, &cache});
          REQUIRE(got.value == brute_ic(bs(x), w, b, 6, weak));
          if (got.witness) {
            REQUIRE(ic_eligible(*got.witness, bs(x), cw, b, weak ? IcVariant::kWeak : IcVariant::kStrict));
          }
        }
      }
    }
  }
}

TEST_CASE("ic-bar can be finite where ic is infinite") {
  // READ; SKIPZ; LOOP; EMIT1 prints 1 on "10" after re-reading, and on "1111"
  // spins through the input for more than 8 steps before reaching ⊥.
  const auto w = window({{"10", 1}, {"1111", 0}});
  const BitString x = bs("10");
  const auto weak = ic_bar_window(x, w, 8, 12);
  CHECK(weak.value == 12);
  CHECK(weak.witness == bs("101110111001"));
  CHECK(ic_window(x, w, 8, 12).infinite());
  CHECK_FALSE(ic_eligible(*weak.witness, x, w, 8, IcVariant::kStrict));
  // With a larger budget the loop reaches ⊥ and the witness becomes total.
  CHECK(ic_window(x, w, 16, 12).value == 12);
  CHECK(ic_window(x, w, 8, 15).value == 15);
}

TEST_CASE("window enlargement never lowers ic") {
  const auto small = window({{"0", 0}});
  const auto big = window({{"0", 0}, {"1", 1}, {"", 0}});
  for (std::uint64_t b : {2, 5, 9}) {
    const auto s = ic_window(bs("0"), small, b, 7).value.value_or(UINT64_MAX);
    const auto l = ic_window(bs("0"), big, b, 7).value.value_or(UINT64_MAX);
    CHECK(s <= l);
    const auto sb = ic_bar_window(bs("0"), small, b, 7).value.value_or(UINT64_MAX);
    const auto lb = ic_bar_window(bs("0"), big, b, 7).value.value_or(UINT64_MAX);
    CHECK(sb <= lb);
  }
}

TEST_CASE("window parsing") {
  const auto w = ConsistencyWindow::parse(R"({"": 0, "01": 1})");
  CHECK(w.size() == 2);
  CHECK(w.chi(bs("01")));
  CHECK(ConsistencyWindow::parse(w.to_json()).entries() == w.entries());
  auto kind_of = [](const char* text) {
    try {
      ConsistencyWindow::parse(text);
    } catch (const Error& ex) {
      return ex.kind();
    }
    return ErrorKind::kInvariant;
  };
  CHECK(kind_of(R"({"0": 1, "0": 0})") == ErrorKind::kValidation);
  CHECK(kind_of(R"({"0": 2})") == ErrorKind::kParse);
  CHECK(kind_of(R"({"a": 1})") == ErrorKind::kParse);
  CHECK(kind_of(R"([1])") == ErrorKind::kParse);
  CHECK(kind_of(R"({"0": )") == ErrorKind::kParse);
  ConsistencyWindow dup;
  dup.insert(bs("1"), true);
  CHECK_THROWS_AS(dup.insert(bs("1"), false), Error);
}

TEST_CASE("hardness profile") {
  ConsistencyWindow w;
  for (std::uint64_t i = 0; i < 7; ++i) w.insert(index_to_string(CanonicalIndex{i}), false);
  const auto rows = hardness_profile(w, 4, 6);
  REQUIRE(rows.size() == 7);
  for (const auto& r : rows) {
    CHECK(r.ic.value == 3);
    CHECK(r.icbar.value <= r.ic.value);
  }
  const auto rows_more = hardness_profile(w, 5, 6);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    CHECK(rows_more[j].c.value.value_or(UINT64_MAX) <= rows[j].c.value.value_or(UINT64_MAX));
  }
  const std::string csv = profile_csv(rows, 4, 6);
  CHECK(csv.rfind("x,c,ic,icbar,budget,max_len\n,0,3,3,4,6\n", 0) == 0);

  ConsistencyWindow lonely;
  lonely.insert(bs("1"), true);
  CHECK(profile_csv(hardness_profile(lonely, 1, 2), 1, 2).find("1,inf,inf,inf,1,2") != std::string::npos);
}
