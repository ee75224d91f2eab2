#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kolmolab/bitstr.hpp"
#include "kolmolab/run_cache.hpp"
#include "kolmolab/vm.hpp"

namespace kolmolab {

enum class Parallelism { kSerial, kParallel };

struct SearchOptions {
  Parallelism mode = Parallelism::kParallel;
  /// Optional shared memo; runs go through it when set.
  RunCache* cache = nullptr;
};

/// Exact minimum program length over the searched space, or infinity.
struct ComplexityValue {
  std::optional<std::uint64_t> value;  // nullopt = infinity
  std::uint64_t budget = 0;
  std::size_t max_len = 0;
  std::optional<Program> witness;

  bool infinite() const noexcept { return !value.has_value(); }
};

/// "inf" or the decimal value.
std::string format_value(const std::optional<std::uint64_t>& v);

/// C^s(x): min l(p), l(p) <= max_len, with run(p, λ, budget) = Halt(x).
ComplexityValue c_approx(const BitString& x, std::uint64_t budget, std::size_t max_len,
                         const SearchOptions& opts = {});

/// C^s(x | cond): min l(p) with run(p, cond, budget) = Halt(x).
ComplexityValue cond_c_approx(const BitString& x, const BitString& cond, std::uint64_t budget,
                              std::size_t max_len, const SearchOptions& opts = {});

/// Finite partial characteristic function. Duplicate insertion is an error.
class ConsistencyWindow {
 public:
  ConsistencyWindow() = default;

  void insert(const BitString& x, bool value);
  bool contains(const BitString& x) const { return chi_.contains(x); }
  /// Throws kDomain when x is outside the window.
  bool chi(const BitString& x) const;
  std::size_t size() const { return chi_.size(); }
  /// Domain in canonical order.
  std::vector<BitString> domain() const;
  const std::map<BitString, bool>& entries() const { return chi_; }

  /// JSON object mapping bitstrings to 0/1. Duplicate keys are rejected.
  static ConsistencyWindow parse(std::string_view json_text);
  static ConsistencyWindow load_file(const std::filesystem::path& path);
  std::string to_json() const;

 private:
  std::map<BitString, bool> chi_;
};

enum class IcVariant { kStrict, kWeak };

struct ICValue {
  std::optional<std::uint64_t> value;  // nullopt = infinity
  std::optional<Program> witness;
  IcVariant variant = IcVariant::kStrict;
  std::uint64_t budget = 0;
  std::size_t max_len = 0;

  bool infinite() const noexcept { return !value.has_value(); }
};

/// Eligibility of `p` as an instance-complexity witness for x on the window.
///
/// Strict: every window point yields 0, 1 or ⊥ within the budget, bits agree
/// with chi, and the value at x is chi(x).
/// Weak: as strict, but points other than x may also be pending.
bool ic_eligible(const Program& p, const BitString& x, const ConsistencyWindow& w,
                 std::uint64_t budget, IcVariant variant, RunCache* cache = nullptr);

/// Window-restricted budgeted ic(x:A). Throws kDomain if x is not in the window.
ICValue ic_window(const BitString& x, const ConsistencyWindow& w, std::uint64_t budget,
                  std::size_t max_len, const SearchOptions& opts = {});

/// Weak variant (pending allowed away from x).
ICValue ic_bar_window(const BitString& x, const ConsistencyWindow& w, std::uint64_t budget,
                      std::size_t max_len, const SearchOptions& opts = {});

struct ProfileRow {
  BitString x;
  ComplexityValue c;
  ICValue ic;
  ICValue icbar;
};

/// One row per window element, canonical order.
std::vector<ProfileRow> hardness_profile(const ConsistencyWindow& w, std::uint64_t budget,
                                         std::size_t max_len, const SearchOptions& opts = {});

/// CSV with header `x,c,ic,icbar,budget,max_len`; λ is the empty field.
std::string profile_csv(const std::vector<ProfileRow>& rows, std::uint64_t budget,
                        std::size_t max_len);

}  // namespace kolmolab
