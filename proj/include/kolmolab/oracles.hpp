#pragma once

// Injectable providers for the stage simulators. Honest providers are backed
// by the BitVM; scripted ones let tests force paths the honest machine never
// takes. Every provider is wrapped in a checking adapter that validates
// monotonicity online.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "kolmolab/bitstr.hpp"
#include "kolmolab/complexity.hpp"
#include "kolmolab/run_cache.hpp"
#include "kolmolab/vm.hpp"

namespace kolmolab {

/// Step-indexed complexity approximation C^stage. Values must be
/// non-increasing in the stage.
class ComplexityOracle {
 public:
  virtual ~ComplexityOracle() = default;
  /// C^stage(x); nullopt means no description was found (infinity).
  virtual std::optional<std::uint64_t> value(const BitString& x, std::uint64_t stage) = 0;
  /// Every x with C^stage(x) < threshold, canonical order.
  virtual std::vector<BitString> below(std::uint64_t threshold, std::uint64_t stage) = 0;
};

/// C^s over BitVM programs of length <= max_len, with the step budget
/// min(stage, budget_cap). Tabulates the whole program space once.
class VmComplexityOracle final : public ComplexityOracle {
 public:
  VmComplexityOracle(std::size_t max_len, std::uint64_t budget_cap,
                     Parallelism mode = Parallelism::kParallel);

  std::optional<std::uint64_t> value(const BitString& x, std::uint64_t stage) override;
  std::vector<BitString> below(std::uint64_t threshold, std::uint64_t stage) override;

  std::size_t max_len() const { return max_len_; }
  std::uint64_t budget_cap() const { return cap_; }

 private:
  struct Description {
    std::uint64_t steps;
    std::uint64_t length;
  };
  std::size_t max_len_;
  std::uint64_t cap_;
  // Per output: descriptions sorted by steps, lengths replaced by prefix minima.
  std::map<BitString, std::vector<Description>> table_;
};

/// Scripted C^s: a list of (x, stage, value) triples; a triple holds from its
/// stage until the next triple for the same x. Unscripted strings are infinite.
class ScriptedComplexityOracle final : public ComplexityOracle {
 public:
  using Triple = std::tuple<BitString, std::uint64_t, std::uint64_t>;

  /// Throws kValidation when a string's scripted values increase over stages.
  explicit ScriptedComplexityOracle(std::vector<Triple> triples);

  static ScriptedComplexityOracle parse(std::string_view json_text);
  static ScriptedComplexityOracle load_file(const std::filesystem::path& path);

  std::optional<std::uint64_t> value(const BitString& x, std::uint64_t stage) override;
  std::vector<BitString> below(std::uint64_t threshold, std::uint64_t stage) override;

  const std::vector<Triple>& triples() const { return triples_; }
  /// JSON array of [x, stage, value] triples.
  std::string to_json() const;

 private:
  std::vector<Triple> triples_;
  std::map<BitString, std::map<std::uint64_t, std::uint64_t>> script_;
};

/// Wraps a provider and rejects non-monotone answers with kValidation.
class MonotoneComplexityOracle final : public ComplexityOracle {
 public:
  explicit MonotoneComplexityOracle(ComplexityOracle& inner) : inner_(inner) {}

  std::optional<std::uint64_t> value(const BitString& x, std::uint64_t stage) override;
  std::vector<BitString> below(std::uint64_t threshold, std::uint64_t stage) override;

 private:
  ComplexityOracle& inner_;
  std::map<BitString, std::map<std::uint64_t, std::optional<std::uint64_t>>> seen_;
  std::map<std::uint64_t, std::pair<std::uint64_t, std::vector<BitString>>> last_below_;
};

/// Machine outcome provider U_s(p, z).
class MachineOracle {
 public:
  virtual ~MachineOracle() = default;
  virtual Outcome outcome(const Program& p, const BitString& z, std::uint64_t budget) = 0;
};

/// Honest BitVM, memoized.
class VmMachineOracle final : public MachineOracle {
 public:
  Outcome outcome(const Program& p, const BitString& z, std::uint64_t budget) override {
    return cache_.run(p, z, budget);
  }
  RunCache& cache() { return cache_; }

 private:
  RunCache cache_;
};

/// Any callable as a provider (tests script adversarial machines with this).
class FunctionMachineOracle final : public MachineOracle {
 public:
  using Fn = std::function<Outcome(const Program&, const BitString&, std::uint64_t)>;
  explicit FunctionMachineOracle(Fn fn) : fn_(std::move(fn)) {}
  Outcome outcome(const Program& p, const BitString& z, std::uint64_t budget) override {
    return fn_(p, z, budget);
  }

 private:
  Fn fn_;
};

/// Records every answer in a RunCache so that budget-stability violations
/// surface as kValidation the moment they happen.
class CheckedMachineOracle final : public MachineOracle {
 public:
  explicit CheckedMachineOracle(MachineOracle& inner) : inner_(inner) {}
  Outcome outcome(const Program& p, const BitString& z, std::uint64_t budget) override;

 private:
  MachineOracle& inner_;
  RunCache seen_;
};

}  // namespace kolmolab
