#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <utility>

#include "kolmolab/vm.hpp"

namespace kolmolab {

/// Memo of machine runs keyed by (program, input).
///
/// Each key holds either a terminal outcome (budget-stable, never
/// contradicted) or the highest budget known to run out. Writes merge: a
/// terminal outcome beats any out-of-budget entry below its step count, and a
/// higher out-of-budget budget beats a lower one. Contradictory writes throw
/// kValidation. Reads take a shared lock, writes an exclusive one.
class RunCache {
 public:
  RunCache() = default;
  RunCache(const RunCache& other);
  RunCache& operator=(const RunCache& other);

  /// Outcome at `budget` when derivable from the cache alone.
  std::optional<Outcome> lookup(const Program& p, const BitString& z, std::uint64_t budget) const;

  /// Merges an outcome observed when running with `budget`.
  void record(const Program& p, const BitString& z, std::uint64_t budget, const Outcome& o);

  /// Cached run. On a miss over an out-of-budget entry at b, re-runs at
  /// max(budget, 2b) so repeated probes at growing budgets stay linear.
  Outcome run(const Program& p, const BitString& z, std::uint64_t budget);

  void merge(const RunCache& other);

  std::size_t size() const;

  /// Newline-delimited JSON, one record per key, in key order.
  void save(std::ostream& out) const;
  static RunCache load(std::istream& in);

  void save_file(const std::filesystem::path& path) const;
  static RunCache load_file(const std::filesystem::path& path);

 private:
  struct Entry {
    Outcome outcome;  // terminal, or out-of-budget at `budget`
    std::uint64_t budget = 0;
  };
  using Key = std::pair<BitString, BitString>;

  static void merge_entry(std::map<Key, Entry>& entries, const Key& key, Entry incoming);

  mutable std::shared_mutex mu_;
  std::map<Key, Entry> entries_;
};

}  // namespace kolmolab
