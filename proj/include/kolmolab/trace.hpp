#pragma once

// Append-only record of a construction run, shared by every simulator and by
// the offline checkers. Keys serialize in sorted order, so identical runs give
// identical bytes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kolmolab {

using Json = nlohmann::json;

/// Outcome of one invariant over a run. Only the first failure is kept.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t checked = 0;  // stages (or items) examined
  std::optional<std::uint64_t> failing_stage;
  std::string detail;

  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  void pass() { ++checked; }
  void fail(std::uint64_t stage, std::string why);
  /// Records one examination; fails with `why` when `ok` is false.
  void expect(bool ok, std::uint64_t stage, const std::string& why) {
    if (ok) {
      pass();
    } else {
      fail(stage, why);
    }
  }

  Json to_json() const;
  static CheckResult from_json(const Json& j);
};

struct StageTrace {
  std::string construction;
  Json params = Json::object();
  Json events = Json::array();
  Json final_state = Json::object();
  std::vector<CheckResult> checks;

  bool all_passed() const;
  const CheckResult* find_check(std::string_view name) const;

  Json to_json() const;
  static StageTrace from_json(const Json& j);
  /// Pretty-printed JSON followed by a newline.
  std::string dump() const;
  /// Throws kParse with a field diagnostic on malformed input.
  static StageTrace parse(std::string_view text);
  static StageTrace load_file(const std::filesystem::path& path);
  void save_file(const std::filesystem::path& path) const;
};

/// Renders one line per check: "PASS name (n checked)" or
/// "FAIL name at stage s: detail".
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace kolmolab
