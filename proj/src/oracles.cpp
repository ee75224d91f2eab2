#include "kolmolab/oracles.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kolmolab/errors.hpp"
#include "kolmolab/kernels.hpp"

namespace kolmolab {

using nlohmann::json;

namespace {

constexpr std::uint64_t kInfinity = std::numeric_limits<std::uint64_t>::max();

std::uint64_t as_number(const std::optional<std::uint64_t>& v) { return v.value_or(kInfinity); }

}  // namespace

VmComplexityOracle::VmComplexityOracle(std::size_t max_len, std::uint64_t budget_cap,
                                       Parallelism mode)
    : max_len_(max_len), cap_(budget_cap) {
  const auto runs = mode == Parallelism::kParallel
                        ? kernels::tabulate_parallel(max_len, BitString{}, budget_cap)
                        : kernels::tabulate_serial(max_len, BitString{}, budget_cap);
  for (std::uint64_t i = 0; i < runs.size(); ++i) {
    if (runs[i].kind != OutcomeKind::kHalt) continue;
    table_[runs[i].output].push_back({runs[i].steps, bit_length(i + 1) - 1});
  }
  for (auto& [x, descs] : table_) {
    std::stable_sort(descs.begin(), descs.end(),
                     [](const Description& a, const Description& b) { return a.steps < b.steps; });
    for (std::size_t j = 1; j < descs.size(); ++j) {
      descs[j].length = std::min(descs[j].length, descs[j - 1].length);
    }
  }
}

std::optional<std::uint64_t> VmComplexityOracle::value(const BitString& x, std::uint64_t stage) {
  auto it = table_.find(x);
  if (it == table_.end()) return std::nullopt;
  const std::uint64_t budget = std::min(stage, cap_);
  const auto& descs = it->second;
  auto pos = std::upper_bound(descs.begin(), descs.end(), budget,
                              [](std::uint64_t b, const Description& d) { return b < d.steps; });
  if (pos == descs.begin()) return std::nullopt;
  return std::prev(pos)->length;
}

std::vector<BitString> VmComplexityOracle::below(std::uint64_t threshold, std::uint64_t stage) {
  std::vector<BitString> out;
  for (const auto& [x, descs] : table_) {
    if (as_number(value(x, stage)) < threshold) out.push_back(x);
  }
  return out;
}

ScriptedComplexityOracle::ScriptedComplexityOracle(std::vector<Triple> triples)
    : triples_(std::move(triples)) {
  for (const auto& [x, stage, v] : triples_) {
    auto& per_x = script_[x];
    auto [it, inserted] = per_x.emplace(stage, v);
    if (!inserted && it->second != v) {
      throw Error(ErrorKind::kValidation,
                  "scripted oracle gives two values for '" + x.text() + "' at one stage");
    }
  }
  for (const auto& [x, per_x] : script_) {
    std::uint64_t prev = kInfinity;
    for (const auto& [stage, v] : per_x) {
      if (v > prev) {
        throw Error(ErrorKind::kValidation, "scripted oracle not monotone for '" + x.text() +
                                                "' at stage " + std::to_string(stage));
      }
      prev = v;
    }
  }
}

ScriptedComplexityOracle ScriptedComplexityOracle::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::kParse, std::string("oracle script: ") + ex.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::kParse, "oracle script: expected an array of triples");
  std::vector<Triple> triples;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& t = doc[i];
    const std::string where = "oracle script entry " + std::to_string(i);
    if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_number_unsigned() ||
        !t[2].is_number_unsigned()) {
      throw Error(ErrorKind::kParse, where + ": expected [bitstring, stage, value]");
    }
    triples.emplace_back(BitString::from_bits(t[0].get<std::string>()), t[1].get<std::uint64_t>(),
                         t[2].get<std::uint64_t>());
  }
  return ScriptedComplexityOracle(std::move(triples));
}

ScriptedComplexityOracle ScriptedComplexityOracle::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open oracle script " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ScriptedComplexityOracle::to_json() const {
  json doc = json::array();
  for (const auto& [x, stage, v] : triples_) doc.push_back(json::array({x.text(), stage, v}));
  return doc.dump();
}

std::optional<std::uint64_t> ScriptedComplexityOracle::value(const BitString& x,
                                                             std::uint64_t stage) {
  auto it = script_.find(x);
  if (it == script_.end()) return std::nullopt;
  auto pos = it->second.upper_bound(stage);
  if (pos == it->second.begin()) return std::nullopt;
  return std::prev(pos)->second;
}

std::vector<BitString> ScriptedComplexityOracle::below(std::uint64_t threshold,
                                                       std::uint64_t stage) {
  std::vector<BitString> out;
  for (const auto& [x, per_x] : script_) {
    if (as_number(value(x, stage)) < threshold) out.push_back(x);
  }
  return out;
}

std::optional<std::uint64_t> MonotoneComplexityOracle::value(const BitString& x,
                                                             std::uint64_t stage) {
  const auto v = inner_.value(x, stage);
  auto& history = seen_[x];
  for (const auto& [s0, v0] : history) {
    const bool ok = s0 <= stage ? as_number(v) <= as_number(v0) : as_number(v) >= as_number(v0);
    if (!ok) {
      throw Error(ErrorKind::kValidation, "oracle not monotone for '" + x.text() + "' between stages " +
                                              std::to_string(s0) + " and " + std::to_string(stage));
    }
  }
  history.emplace(stage, v);
  return v;
}

std::vector<BitString> MonotoneComplexityOracle::below(std::uint64_t threshold,
                                                       std::uint64_t stage) {
  auto out = inner_.below(threshold, stage);
  auto it = last_below_.find(threshold);
  if (it != last_below_.end() && it->second.first <= stage) {
    for (const auto& x : it->second.second) {
      if (!std::binary_search(out.begin(), out.end(), x)) {
        throw Error(ErrorKind::kValidation,
                    "oracle dropped '" + x.text() + "' from below(" + std::to_string(threshold) + ")");
      }
    }
  }
  last_below_[threshold] = {stage, out};
  return out;
}

Outcome CheckedMachineOracle::outcome(const Program& p, const BitString& z, std::uint64_t budget) {
  Outcome o = inner_.outcome(p, z, budget);
  if (o.steps > budget || (!o.terminal() && o.steps != budget)) {
    throw Error(ErrorKind::kValidation, "machine oracle reported steps beyond its budget");
  }
  seen_.record(p, z, budget, o);
  return o;
}

}  // namespace kolmolab
