#include "kolmolab/codecs.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kolmolab/errors.hpp"

namespace kolmolab {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t count_below(std::span<const std::uint64_t> enumeration, std::uint64_t bound) {
  std::set<std::uint64_t> seen;
  for (auto a : enumeration) {
    if (a < bound) seen.insert(a);
  }
  return seen.size();
}

std::uint64_t parse_binary(std::string_view bits) {
  if (bits.size() > 63) throw Error(ErrorKind::kRange, "numeral too long");
  std::uint64_t v = 0;
  for (char c : bits) v = (v << 1) | (c == '1' ? 1U : 0U);
  return v;
}

// χ_A(0)..χ_A(bound-1) from the first `m` distinct elements below `bound`.
BitString replay(std::span<const std::uint64_t> enumeration, std::uint64_t bound, std::uint64_t m,
                 std::size_t replay_budget) {
  std::set<std::uint64_t> found;
  std::size_t used = 0;
  for (auto a : enumeration) {
    if (found.size() == m) break;
    if (used++ == replay_budget) break;
    if (a < bound) found.insert(a);
  }
  if (found.size() < m) {
    throw Error(ErrorKind::kPending, "enumeration did not produce " + std::to_string(m) +
                                         " elements below " + std::to_string(bound));
  }
  std::string out(bound, '0');
  for (auto a : found) out[a] = '1';
  return BitString::from_bits(out);
}

}  // namespace

Enumeration parse_enumeration(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::kParse, std::string("enumeration: ") + ex.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::kParse, "enumeration: expected a JSON array");
  Enumeration out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number_unsigned()) {
      throw Error(ErrorKind::kParse, "enumeration: element " + std::to_string(i) + " is not a natural");
    }
    out.push_back(doc[i].get<std::uint64_t>());
  }
  return out;
}

Enumeration load_enumeration(const std::filesystem::path& path) {
  return parse_enumeration(read_file(path));
}

BitString characteristic_prefix(std::span<const std::uint64_t> enumeration, std::uint64_t last) {
  std::string out(last + 1, '0');
  for (auto a : enumeration) {
    if (a <= last) out[a] = '1';
  }
  return BitString::from_bits(out);
}

BitString two_log_encode(std::span<const std::uint64_t> enumeration, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kRange, "two-log code needs n >= 1");
  const std::size_t half = bit_length(n);
  const std::uint64_t m = count_below(enumeration, n + 1);
  if (bit_length(m) > half) {
    // m = n + 1 = 2^half: every position is in A.
    return BitString::from_bits("0" + std::string(half - 1, '1') + std::string(half, '0'));
  }
  return BitString::from_bits(binary(n) + binary(m, half));
}

BitString two_log_decode(const BitString& code, std::span<const std::uint64_t> enumeration,
                         std::size_t replay_budget) {
  const std::string bits = code.bits();
  if (bits.empty() || bits.size() % 2 != 0) {
    throw Error(ErrorKind::kValidation, "two-log code must have even nonzero length");
  }
  const std::size_t half = bits.size() / 2;
  const std::string_view first(bits.data(), half);
  const std::string_view second(bits.data() + half, half);
  if (first.front() == '0') {
    if (first != "0" + std::string(half - 1, '1') || second != std::string(half, '0')) {
      throw Error(ErrorKind::kValidation, "malformed two-log code");
    }
    const std::uint64_t n = (std::uint64_t{1} << half) - 1;
    return BitString::from_bits(std::string(n + 1, '1'));
  }
  const std::uint64_t n = parse_binary(first);
  const std::uint64_t m = parse_binary(second);
  if (m > n + 1) throw Error(ErrorKind::kValidation, "two-log count exceeds n+1");
  return replay(enumeration, n + 1, m, replay_budget);
}

BitString log_cond_encode(std::span<const std::uint64_t> enumeration, std::uint64_t n) {
  return BitString::from_bits(binary(count_below(enumeration, n), bit_length(n)));
}

BitString log_cond_decode(const BitString& code, std::uint64_t n,
                          std::span<const std::uint64_t> enumeration, std::size_t replay_budget) {
  if (code.size() != bit_length(n)) {
    throw Error(ErrorKind::kValidation, "conditional code length does not match n");
  }
  const std::uint64_t m = parse_binary(code.bits());
  if (m > n) throw Error(ErrorKind::kValidation, "conditional count exceeds n");
  return replay(enumeration, n, m, replay_budget);
}

MindChangeTable MindChangeTable::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::kParse, std::string("mind-change table: ") + ex.what());
  }
  MindChangeTable t;
  try {
    for (const auto& row : doc.at("approx")) {
      std::vector<BitString> values;
      for (const auto& v : row) values.push_back(BitString::from_bits(v.get<std::string>()));
      t.approx.push_back(std::move(values));
    }
    for (const auto& v : doc.at("f")) t.f.push_back(v.get<std::uint64_t>());
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("mind-change table field: ") + ex.what());
  }
  return t;
}

MindChangeTable MindChangeTable::load_file(const std::filesystem::path& path) {
  return parse(read_file(path));
}

std::string MindChangeTable::to_json() const {
  json doc;
  doc["approx"] = json::array();
  for (const auto& row : approx) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.text());
    doc["approx"].push_back(r);
  }
  doc["f"] = f;
  return doc.dump();
}

std::uint64_t mind_changes(std::span<const BitString> row) {
  std::uint64_t changes = 0;
  for (std::size_t s = 1; s < row.size(); ++s) {
    if (!(row[s] == row[s - 1])) ++changes;
  }
  return changes;
}

void validate(const MindChangeTable& table) {
  for (std::size_t x = 0; x < table.approx.size(); ++x) {
    if (table.approx[x].empty()) {
      throw Error(ErrorKind::kValidation, "approximation row " + std::to_string(x) + " is empty");
    }
    if (mind_changes(table.approx[x]) > x) {
      throw Error(ErrorKind::kValidation,
                  "approximation row " + std::to_string(x) + " changes more than x times");
    }
  }
  for (std::size_t j = 1; j < table.f.size(); ++j) {
    if (table.f[j] < table.f[j - 1]) throw Error(ErrorKind::kValidation, "f is not nondecreasing");
  }
}

std::uint64_t mindchange_n_prime(const MindChangeTable& table, std::uint64_t n) {
  if (table.f.empty()) throw Error(ErrorKind::kRange, "empty presentation of f");
  for (std::uint64_t x = 0; x < table.approx.size(); ++x) {
    // m(x) is only determined once f exceeds x somewhere in the table.
    if (table.f.back() <= x) break;
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < table.f.size(); ++j) {
      if (table.f[j] <= x) m = j + 1;
    }
    if (m > n) return x;
  }
  throw Error(ErrorKind::kRange, "n' is undefined for n = " + std::to_string(n) + " in this table");
}

MindChangeCode mindchange_encode(const MindChangeTable& table, std::uint64_t n) {
  validate(table);
  const std::uint64_t np = mindchange_n_prime(table, n);
  return {mind_changes(table.approx[np]), np};
}

BitString mindchange_decode(const MindChangeTable& table, const MindChangeCode& code,
                            std::uint64_t n) {
  if (code.n_prime >= table.approx.size()) throw Error(ErrorKind::kRange, "n' outside the table");
  const auto& row = table.approx[code.n_prime];
  if (row.empty()) throw Error(ErrorKind::kValidation, "empty approximation row");
  std::uint64_t changes = 0;
  std::size_t s = 0;
  while (changes < code.x_count) {
    if (++s >= row.size()) {
      throw Error(ErrorKind::kPending, "approximation row ended before the announced changes");
    }
    if (!(row[s] == row[s - 1])) ++changes;
  }
  const BitString& value = row[s];
  if (value.size() < n + 1) {
    throw Error(ErrorKind::kValidation, "approximation value shorter than n+1 bits");
  }
  return BitString::from_bits(value.bits().substr(0, n + 1));
}

BitString mindchange_pack(const MindChangeCode& code) {
  std::string out;
  for (char c : binary(code.x_count)) out.append(2, c);
  out += "01";
  out += binary(code.n_prime);
  return BitString::from_bits(out);
}

MindChangeCode mindchange_unpack(const BitString& packed) {
  const std::string bits = packed.bits();
  std::string count;
  std::size_t i = 0;
  for (;; i += 2) {
    if (i + 1 >= bits.size()) throw Error(ErrorKind::kValidation, "unterminated mind-change code");
    if (bits[i] == '0' && bits[i + 1] == '1') break;
    if (bits[i] != bits[i + 1]) throw Error(ErrorKind::kValidation, "malformed mind-change code");
    count.push_back(bits[i]);
  }
  return {parse_binary(count), parse_binary(std::string_view(bits).substr(i + 2))};
}

}  // namespace kolmolab
