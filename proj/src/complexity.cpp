#include "kolmolab/complexity.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "kolmolab/errors.hpp"
#include "kolmolab/kernels.hpp"

namespace kolmolab {

using nlohmann::json;

namespace {

Outcome run_with(const Program& p, const BitString& z, std::uint64_t budget, RunCache* cache) {
  return cache != nullptr ? cache->run(p, z, budget) : run(p, z, budget);
}

template <class Pred>
std::optional<Program> search(std::size_t max_len, Parallelism mode, Pred&& pred) {
  return mode == Parallelism::kParallel ? kernels::first_program_parallel(max_len, pred)
                                        : kernels::first_program_serial(max_len, pred);
}

ICValue ic_search(const BitString& x, const ConsistencyWindow& w, std::uint64_t budget,
                  std::size_t max_len, const SearchOptions& opts, IcVariant variant) {
  if (!w.contains(x)) {
    throw Error(ErrorKind::kDomain, "instance '" + x.text() + "' is outside the window");
  }
  ICValue out;
  out.variant = variant;
  out.budget = budget;
  out.max_len = max_len;
  out.witness = search(max_len, opts.mode, [&](const Program& p) {
    return ic_eligible(p, x, w, budget, variant, opts.cache);
  });
  if (out.witness) out.value = out.witness->size();
  return out;
}

}  // namespace

std::string format_value(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : "inf";
}

ComplexityValue c_approx(const BitString& x, std::uint64_t budget, std::size_t max_len,
                         const SearchOptions& opts) {
  return cond_c_approx(x, BitString{}, budget, max_len, opts);
}

ComplexityValue cond_c_approx(const BitString& x, const BitString& cond, std::uint64_t budget,
                              std::size_t max_len, const SearchOptions& opts) {
  ComplexityValue out;
  out.budget = budget;
  out.max_len = max_len;
  out.witness = search(max_len, opts.mode, [&](const Program& p) {
    const Outcome o = run_with(p, cond, budget, opts.cache);
    return o.kind == OutcomeKind::kHalt && o.output == x;
  });
  if (out.witness) out.value = out.witness->size();
  return out;
}

void ConsistencyWindow::insert(const BitString& x, bool value) {
  if (!chi_.emplace(x, value).second) {
    throw Error(ErrorKind::kValidation, "duplicate window point '" + x.text() + "'");
  }
}

bool ConsistencyWindow::chi(const BitString& x) const {
  auto it = chi_.find(x);
  if (it == chi_.end()) throw Error(ErrorKind::kDomain, "'" + x.text() + "' is outside the window");
  return it->second;
}

std::vector<BitString> ConsistencyWindow::domain() const {
  std::vector<BitString> out;
  out.reserve(chi_.size());
  for (const auto& [x, v] : chi_) out.push_back(x);
  return out;
}

ConsistencyWindow ConsistencyWindow::parse(std::string_view json_text) {
  // nlohmann keeps the last of duplicate keys silently; catch them here.
  std::vector<std::set<std::string>> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      seen.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      seen.pop_back();
    } else if (event == json::parse_event_t::key && !seen.empty()) {
      if (!seen.back().insert(parsed.get<std::string>()).second && duplicate.empty()) {
        duplicate = parsed.get<std::string>();
      }
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), cb);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::kParse, std::string("window: ") + ex.what());
  }
  if (!duplicate.empty()) {
    throw Error(ErrorKind::kValidation, "window: duplicate key '" + duplicate + "'");
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "window: top level must be an object");
  ConsistencyWindow w;
  for (const auto& [key, value] : doc.items()) {
    const std::string field = "window field '" + key + "'";
    BitString x;
    try {
      x = BitString::from_bits(key);
    } catch (const Error&) {
      throw Error(ErrorKind::kParse, field + ": key is not a bitstring");
    }
    if (!value.is_number_integer() || (value.get<int>() != 0 && value.get<int>() != 1)) {
      throw Error(ErrorKind::kParse, field + ": value must be 0 or 1");
    }
    w.insert(x, value.get<int>() == 1);
  }
  return w;
}

ConsistencyWindow ConsistencyWindow::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open window file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ConsistencyWindow::to_json() const {
  json doc = json::object();
  for (const auto& [x, v] : chi_) doc[x.text()] = v ? 1 : 0;
  return doc.dump();
}

bool ic_eligible(const Program& p, const BitString& x, const ConsistencyWindow& w,
                 std::uint64_t budget, IcVariant variant, RunCache* cache) {
  const bool target = w.chi(x);
  const Value at_x = value_of(run_with(p, x, budget, cache));
  if (!is_bit(at_x) || (at_x == Value::kOne) != target) return false;
  for (const auto& [z, chi] : w.entries()) {
    if (z == x) continue;
    const Value v = value_of(run_with(p, z, budget, cache));
    if (v == Value::kValueError) return false;
    if (v == Value::kPending) {
      if (variant == IcVariant::kStrict) return false;
      continue;
    }
    if (is_bit(v) && (v == Value::kOne) != chi) return false;
  }
  return true;
}

ICValue ic_window(const BitString& x, const ConsistencyWindow& w, std::uint64_t budget,
                  std::size_t max_len, const SearchOptions& opts) {
  return ic_search(x, w, budget, max_len, opts, IcVariant::kStrict);
}

ICValue ic_bar_window(const BitString& x, const ConsistencyWindow& w, std::uint64_t budget,
                      std::size_t max_len, const SearchOptions& opts) {
  return ic_search(x, w, budget, max_len, opts, IcVariant::kWeak);
}

std::vector<ProfileRow> hardness_profile(const ConsistencyWindow& w, std::uint64_t budget,
                                         std::size_t max_len, const SearchOptions& opts) {
  std::vector<ProfileRow> rows;
  for (const auto& x : w.domain()) {
    rows.push_back({x, c_approx(x, budget, max_len, opts), ic_window(x, w, budget, max_len, opts),
                    ic_bar_window(x, w, budget, max_len, opts)});
  }
  return rows;
}

std::string profile_csv(const std::vector<ProfileRow>& rows, std::uint64_t budget,
                        std::size_t max_len) {
  std::ostringstream out;
  out << "x,c,ic,icbar,budget,max_len\n";
  for (const auto& r : rows) {
    out << r.x.text() << ',' << format_value(r.c.value) << ',' << format_value(r.ic.value) << ','
        << format_value(r.icbar.value) << ',' << budget << ',' << max_len << '\n';
  }
  return out.str();
}

}  // namespace kolmolab
