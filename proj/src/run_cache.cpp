#include "kolmolab/run_cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kolmolab/errors.hpp"

namespace kolmolab {

using nlohmann::json;

RunCache::RunCache(const RunCache& other) {
  std::shared_lock lock(other.mu_);
  entries_ = other.entries_;
}

RunCache& RunCache::operator=(const RunCache& other) {
  if (this == &other) return *this;
  std::map<Key, Entry> copy;
  {
    std::shared_lock lock(other.mu_);
    copy = other.entries_;
  }
  std::unique_lock lock(mu_);
  entries_ = std::move(copy);
  return *this;
}

std::optional<Outcome> RunCache::lookup(const Program& p, const BitString& z,
                                        std::uint64_t budget) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(Key{p, z});
  if (it == entries_.end()) return std::nullopt;
  const Entry& e = it->second;
  if (e.outcome.terminal()) return restrict_to_budget(e.outcome, budget);
  if (budget <= e.budget) return Outcome::out_of_budget(budget);
  return std::nullopt;
}

void RunCache::merge_entry(std::map<Key, Entry>& entries, const Key& key, Entry incoming) {
  auto [it, inserted] = entries.try_emplace(key, incoming);
  if (inserted) return;
  Entry& cur = it->second;
  const bool cur_term = cur.outcome.terminal();
  const bool inc_term = incoming.outcome.terminal();
  auto contradiction = [&]() {
    throw Error(ErrorKind::kValidation,
                "contradictory run records for p=" + key.first.text() + " z=" + key.second.text());
  };
  if (cur_term && inc_term) {
    if (!(cur.outcome == incoming.outcome)) contradiction();
  } else if (cur_term) {
    if (incoming.budget >= cur.outcome.steps) contradiction();
  } else if (inc_term) {
    if (incoming.outcome.steps <= cur.budget) contradiction();
    cur = incoming;
  } else if (incoming.budget > cur.budget) {
    cur = incoming;
  }
}

void RunCache::record(const Program& p, const BitString& z, std::uint64_t budget,
                      const Outcome& o) {
  Entry e{o, o.terminal() ? o.steps : budget};
  std::unique_lock lock(mu_);
  merge_entry(entries_, Key{p, z}, std::move(e));
}

Outcome RunCache::run(const Program& p, const BitString& z, std::uint64_t budget) {
  std::uint64_t run_budget = budget;
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(Key{p, z});
    if (it != entries_.end()) {
      const Entry& e = it->second;
      if (e.outcome.terminal()) return restrict_to_budget(e.outcome, budget);
      if (budget <= e.budget) return Outcome::out_of_budget(budget);
      run_budget = std::max(budget, e.budget > (UINT64_MAX >> 1) ? UINT64_MAX : 2 * e.budget);
    }
  }
  const Outcome o = kolmolab::run(p, z, run_budget);
  record(p, z, run_budget, o);
  return restrict_to_budget(o, budget);
}

void RunCache::merge(const RunCache& other) {
  if (this == &other) return;
  std::map<Key, Entry> theirs;
  {
    std::shared_lock lock(other.mu_);
    theirs = other.entries_;
  }
  std::unique_lock lock(mu_);
  for (auto& [key, entry] : theirs) merge_entry(entries_, key, entry);
}

std::size_t RunCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void RunCache::save(std::ostream& out) const {
  std::shared_lock lock(mu_);
  for (const auto& [key, e] : entries_) {
    json rec;
    rec["p"] = key.first.text();
    rec["z"] = key.second.text();
    rec["kind"] = std::string(to_string(e.outcome.kind));
    if (e.outcome.kind == OutcomeKind::kHalt) rec["out"] = e.outcome.output.text();
    rec["steps"] = e.outcome.steps;
    rec["budget"] = e.budget;
    out << rec.dump() << '\n';
  }
}

RunCache RunCache::load(std::istream& in) {
  RunCache cache;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "cache line " + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
      const auto p = BitString::from_bits(rec.at("p").get<std::string>());
      const auto z = BitString::from_bits(rec.at("z").get<std::string>());
      const auto kind = rec.at("kind").get<std::string>();
      const auto steps = rec.at("steps").get<std::uint64_t>();
      const auto budget = rec.at("budget").get<std::uint64_t>();
      if (steps > budget) throw Error(ErrorKind::kValidation, "steps exceed budget");
      Outcome o;
      if (kind == "halt") {
        o = Outcome::halt(BitString::from_bits(rec.at("out").get<std::string>()), steps);
      } else if (kind == "bot") {
        o = Outcome::bottom(steps);
      } else if (kind == "oob") {
        if (steps != budget) {
          throw Error(ErrorKind::kValidation, "out-of-budget steps must equal budget");
        }
        o = Outcome::out_of_budget(budget);
      } else {
        throw Error(ErrorKind::kParse, "unknown kind '" + kind + "'");
      }
      cache.record(p, z, budget, o);
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::kParse, where + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ex.kind(), where + ": " + ex.detail());
    }
  }
  return cache;
}

void RunCache::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "cannot write cache file " + path.string());
  save(out);
}

RunCache RunCache::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return RunCache{};
  return load(in);
}

}  // namespace kolmolab
