#include "kolmolab/trace.hpp"

#include <fstream>
#include <sstream>

#include "kolmolab/errors.hpp"

namespace kolmolab {

void CheckResult::fail(std::uint64_t stage, std::string why) {
  ++checked;
  if (!passed) return;
  passed = false;
  failing_stage = stage;
  detail = std::move(why);
}

Json CheckResult::to_json() const {
  Json j;
  j["name"] = name;
  j["passed"] = passed;
  j["checked"] = checked;
  j["failing_stage"] = failing_stage ? Json(*failing_stage) : Json(nullptr);
  j["detail"] = detail;
  return j;
}

CheckResult CheckResult::from_json(const Json& j) {
  CheckResult c;
  c.name = j.at("name").get<std::string>();
  c.passed = j.at("passed").get<bool>();
  c.checked = j.at("checked").get<std::uint64_t>();
  if (!j.at("failing_stage").is_null()) c.failing_stage = j.at("failing_stage").get<std::uint64_t>();
  c.detail = j.at("detail").get<std::string>();
  return c;
}

bool StageTrace::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const CheckResult* StageTrace::find_check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Json StageTrace::to_json() const {
  Json j;
  j["construction"] = construction;
  j["params"] = params;
  j["events"] = events;
  j["final"] = final_state;
  j["checks"] = Json::array();
  for (const auto& c : checks) j["checks"].push_back(c.to_json());
  return j;
}

StageTrace StageTrace::from_json(const Json& j) {
  StageTrace t;
  try {
    t.construction = j.at("construction").get<std::string>();
    t.params = j.at("params");
    t.events = j.at("events");
    t.final_state = j.at("final");
    if (!t.events.is_array()) throw Error(ErrorKind::kParse, "trace field 'events' must be an array");
    for (const auto& c : j.at("checks")) t.checks.push_back(CheckResult::from_json(c));
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("trace field: ") + ex.what());
  }
  return t;
}

std::string StageTrace::dump() const { return to_json().dump(1) + "\n"; }

StageTrace StageTrace::parse(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& ex) {
    throw Error(ErrorKind::kParse, std::string("trace: ") + ex.what());
  }
  return from_json(j);
}

StageTrace StageTrace::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open trace " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void StageTrace::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kParse, "cannot write trace " + path.string());
  out << dump();
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  for (const auto& c : checks) {
    if (c.passed) {
      out << "PASS " << c.name << " (" << c.checked << " checked)\n";
    } else {
      out << "FAIL " << c.name << " at stage " << c.failing_stage.value_or(0) << ": " << c.detail
          << "\n";
    }
  }
  return out.str();
}

}  // namespace kolmolab
