#include "kolmolab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "kolmolab/codecs.hpp"
#include "kolmolab/complexity.hpp"
#include "kolmolab/constructions.hpp"
#include "kolmolab/errors.hpp"
#include "kolmolab/icc.hpp"
#include "kolmolab/oracles.hpp"

namespace kolmolab {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kParse, "cannot write " + path);
  out << text;
}

Json vm_oracle_desc(std::uint64_t budget, std::uint64_t max_len) {
  return {{"kind", "vm"}, {"budget", budget}, {"max_len", max_len}};
}

// "vm" or the path of a scripted oracle file, inlined so the config is
// self-contained.
Json oracle_desc_from_flag(const std::string& flag, std::uint64_t budget, std::uint64_t max_len) {
  if (flag == "vm") return vm_oracle_desc(budget, max_len);
  const auto scripted = ScriptedComplexityOracle::load_file(flag);
  return {{"kind", "scripted"}, {"triples", Json::parse(scripted.to_json())}};
}

std::unique_ptr<ComplexityOracle> make_oracle(const Json& desc) {
  const auto kind = desc.at("kind").get<std::string>();
  if (kind == "vm") {
    return std::make_unique<VmComplexityOracle>(desc.at("max_len").get<std::size_t>(),
                                                desc.at("budget").get<std::uint64_t>());
  }
  if (kind == "scripted") {
    return std::make_unique<ScriptedComplexityOracle>(ScriptedComplexityOracle::parse(desc.at("triples").dump()));
  }
  throw Error(ErrorKind::kParse, "unknown oracle kind '" + kind + "'");
}

std::uint64_t get_u64(const Json& params, const char* key) {
  if (!params.contains(key) || !params.at(key).is_number_unsigned()) {
    throw Error(ErrorKind::kParse, std::string("config field '") + key + "' must be a natural number");
  }
  return params.at(key).get<std::uint64_t>();
}

// Prints the checks and any recorded oracle violation; 1 if either is bad.
int report(const StageTrace& trace, const std::vector<CheckResult>& checks, std::ostream& out) {
  out << format_checks(checks);
  int code = kExitOk;
  for (const auto& c : checks) {
    if (!c.passed) code = kExitViolation;
  }
  const auto it = trace.final_state.find("violation");
  if (it != trace.final_state.end() && !it->is_null()) {
    out << it->at("kind").get<std::string>() << " at stage " << it->at("stage") << " (k = " << it->at("k")
        << ", " << it->at("reason").get<std::string>() << ")\n";
    code = kExitViolation;
  }
  return code;
}

// Cache file for the complexity commands; KOLMOLAB_CACHE wins over --cache.
std::string cache_path(const std::string& flag) {
  if (const char* env = std::getenv("KOLMOLAB_CACHE"); env && *env) return env;
  return flag;
}

RunCache load_cache(const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) return {};
  return RunCache::load_file(path);
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  try {
    c.construction = j.at("construction").get<std::string>();
    c.params = j.at("params");
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("run config: ") + ex.what());
  }
  if (!c.params.is_object()) throw Error(ErrorKind::kParse, "run config field 'params' must be an object");
  return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& ex) {
    throw Error(ErrorKind::kParse, path + ": " + ex.what());
  }
  return from_json(j);
}

StageTrace run_sim(const RunConfig& config) {
  const Json& p = config.params;
  try {
    if (config.construction == "complex-set") {
      ComplexSetConfig cfg;
      cfg.k_max = get_u64(p, "k_max");
      cfg.stages = get_u64(p, "stages");
      const auto policy = p.at("policy").get<std::string>();
      if (policy != "strict" && policy != "pigeonhole_only") {
        throw Error(ErrorKind::kParse, "unknown policy '" + policy + "'");
      }
      cfg.policy = policy == "strict" ? ExhaustionPolicy::kStrict : ExhaustionPolicy::kPigeonholeOnly;
      auto oracle = make_oracle(p.at("oracle"));
      return complex_set_run(cfg, *oracle, p.at("oracle")).trace;
    }
    if (config.construction == "gap") {
      VmMachineOracle vm;
      return gap_bk_run(get_u64(p, "k"), get_u64(p, "budget"), vm).trace;
    }
    if (config.construction == "hard-instances") {
      VmMachineOracle vm;
      return hard_instances_run(get_u64(p, "n"), get_u64(p, "budget"), vm).trace;
    }
    if (config.construction == "icc") {
      IccConfig cfg;
      cfg.k_max = get_u64(p, "k_max");
      cfg.stages = get_u64(p, "stages");
      auto oracle = make_oracle(p.at("oracle"));
      VmMachineOracle vm;
      IccSimulator sim(cfg, *oracle, vm, p.at("oracle"));
      sim.run();
      return sim.trace();
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kParse, "run config: " + std::string(ex.what()));
  }
  throw Error(ErrorKind::kParse, "unknown construction '" + config.construction + "'");
}

std::vector<CheckResult> check_trace(const StageTrace& trace) {
  if (trace.construction == "complex-set") return check_complex_set(trace);
  if (trace.construction == "gap") return check_gap(trace);
  if (trace.construction == "hard-instances") return check_hard_instances(trace);
  if (trace.construction == "icc") return check_icc(trace);
  throw Error(ErrorKind::kParse, "unknown construction '" + trace.construction + "'");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step-bounded Kolmogorov and instance complexity workbench", "kolmolab"};
  app.require_subcommand(1);

  // c
  std::string x_text, cond_text, cache_flag, window_file, out_file;
  std::uint64_t budget = 64;
  std::size_t max_len = 8;
  bool serial = false, weak = false;
  auto* c_cmd = app.add_subcommand("c", "Step-bounded C^s(x) or C^s(x | cond)");
  c_cmd->add_option("--x", x_text, "Target bitstring (empty for λ)")->required();
  c_cmd->add_option("--cond", cond_text, "Condition bitstring");
  c_cmd->add_option("--budget", budget, "Step budget");
  c_cmd->add_option("--max-len", max_len, "Longest program searched");
  c_cmd->add_option("--cache", cache_flag, "Run cache file");
  c_cmd->add_flag("--serial", serial, "Use the serial search");

  // ic
  auto* ic_cmd = app.add_subcommand("ic", "Window-restricted instance complexity");
  ic_cmd->add_option("--x", x_text, "Instance")->required();
  ic_cmd->add_option("--window", window_file, "JSON window file")->required();
  ic_cmd->add_option("--budget", budget, "Step budget");
  ic_cmd->add_option("--max-len", max_len, "Longest program searched");
  ic_cmd->add_option("--cache", cache_flag, "Run cache file");
  ic_cmd->add_flag("--weak", weak, "Weak variant (pending allowed off x)");
  ic_cmd->add_flag("--serial", serial, "Use the serial search");

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "CSV of C, ic, icbar over a window");
  profile_cmd->add_option("--window", window_file, "JSON window file")->required();
  profile_cmd->add_option("--budget", budget, "Step budget");
  profile_cmd->add_option("--max-len", max_len, "Longest program searched");
  profile_cmd->add_option("--cache", cache_flag, "Run cache file");
  profile_cmd->add_option("--out", out_file, "CSV output file (default stdout)");
  profile_cmd->add_flag("--serial", serial, "Use the serial search");

  // codecs
  std::string enum_file, code_text, table_file;
  std::uint64_t n = 0;
  auto* enc2 = app.add_subcommand("encode2log", "2 log n code for χ_A↾n");
  enc2->add_option("--enum", enum_file, "JSON enumeration file")->required();
  enc2->add_option("--n", n, "Prefix bound")->required();
  auto* dec2 = app.add_subcommand("decode2log", "Decode a 2 log n code");
  dec2->add_option("--enum", enum_file, "JSON enumeration file")->required();
  dec2->add_option("--code", code_text, "Code bits")->required();
  auto* enc1 = app.add_subcommand("encodelog", "log n code for χ_A(0..n-1) given n");
  enc1->add_option("--enum", enum_file, "JSON enumeration file")->required();
  enc1->add_option("--n", n, "Prefix length")->required();
  auto* dec1 = app.add_subcommand("decodelog", "Decode a conditional log n code");
  dec1->add_option("--enum", enum_file, "JSON enumeration file")->required();
  dec1->add_option("--code", code_text, "Code bits")->required();
  dec1->add_option("--n", n, "Prefix length")->required();
  auto* encm = app.add_subcommand("encodemc", "Mind-change code for ḡ(n)");
  encm->add_option("--table", table_file, "JSON mind-change table")->required();
  encm->add_option("--n", n, "Argument")->required();
  auto* decm = app.add_subcommand("decodemc", "Decode a mind-change code");
  decm->add_option("--table", table_file, "JSON mind-change table")->required();
  decm->add_option("--code", code_text, "Packed code bits")->required();
  decm->add_option("--n", n, "Argument")->required();

  // sim
  auto* sim = app.add_subcommand("sim", "Run a construction and write its trace");
  sim->require_subcommand(1);
  std::string config_file, save_config, oracle_flag = "vm", policy = "strict", dump_psi;
  std::uint64_t k_max = 3, stages = 0, k = 1, sim_budget = 0;
  bool seedless = false;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Re-run from a RunConfig or trace file");
    cmd->add_option("--save-config", save_config, "Write the RunConfig here");
    cmd->add_option("--out", out_file, "Trace output file");
    cmd->add_flag("--seedless", seedless, "Deterministic run (always the case)");
  };
  auto* sim_cs = sim->add_subcommand("complex-set", "Incompressible initial segments on intervals I_k");
  add_common(sim_cs);
  sim_cs->add_option("--k-max", k_max, "Largest interval index");
  sim_cs->add_option("--stages", stages, "Stage count (default 200)");
  sim_cs->add_option("--policy", policy, "strict | pigeonhole-only");
  sim_cs->add_option("--oracle", oracle_flag, "vm, or a scripted oracle file");
  sim_cs->add_option("--budget", sim_budget, "vm oracle step budget (default 4096)");
  sim_cs->add_option("--max-len", max_len, "vm oracle program length (default 12)");
  auto* sim_gap = sim->add_subcommand("gap", "Dovetailed enumeration of B_k");
  add_common(sim_gap);
  sim_gap->add_option("--k", k, "Program length bound");
  sim_gap->add_option("--budget", sim_budget, "Candidates examined (default 100000)");
  auto* sim_hi = sim->add_subcommand("hard-instances", "Finite game for a hard instance of length n");
  add_common(sim_hi);
  sim_hi->add_option("--n", n, "Instance length (default 2)");
  sim_hi->add_option("--budget", sim_budget, "Step budget (default 4096)");
  auto* sim_icc = sim->add_subcommand("icc", "Finite-injury construction with log C instance complexity");
  add_common(sim_icc);
  sim_icc->add_option("--k-max", k_max, "Largest simulated k");
  sim_icc->add_option("--stages", stages, "Stage count (default 10000)");
  sim_icc->add_option("--oracle", oracle_flag, "vm, or a scripted oracle file");
  sim_icc->add_option("--budget", sim_budget, "vm oracle step budget (default 4096)");
  sim_icc->add_option("--dump-psi", dump_psi, "Write the ψ band structure here");

  // check
  std::string trace_file;
  auto* check = app.add_subcommand("check", "Re-derive every check of a trace");
  check->add_option("trace", trace_file, "Trace file")->required();

  std::vector<const char*> argv{"kolmolab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto search = [&](RunCache& cache) {
      SearchOptions opts;
      opts.mode = serial ? Parallelism::kSerial : Parallelism::kParallel;
      opts.cache = &cache;
      return opts;
    };
    auto with_cache = [&](auto&& body) {
      const std::string path = cache_path(cache_flag);
      RunCache cache = load_cache(path);
      body(cache);
      if (!path.empty()) cache.save_file(path);
    };

    if (*c_cmd) {
      with_cache([&](RunCache& cache) {
        const BitString x = BitString::from_bits(x_text);
        const auto v = c_cmd->count("--cond") > 0
                           ? cond_c_approx(x, BitString::from_bits(cond_text), budget, max_len, search(cache))
                           : c_approx(x, budget, max_len, search(cache));
        out << format_value(v.value) << "\n";
      });
      return kExitOk;
    }
    if (*ic_cmd) {
      const auto w = ConsistencyWindow::load_file(window_file);
      with_cache([&](RunCache& cache) {
        const BitString x = BitString::from_bits(x_text);
        const auto v = weak ? ic_bar_window(x, w, budget, max_len, search(cache))
                            : ic_window(x, w, budget, max_len, search(cache));
        out << format_value(v.value) << "\n";
      });
      return kExitOk;
    }
    if (*profile_cmd) {
      const auto w = ConsistencyWindow::load_file(window_file);
      with_cache([&](RunCache& cache) {
        const auto csv = profile_csv(hardness_profile(w, budget, max_len, search(cache)), budget, max_len);
        if (out_file.empty()) {
          out << csv;
        } else {
          write_file(out_file, csv);
        }
      });
      return kExitOk;
    }
    if (*enc2) {
      out << two_log_encode(load_enumeration(enum_file), n).bits() << "\n";
      return kExitOk;
    }
    if (*dec2) {
      out << two_log_decode(BitString::from_bits(code_text), load_enumeration(enum_file)).bits() << "\n";
      return kExitOk;
    }
    if (*enc1) {
      out << log_cond_encode(load_enumeration(enum_file), n).bits() << "\n";
      return kExitOk;
    }
    if (*dec1) {
      out << log_cond_decode(BitString::from_bits(code_text), n, load_enumeration(enum_file)).bits() << "\n";
      return kExitOk;
    }
    if (*encm) {
      const auto table = MindChangeTable::load_file(table_file);
      out << mindchange_pack(mindchange_encode(table, n)).bits() << "\n";
      return kExitOk;
    }
    if (*decm) {
      const auto table = MindChangeTable::load_file(table_file);
      const auto code = mindchange_unpack(BitString::from_bits(code_text));
      out << mindchange_decode(table, code, n).bits() << "\n";
      return kExitOk;
    }
    if (*sim) {
      RunConfig config;
      CLI::App* chosen = sim->get_subcommands().front();
      if (!config_file.empty()) {
        config = RunConfig::load_file(config_file);
        if (config.construction != chosen->get_name()) {
          throw Error(ErrorKind::kParse, "config is for '" + config.construction + "', not '" +
                                             chosen->get_name() + "'");
        }
      } else if (chosen == sim_cs) {
        if (policy != "strict" && policy != "pigeonhole-only") {
          throw Error(ErrorKind::kParse, "--policy must be strict or pigeonhole-only");
        }
        config.construction = "complex-set";
        const std::size_t len = sim_cs->count("--max-len") > 0 ? max_len : 12;
        config.params = {{"k_max", k_max},
                         {"stages", stages ? stages : 200},
                         {"policy", policy == "strict" ? "strict" : "pigeonhole_only"},
                         {"oracle", oracle_desc_from_flag(oracle_flag, sim_budget ? sim_budget : 4096, len)}};
      } else if (chosen == sim_gap) {
        config.construction = "gap";
        config.params = {{"k", k}, {"budget", sim_budget ? sim_budget : 100000}};
      } else if (chosen == sim_hi) {
        config.construction = "hard-instances";
        config.params = {{"n", n ? n : 2}, {"budget", sim_budget ? sim_budget : 4096}};
      } else {
        if (k_max < 1 || k_max > 4) throw Error(ErrorKind::kRange, "--k-max must be in 1..4");
        config.construction = "icc";
        config.params = {
            {"k_max", k_max},
            {"stages", stages ? stages : 10000},
            {"oracle", oracle_desc_from_flag(oracle_flag, sim_budget ? sim_budget : 4096,
                                             (std::uint64_t{1} << k_max) - 3)},
            {"machine", "vm"}};
      }
      if (!save_config.empty()) write_file(save_config, config.to_json().dump(1) + "\n");
      const StageTrace trace = run_sim(config);
      if (!out_file.empty()) trace.save_file(out_file);
      if (!dump_psi.empty()) write_file(dump_psi, trace.final_state.at("psi").dump(1) + "\n");
      out << trace.construction << ": " << trace.events.size() << " events\n";
      return report(trace, trace.checks, out);
    }
    if (*check) {
      const StageTrace trace = StageTrace::load_file(trace_file);
      return report(trace, check_trace(trace), out);
    }
  } catch (const Error& e) {
    err << "kolmolab: " << e.what() << "\n";
    const bool violation = e.kind() == ErrorKind::kInvariant || e.kind() == ErrorKind::kOraclePigeonhole;
    return violation ? kExitViolation : kExitUsage;
  } catch (const Json::exception& e) {
    err << "kolmolab: PARSE_ERROR: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace kolmolab
