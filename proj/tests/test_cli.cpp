#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kolmolab/cli.hpp"
#include "kolmolab/codecs.hpp"
#include "kolmolab/complexity.hpp"
#include "kolmolab/icc.hpp"

using namespace kolmolab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = dispatch(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kolmolab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("c prints the budgeted complexity") {
  const auto o = run({"c", "--x", "11", "--budget", "64", "--max-len", "8"});
  CHECK(o.code == kExitOk);
  CHECK(o.out == "5\n");
  CHECK(run({"c", "--x", "11", "--budget", "64", "--max-len", "8", "--serial"}).out == "5\n");
  // Oracle: the value is the shortest witness c_approx finds directly.
  CHECK(format_value(c_approx(BitString::from_bits("11"), 64, 8).value) + "\n" == o.out);
  CHECK(run({"c", "--x", "0101", "--budget", "2", "--max-len", "3"}).out == "inf\n");
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"c"}).code == kExitUsage);
  CHECK(run({"c", "--x", "012"}).code == kExitUsage);
  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("ic and profile over a window file") {
  const auto dir = scratch("ic");
  write(dir / "w.json", R"({"": 1, "0": 0, "1": 1})");
  const auto strict = run({"ic", "--x", "1", "--window", (dir / "w.json").string(), "--budget", "16",
                           "--max-len", "5"});
  const auto weak = run({"ic", "--x", "1", "--window", (dir / "w.json").string(), "--budget", "16",
                         "--max-len", "5", "--weak"});
  REQUIRE(strict.code == kExitOk);
  REQUIRE(weak.code == kExitOk);
  const auto w = ConsistencyWindow::load_file(dir / "w.json");
  CHECK(strict.out == format_value(ic_window(BitString::from_bits("1"), w, 16, 5).value) + "\n");
  CHECK(weak.out == format_value(ic_bar_window(BitString::from_bits("1"), w, 16, 5).value) + "\n");

  const auto prof = run({"profile", "--window", (dir / "w.json").string(), "--budget", "16", "--max-len", "5"});
  REQUIRE(prof.code == kExitOk);
  CHECK(prof.out.rfind("x,c,ic,icbar,budget,max_len\n", 0) == 0);
  CHECK(std::count(prof.out.begin(), prof.out.end(), '\n') == 4);

  SUBCASE("malformed windows exit 2 with a diagnostic") {
    write(dir / "bad.json", R"({"0": 2})");
    const auto o = run({"ic", "--x", "0", "--window", (dir / "bad.json").string()});
    CHECK(o.code == kExitUsage);
    CHECK_FALSE(o.err.empty());
    write(dir / "trunc.json", R"({"0": 1,)");
    CHECK(run({"ic", "--x", "0", "--window", (dir / "trunc.json").string()}).code == kExitUsage);
    CHECK(run({"ic", "--x", "00", "--window", (dir / "w.json").string()}).code == kExitUsage);
  }
}

TEST_CASE("KOLMOLAB_CACHE overrides --cache") {
  const auto dir = scratch("cache");
  const auto flag_path = dir / "flag.json";
  const auto env_path = dir / "env.json";
  ::setenv("KOLMOLAB_CACHE", env_path.c_str(), 1);
  const auto o = run({"c", "--x", "11", "--budget", "64", "--max-len", "8", "--cache", flag_path.string()});
  ::unsetenv("KOLMOLAB_CACHE");
  CHECK(o.out == "5\n");
  CHECK(fs::exists(env_path));
  CHECK_FALSE(fs::exists(flag_path));
  // A warm cache gives the same answer.
  CHECK(run({"c", "--x", "11", "--budget", "64", "--max-len", "8", "--cache", env_path.string()}).out == "5\n");
}

TEST_CASE("codec round trips through the CLI") {
  const auto dir = scratch("codecs");
  write(dir / "e.json", "[5, 1, 9, 2, 5, 14]");
  const auto e = (dir / "e.json").string();
  const auto enc = run({"encode2log", "--enum", e, "--n", "10"});
  REQUIRE(enc.code == kExitOk);
  CHECK(enc.out.size() == 2 * 4 + 1);
  const auto code = enc.out.substr(0, enc.out.size() - 1);
  const std::vector<std::uint64_t> a = {5, 1, 9, 2, 5, 14};
  CHECK(run({"decode2log", "--enum", e, "--code", code}).out == characteristic_prefix(a, 10).bits() + "\n");

  const auto enc1 = run({"encodelog", "--enum", e, "--n", "10"});
  REQUIRE(enc1.code == kExitOk);
  CHECK(enc1.out == "0100\n");  // m = |{1, 2, 5, 9}| = 4 in 4 bits
  CHECK(run({"decodelog", "--enum", e, "--code", "0100", "--n", "10"}).out ==
        characteristic_prefix(a, 9).bits() + "\n");

  write(dir / "t.json", R"({"approx": [["0"], ["10"], ["0110", "0110", "0111", "0111"]], "f": [0, 1, 2, 3, 4]})");
  const auto t = (dir / "t.json").string();
  const auto table = MindChangeTable::load_file(t);
  for (const std::uint64_t n : {0, 1, 2}) {
    const auto packed = run({"encodemc", "--table", t, "--n", std::to_string(n)});
    REQUIRE(packed.code == kExitOk);
    CHECK(packed.out == mindchange_pack(mindchange_encode(table, n)).bits() + "\n");
    const auto bits = packed.out.substr(0, packed.out.size() - 1);
    CHECK(run({"decodemc", "--table", t, "--code", bits, "--n", std::to_string(n)}).out ==
          mindchange_decode(table, mindchange_encode(table, n), n).bits() + "\n");
  }
  write(dir / "bad.json", R"({"approx": [["0", "1", "0"]], "f": [0]})");
  CHECK(run({"encodemc", "--table", (dir / "bad.json").string(), "--n", "0"}).code == kExitUsage);
}

TEST_CASE("sim hard-instances then check") {
  const auto dir = scratch("game");
  const auto g = (dir / "g.json").string();
  const auto sim = run({"sim", "hard-instances", "--n", "2", "--budget", "4096", "--out", g});
  CHECK(sim.code == kExitOk);
  const auto chk = run({"check", g});
  CHECK(chk.code == kExitOk);
  CHECK(chk.out.find("PASS certificate") != std::string::npos);
}

TEST_CASE("check names the failed claim of a corrupted icc trace") {
  const auto dir = scratch("icc");
  const auto path = dir / "icc.json";
  REQUIRE(run({"sim", "icc", "--stages", "3000", "--out", path.string()}).code == kExitOk);
  CHECK(run({"check", path.string()}).code == kExitOk);
  StageTrace t = StageTrace::load_file(path);
  const auto stage = inject_snapshot_fault(t);
  REQUIRE(stage.has_value());
  t.save_file(dir / "bad.json");
  const auto o = run({"check", (dir / "bad.json").string()});
  CHECK(o.code == kExitViolation);
  CHECK(o.out.find("FAIL claim_3a at stage " + std::to_string(*stage)) != std::string::npos);

  SUBCASE("a malformed trace exits 2") {
    write(dir / "junk.json", R"({"construction": "icc", "params": {}})");
    CHECK(run({"check", (dir / "junk.json").string()}).code == kExitUsage);
    write(dir / "junk2.json", "not json");
    CHECK(run({"check", (dir / "junk2.json").string()}).code == kExitUsage);
    CHECK(run({"check", (dir / "missing.json").string()}).code == kExitUsage);
  }
  SUBCASE("--dump-psi writes the band structure") {
    REQUIRE(run({"sim", "icc", "--stages", "500", "--dump-psi", (dir / "psi.json").string()}).code == kExitOk);
    CHECK(Json::parse(slurp(dir / "psi.json")).is_array());
  }
}

TEST_CASE("persisted configs re-run to identical bytes") {
  const auto dir = scratch("repro");
  const std::vector<std::vector<std::string>> sims = {
      {"sim", "complex-set", "--stages", "60", "--seedless"},
      {"sim", "gap", "--k", "1", "--budget", "2000"},
      {"sim", "hard-instances", "--n", "3"},
      {"sim", "icc", "--stages", "800"},
  };
  int i = 0;
  for (auto args : sims) {
    const auto cfg = (dir / ("cfg" + std::to_string(i) + ".json")).string();
    const auto a = (dir / ("a" + std::to_string(i) + ".json")).string();
    const auto b = (dir / ("b" + std::to_string(i) + ".json")).string();
    auto first = args;
    first.insert(first.end(), {"--save-config", cfg, "--out", a});
    CHECK_MESSAGE(run(first).code == kExitOk, args[1]);
    CHECK(run({"sim", args[1], "--config", cfg, "--out", b}).code == kExitOk);
    CHECK(slurp(a) == slurp(b));
    // A trace file is itself a config.
    const auto c = (dir / ("c" + std::to_string(i) + ".json")).string();
    CHECK(run({"sim", args[1], "--config", a, "--out", c}).code == kExitOk);
    CHECK(slurp(a) == slurp(c));
    ++i;
  }
  CHECK(run({"sim", "gap", "--config", (dir / "cfg0.json").string()}).code == kExitUsage);
}

TEST_CASE("scripted oracles and pigeonhole violations exit 1") {
  const auto dir = scratch("scripted");
  write(dir / "o.json", R"([["", 0, 0], ["0", 0, 0], ["1", 0, 0], ["00", 0, 0], ["01", 0, 0],
                             ["10", 0, 0], ["11", 0, 0]])");
  const auto o = run({"sim", "complex-set", "--k-max", "0", "--stages", "5", "--policy", "pigeonhole-only",
                      "--oracle", (dir / "o.json").string(), "--out", (dir / "t.json").string()});
  CHECK(o.code == kExitViolation);
  CHECK(o.out.find("ORACLE_PIGEONHOLE_VIOLATION") != std::string::npos);
  CHECK(run({"check", (dir / "t.json").string()}).code == kExitViolation);
  write(dir / "inc.json", R"([["1", 1, 0], ["1", 2, 3]])");
  CHECK(run({"sim", "complex-set", "--oracle", (dir / "inc.json").string()}).code == kExitUsage);
}
