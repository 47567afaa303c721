#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result omchain(const std::string& args, const std::string& env = "") {
  const std::string command = env + (env.empty() ? "" : " ") + std::string(OMCHAIN_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buffer[4096];
  while (std::size_t got = std::fread(buffer, 1, sizeof buffer, pipe)) out.append(buffer, got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_work" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

const char* kMinusOne = R"({"network": {"kind": "cycle", "params": {"m": 4}}, "n": 5,
  "model": {"kind": "model1-minus-one"}, "tendency": {"kind": "linear"}})";
const char* kModel1 = R"({"network": {"kind": "cycle", "params": {"m": 4}}, "n": 5,
  "model": {"kind": "model1"}, "tendency": {"kind": "linear"}})";
const char* kCarrying = R"({"network": {"kind": "path", "params": {"m": 3}}, "n": 6,
  "model": {"kind": "carrying", "base": "model2", "L": 1, "K": 3}, "tendency": {"kind": "step"}})";
const char* kCarryingPair = R"({"network": {"kind": "path", "params": {"m": 2}}, "n": 6,
  "model": {"kind": "carrying", "base": "model2", "L": 1, "K": 3}, "tendency": {"kind": "step"}})";
const char* kSkewedTriangle = R"({"chain": {"states": ["a", "b", "c"], "transitions": [
  {"from": "a", "to": "b", "coef": 0.3, "order": 0}, {"from": "b", "to": "a", "coef": 0.3, "order": 0},
  {"from": "b", "to": "c", "coef": 0.3, "order": 0}, {"from": "c", "to": "b", "coef": 0.3, "order": 0},
  {"from": "c", "to": "a", "coef": 0.3, "order": 0}, {"from": "a", "to": "c", "coef": 0.3, "order": 1}]}})";

}  // namespace

TEST_CASE("enumerate") {
  const auto dir = workdir("enumerate");
  CHECK(omchain("enumerate --n 3 --m 4").out == "20 states\n");
  CHECK(omchain("enumerate --n 5 --m 4").out == "56 states\n");
  const auto out = dir / "states.txt";
  const auto r = omchain("enumerate --n 0 --m 3 --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out == "1 state\n");
  CHECK(read_file(out) == "0,0,0\n");
  CHECK(fs::exists(dir / "omchain-manifest.json"));

  CHECK(omchain("enumerate --n 5 --m 4", "OMCHAIN_STATE_CAP=10").code == 3);
  CHECK(omchain("enumerate --n 5").code == 1);
}

TEST_CASE("check") {
  const auto dir = workdir("check");
  const auto fig1 = omchain("check --preset fig1");
  CHECK(fig1.code == 0);
  CHECK(contains(fig1.out, "OM-REVERSIBLE; clustering: yes; generalized: yes\n"));
  CHECK(contains(fig1.out, "  (0,0,0,5) 0\n"));
  CHECK(contains(fig1.out, "  (1,1,1,2) 3\n"));

  const auto minus = omchain("check --no-nu --config " + write_config(dir, "m.json", kMinusOne).string());
  CHECK(minus.code == 0);
  CHECK(contains(minus.out, "clustering: no; generalized: yes"));

  const auto skewed = omchain("check --config " + write_config(dir, "t.json", kSkewedTriangle).string());
  CHECK(skewed.code == 2);
  CHECK(contains(skewed.out, "NOT OM-REVERSIBLE"));
  CHECK(contains(skewed.out, "cycle: "));
  CHECK(contains(skewed.out, "forward order sum"));

  CHECK(omchain("check --config " + write_config(dir, "bad.json", "{not json").string()).code == 1);
  CHECK(omchain("check --preset unknown").code == 1);
  CHECK(omchain("check --preset fig1 --config x.json").code == 1);
}

TEST_CASE("exponents") {
  const auto dir = workdir("exponents");
  const auto prefix = (dir / "model1").string();
  const auto r = omchain("exponents --config " + write_config(dir, "m1.json", kModel1).string() + " --out " + prefix);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "OMSTAT: PASS (56/56 states)\n"));
  CHECK(contains(r.out, "SUPPORT: PASS (56/56 states)\n"));
  CHECK(fs::exists(prefix + ".csv"));
  CHECK(fs::exists(prefix + "-support.json"));
  const auto report = nlohmann::json::parse(read_file(prefix + ".json"));
  CHECK(report["matched"] == 56);

  CHECK(omchain("exponents --preset fig1 --eps-grid 0.01").code == 1);
  CHECK(omchain("exponents --preset fig1 --eps-grid 0.01,abc").code == 1);
  CHECK(omchain("exponents --preset fig1 --jobs 2").code == 0);

  // The literal carrying-capacity chain fails the cycle condition; the
  // comparison against the closed-form potential is reported as a failure.
  const auto carrying = omchain("exponents --config " + write_config(dir, "c.json", kCarrying).string());
  CHECK(carrying.code == 2);
  CHECK(contains(carrying.out, "OMSTAT: SKIPPED"));
  CHECK(contains(carrying.out, "CARRYING: FAIL"));
}

TEST_CASE("omega0") {
  const auto dir = workdir("omega0");
  const auto clustering = omchain("omega0 --preset fig1");
  CHECK(clustering.code == 0);
  CHECK(clustering.out == "Omega0: 4 states\n  0,0,0,5\n  0,0,5,0\n  0,5,0,0\n  5,0,0,0\n");

  const auto pair = omchain("omega0 --config " + write_config(dir, "p.json", kCarryingPair).string());
  CHECK(contains(pair.out, "Omega0 (brute force)"));
  CHECK(contains(pair.out, "closed form (case 2)"));

  const auto out = dir / "omega0.json";
  const auto flags = omchain("omega0 --n 7 --m 3 --L 1 --K 3 --out " + out.string());
  const auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc["states"].size() > 0);
  CHECK(doc["closed_form_min"] == 3);
  CHECK(flags.code == (doc["min_matches"].get<bool>() && doc["set_matches"].get<bool>() ? 0 : 2));

  CHECK(omchain("omega0 --n 7 --m 3").code == 1);
}

TEST_CASE("simulate") {
  const auto dir = workdir("simulate");
  const auto a = dir / "a";
  const auto r = omchain("simulate --preset torus-fig2 --steps 300000 --out-dir " + a.string());
  CHECK(r.code == 0);
  for (int t : {1000, 40000, 80000, 300000}) CHECK(fs::exists(a / ("snapshot_" + std::to_string(t) + ".csv")));
  CHECK(fs::exists(a / "trajectory.csv"));
  const auto summary = nlohmann::json::parse(read_file(a / "summary.json"));
  CHECK(summary["config"]["n"] == 120);
  CHECK(summary["averaging_window"] == 300000);

  const auto b = dir / "b";
  omchain("simulate --preset torus-fig2 --steps 300000 --out-dir " + b.string());
  CHECK(read_file(a / "trajectory.csv") == read_file(b / "trajectory.csv"));
  CHECK(read_file(a / "snapshot_300000.csv") == read_file(b / "snapshot_300000.csv"));

  const auto zero = dir / "zero";
  CHECK(omchain("simulate --preset torus-fig2 --steps 0 --out-dir " + zero.string()).code == 0);
  std::vector<std::string> snapshots;
  for (const auto& entry : fs::directory_iterator(zero)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0) snapshots.push_back(name);
  }
  CHECK(snapshots == std::vector<std::string>{"snapshot_0.csv"});
  CHECK(read_file(zero / "trajectory.csv") == "step,support_size,peak_ratio\n0,120,0.008333333333\n");

  const auto seeds = dir / "seeds";
  CHECK(omchain("simulate --preset fig1 --eps 0.05 --steps 1000 --initial uniform-random --seed 1 --seed 2 --jobs 2 "
                "--out-dir " + seeds.string()).code == 0);
  CHECK(fs::exists(seeds / "seed-1" / "trajectory.csv"));
  CHECK(fs::exists(seeds / "seed-2" / "summary.json"));
  const auto manifest = nlohmann::json::parse(read_file(seeds / "omchain-manifest.json"));
  CHECK(manifest["seeds"] == nlohmann::json::array({1, 2}));

  CHECK(omchain("simulate --preset fig1 --eps 0.05 --steps 10 --initial alternating --out-dir " +
                (dir / "bad").string()).code == 1);
  CHECK(omchain("simulate --preset torus-fig2 --steps 10 --snapshots 20 --out-dir " + (dir / "bad2").string()).code == 1);
}

TEST_CASE("export-graph and manifest replay") {
  const auto dir = workdir("export");
  const auto out = dir / "fig1.json";
  const auto manifest_path = dir / "run.json";
  const auto r = omchain("--manifest " + manifest_path.string() + " export-graph --preset fig1 --format json --out " +
                         out.string());
  CHECK(r.code == 0);
  const auto graph = nlohmann::json::parse(read_file(out));
  CHECK(graph["format_version"] == 1);
  CHECK(graph["nodes"].size() == 56);

  const auto manifest = nlohmann::json::parse(read_file(manifest_path));
  CHECK(manifest["command"] == "export-graph");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["outputs"] == nlohmann::json::array({out.string()}));
  CHECK(manifest["config"]["n"] == 5);
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("duration_seconds"));

  // Replaying the recorded argv reproduces the output byte for byte.
  const auto first = read_file(out);
  fs::remove(out);
  std::string args;
  const auto argv = manifest["argv"];
  for (std::size_t k = 1; k < argv.size(); ++k) args += " '" + argv[k].get<std::string>() + "'";
  CHECK(omchain(args).code == 0);
  CHECK(read_file(out) == first);

  const auto dot = omchain("export-graph --preset fig1 --format dot");
  CHECK(dot.out.rfind("digraph", 0) == 0);
  CHECK(omchain("export-graph --preset fig1 --format svg").code == 1);
  CHECK(omchain("export-graph --config " + write_config(dir, "t.json", kSkewedTriangle).string()).code == 2);
}

TEST_CASE("help output is stable") {
  for (const std::string command : {"", "enumerate", "check", "exponents", "omega0", "simulate", "export-graph"}) {
    const auto r = omchain(command + (command.empty() ? "" : " ") + "--help");
    CHECK(r.code == 0);
    const fs::path golden =
        fs::path(OMCHAIN_TEST_DATA) / "golden" / ("help" + (command.empty() ? "" : "_" + command) + ".txt");
    if (const char* regen = std::getenv("OMCHAIN_REGENERATE_GOLDEN"); regen && *regen) {
      std::ofstream(golden, std::ios::binary) << r.out;
    }
    CHECK(r.out == read_file(golden));
  }
  CHECK(contains(omchain("--version").out, "omchain 1.0.0"));
}
