#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <vector>

#include "tplan/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kExe = TPLAN_EXE;
const std::string kData = TPLAN_DATA_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tplan_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = "\"" + kExe + "\" -q " + args + " 2>\"" +
                            (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  std::string read(const std::string& name) const {
    return tplan::io::read_file(path(name));
  }

  fs::path dir_;
};

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

/// Element nesting is balanced (self-closing tags allowed).
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3] == "/") continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else {
      stack.push_back(m[2]);
    }
  }
  return stack.empty();
}

}  // namespace

TEST_F(Cli, PipelineSucceedsAndWritesSidecars) {
  ASSERT_EQ(run("synth " + kData + "/muesli_spec.json -o " + path("d.json")), 0);
  EXPECT_TRUE(fs::exists(path("d.json.config.json")));
  ASSERT_EQ(run("assess " + path("d.json") + " -o " + path("a.json")), 0);
  ASSERT_EQ(run("infer " + path("d.json") + " -o " + path("i.json") + " --top 2"), 0);
  ASSERT_EQ(run("plan " + path("d.json") + " -o " + path("p.json") + " --render " +
                path("p.svg")),
            0);
  ASSERT_EQ(run("eval " + path("d.json") + " -o " + path("e.json") + " --csv " +
                path("e.csv") + " --trials 2"),
            0);
  ASSERT_EQ(run("render " + path("p.json") + " -o " + path("r.svg")), 0);

  const auto sidecar = tplan::io::parse_json(read("p.json.config.json"));
  EXPECT_EQ(sidecar["command"], "plan");
  EXPECT_EQ(sidecar["input"], "d.json");
  EXPECT_TRUE(sidecar["config"].contains("eps"));

  const auto plan = tplan::io::parse_json(read("p.json"));
  EXPECT_EQ(plan["left"].size() + plan["right"].size(), 11u);
  const auto infer = tplan::io::parse_json(read("i.json"));
  EXPECT_TRUE(infer.is_object());

  const std::string csv = read("e.csv");
  EXPECT_EQ(csv.rfind("trial,prefix,plan_distance,baseline_distance,baseline_id\n", 0), 0u);
  EXPECT_EQ(count(csv, "\n"), 1u + 2u * 20u);
}

TEST_F(Cli, RenderedSvgHasLanesAndBars) {
  ASSERT_EQ(run("synth " + kData + "/two_mode_spec.json -o " + path("d.json")), 0);
  ASSERT_EQ(run("plan " + path("d.json") + " -o " + path("p.json") + " --render " +
                path("p.svg")),
            0);
  const std::string svg = read("p.svg");
  EXPECT_TRUE(balanced_xml(svg));
  EXPECT_EQ(count(svg, "<rect"), 6u);
  EXPECT_EQ(count(svg, ">left hand<"), 1u);
  EXPECT_EQ(count(svg, ">right hand<"), 1u);
  EXPECT_GT(count(svg, "data-subtask=\"0\""), 0u);
  EXPECT_GT(count(svg, "data-subtask=\"1\""), 0u);

  // Bar extents follow the declared scale.
  const auto plan = tplan::io::parse_json(read("p.json"));
  const std::regex root(R"re(data-px-per-second="([0-9.]+)" data-origin-x="([0-9.]+)" data-t0="([0-9.-]+)")re");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, root));
  const double scale = std::stod(m[1]), origin = std::stod(m[2]), t0 = std::stod(m[3]);
  for (const auto& a : plan["left"]) {
    const std::string label = a["verb"].get<std::string>() + " " + a["object"].get<std::string>();
    const std::regex bar("data-action=\"" + label +
                         R"re(" data-subtask="\d+"><rect x="([0-9.]+)" y="[0-9.]+" width="([0-9.]+)")re");
    std::smatch b;
    ASSERT_TRUE(std::regex_search(svg, b, bar)) << label;
    EXPECT_NEAR(std::stod(b[1]), origin + (a["start"].get<double>() - t0) * scale, 2e-3);
    EXPECT_NEAR(std::stod(b[2]),
                (a["end"].get<double>() - a["start"].get<double>()) * scale, 2e-3);
  }
}

TEST_F(Cli, ExitCodes) {
  // Bad usage and malformed input are validation errors.
  EXPECT_EQ(run("plan"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  write("bad.json", R"({"task": "x", "demonstrations": [{"id": "d", "left": 3, "right": []}]})");
  EXPECT_EQ(run("assess " + path("bad.json") + " -o " + path("out.json")), 2);
  EXPECT_NE(read("stderr.txt").find("$.demonstrations[0].left"), std::string::npos);
  write("cfg.json", R"({"epsilon": 0.1})");
  EXPECT_EQ(run("--config " + path("cfg.json") + " synth " + kData +
                "/muesli_spec.json -o " + path("d.json")),
            2);
  EXPECT_FALSE(fs::exists(path("d.json")));

  // Contradictory spec: infeasible.
  write("spec.json", R"({
    "task": "loop",
    "actions": [{"verb": "a", "object": "x", "hand": "left", "subtask": 0},
                {"verb": "b", "object": "x", "hand": "right", "subtask": 0},
                {"verb": "c", "object": "x", "hand": "right", "subtask": 0}],
    "modes": [{"probability": 1, "relations": [
      {"a": {"verb": "a", "object": "x"}, "b": {"verb": "b", "object": "x"}, "relation": "before"},
      {"a": {"verb": "b", "object": "x"}, "b": {"verb": "c", "object": "x"}, "relation": "before"},
      {"a": {"verb": "a", "object": "x"}, "b": {"verb": "c", "object": "x"}, "relation": "after"}]}]})");
  EXPECT_EQ(run("synth " + path("spec.json") + " -o " + path("d.json")), 3);

  // A tiny wall limit times out but still leaves the partial trace.
  EXPECT_EQ(run("bench " + kData + "/bench_5_actions.json -o " + path("b.csv") +
                " --time-limit 0.0005"),
            4);
  EXPECT_TRUE(fs::exists(path("b.csv")));
}

TEST_F(Cli, BenchTraceIsComplete) {
  ASSERT_EQ(run("bench " + kData + "/bench_5_actions.json -o " + path("b.csv") +
                " --interval 0.005"),
            0);
  const std::string csv = read("b.csv");
  EXPECT_EQ(csv.rfind("elapsed,partials,solutions\n", 0), 0u);
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_NE(last.find(",0,"), std::string::npos) << last;
}

TEST_F(Cli, SeedFlagChangesSynthOutput) {
  ASSERT_EQ(run("synth " + kData + "/muesli_spec.json -o " + path("a.json")), 0);
  ASSERT_EQ(run("synth " + kData + "/muesli_spec.json -o " + path("b.json")), 0);
  ASSERT_EQ(run("--seed 99 synth " + kData + "/muesli_spec.json -o " + path("c.json")), 0);
  EXPECT_EQ(read("a.json"), read("b.json"));
  EXPECT_NE(read("a.json"), read("c.json"));
}
