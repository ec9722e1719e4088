#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "mindmeld/cli.hpp"

using namespace mindmeld;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = MINDMELD_FIXTURE_DIR;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("mindmeld-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

cli::ReplayOptions fixture_options(const TempDir& dir) {
  cli::ReplayOptions options;
  options.transcript_path = kFixtures + "/transcript.jsonl";
  options.seeds_path = kFixtures + "/seeds.json";
  options.config_path = kFixtures + "/config.json";
  options.out_path = dir.file("report.json");
  options.snapshot_path = dir.file("snapshot.json");
  return options;
}

int run_binary(const std::string& args) {
  int status = std::system((std::string(MINDMELD_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Fixtures, FilesMatchEmbeddedDocuments) {
  EXPECT_EQ(Json::parse(read_text_file(kFixtures + "/seeds.json")), Json::parse(fixtures::kAliceBobSeeds));
  EXPECT_EQ(Json::parse(read_text_file(kFixtures + "/config.json")), Json::parse(fixtures::kAliceBobConfig));
  EXPECT_EQ(read_text_file(kFixtures + "/transcript.jsonl"), std::string(fixtures::kAliceBobTranscript));
}

TEST(Config, DefaultsAndInitialWeightFollowsPhi) {
  auto config = session_config_from_json(Json::parse(R"({"engine":{"phi":0.2}})"));
  EXPECT_DOUBLE_EQ(config.engine.initial_weight, 0.2);
  EXPECT_DOUBLE_EQ(config.default_alpha, 0.5);
  EXPECT_EQ(config.default_strategy, SelectionStrategy::all());
  EXPECT_EQ(session_config_from_json(to_json(config)), config);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"engin":{}})")), Error);
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"engine":{"learn_rate":0.1}})")), Error);
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"engine":{"phi":-1}})")), Error);
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"default_alpha":2})")), Error);
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"memory":{"stm_capacity":0}})")), Error);
  EXPECT_THROW(session_config_from_json(Json::parse(R"({"engine":{"rng_seed":-3}})")), Error);
}

TEST(Config, RandomModesInheritRngSeed) {
  auto config = session_config_from_json(
      Json::parse(R"({"engine":{"rng_seed":12},"relevance_mode":"random","default_strategy":"random_k:2"})"));
  EXPECT_EQ(config.relevance_mode, RelevanceMode::random(12));
  EXPECT_EQ(config.default_strategy, SelectionStrategy::random_k(2, 12));
}

TEST(Config, EnvironmentFallback) {
  ::setenv("MINDMELD_CONFIG", (kFixtures + "/config.json").c_str(), 1);
  EXPECT_EQ(load_session_config(std::nullopt).engine.rng_seed, 7u);
  ::unsetenv("MINDMELD_CONFIG");
  EXPECT_EQ(load_session_config(std::nullopt), SessionConfig{});
}

TEST(Dot, EmptyAndSmallMaps) {
  EXPECT_EQ(to_dot(MindMap{}), "graph G { }\n");
  MindMap map;
  map.connect(map.add_cell("sun", 2.0).id, map.add_cell("day", 1.0).id, 0.1);
  EXPECT_EQ(to_dot(map),
            "graph G {\n"
            "  \"day\" [label=\"day\\nact=1\"];\n"
            "  \"sun\" [label=\"sun\\nact=2\"];\n"
            "  \"day\" -- \"sun\" [weight=0.1];\n"
            "}\n");
}

TEST(Dot, EscapesQuotes) {
  MindMap map;
  map.add_cell("a\"b", 1.5);
  EXPECT_EQ(to_dot(map), "graph G {\n  \"a\\\"b\" [label=\"a\\\"b\\nact=1.5\"];\n}\n");
}

TEST(Dot, FormatNumber) {
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
  EXPECT_EQ(format_number(0.09), "0.09");
  EXPECT_EQ(format_number(-0.0), "0");
}

TEST(Replay, FixtureReportHasExpectedMatches) {
  TempDir dir;
  std::ostringstream err;
  ASSERT_EQ(cli::replay(fixture_options(dir), err), 0) << err.str();
  Json report = Json::parse(read_text_file(dir.file("report.json")));
  ASSERT_EQ(report["final_trust"].size(), 2u);
  EXPECT_EQ(report["final_trust"][0]["observer"], "alice");
  EXPECT_EQ(report["final_trust"][0]["match"], 0.2);
  EXPECT_EQ(report["final_trust"][0]["decision"], "no");
  EXPECT_EQ(report["final_trust"][1]["match"], 1.0);
  EXPECT_EQ(report["final_trust"][1]["decision"], "yes");
  EXPECT_EQ(report["turns"].size(), 3u);
  // The embedded session restores losslessly.
  Session restored = session_from_json(report["session"]);
  EXPECT_EQ(to_json(restored).dump(), report["session"].dump());
  EXPECT_EQ(Json::parse(read_text_file(dir.file("snapshot.json"))), report["session"]);
}

TEST(Replay, ErrorsMapToExitCodes) {
  TempDir dir;
  std::ostringstream err;
  auto options = fixture_options(dir);
  options.seeds_path = dir.file("missing.json");
  EXPECT_EQ(cli::replay(options, err), 1);

  std::ofstream(dir.file("bad.jsonl")) << "{\"speaker\":\"carol\",\"text\":\"hello sunshine\"}\n";
  options = fixture_options(dir);
  options.transcript_path = dir.file("bad.jsonl");
  err.str("");
  EXPECT_EQ(cli::replay(options, err), 2);
  EXPECT_NE(err.str().find("carol"), std::string::npos);

  std::ofstream(dir.file("broken.jsonl")) << "{\"speaker\":";
  options.transcript_path = dir.file("broken.jsonl");
  EXPECT_EQ(cli::replay(options, err), 1);
}

TEST(Demo, TraceIsStableAndShowsKeyFacts) {
  std::ostringstream first, second;
  cli::demo(first);
  cli::demo(second);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_NE(first.str().find("act(day)=2"), std::string::npos);
  EXPECT_NE(first.str().find("trust alice->bob: match=0.200 decision=no alpha=0.500"), std::string::npos);
  EXPECT_NE(first.str().find("trust bob->alice: match=1.000 decision=yes alpha=0.500"), std::string::npos);
}

TEST(ExportDot, ViewsAndErrors) {
  TempDir dir;
  std::ostringstream err;
  ASSERT_EQ(cli::replay(fixture_options(dir), err), 0);
  std::ostringstream out;
  EXPECT_EQ(cli::export_dot(dir.file("snapshot.json"), "self:bob", out, err), 0);
  EXPECT_EQ(out.str(),
            "graph G {\n  \"hot\" [label=\"hot\\nact=1\"];\n  \"sun\" [label=\"sun\\nact=1\"];\n"
            "  \"hot\" -- \"sun\" [weight=0.1];\n}\n");
  out.str("");
  EXPECT_EQ(cli::export_dot(dir.file("report.json"), "outer:alice:bob", out, err), 0);
  EXPECT_NE(out.str().find("\"day\" [label=\"day\\nact=2\"]"), std::string::npos);
  EXPECT_NE(out.str().find("\"day\" -- \"sunny\" [weight=0.1]"), std::string::npos);

  EXPECT_EQ(cli::export_dot(dir.file("snapshot.json"), "self:carol", out, err), 2);
  EXPECT_EQ(cli::export_dot(dir.file("snapshot.json"), "sideways", out, err), 2);
  EXPECT_EQ(cli::export_dot(dir.file("nope.json"), "self:bob", out, err), 1);
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_binary("demo"), 0);
  std::string base = "replay --transcript " + kFixtures + "/transcript.jsonl --seeds " + kFixtures + "/seeds.json";
  EXPECT_EQ(run_binary(base + " --config " + kFixtures + "/config.json --out " + dir.file("r.json")), 0);
  EXPECT_EQ(run_binary(base + " --config " + dir.file("absent.json") + " --out " + dir.file("r2.json")), 1);
  EXPECT_EQ(run_binary("export-dot --snapshot " + dir.file("r.json") + " --view outer:bob:carol"), 2);
}
