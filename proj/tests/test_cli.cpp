#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cibnet/cibnet.hpp"

using namespace cibnet;

namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr together
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("cibnet_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const auto log = dir_ / "cli.log";
    const std::string cmd = std::string("\"") + CIBNET_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    o.output = ss.str();
    return o;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  std::string q(const fs::path& p) const { return "\"" + p.string() + "\""; }

  fs::path dir_;
};

Scenario tiny_scenario() {
  Scenario s = paper_august();
  s.organic.users = 250;
  return s;
}

}  // namespace

TEST_F(CliTest, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("detect").code, 2);
  EXPECT_EQ(run("detect --config x.json --bogus").code, 2);
  EXPECT_EQ(run("detect --config " + q(dir_ / "missing.json")).code, 2);
  EXPECT_EQ(run("detect --config " + q(write("bad.json", "{oops"))).code, 2);
  EXPECT_EQ(run("synth --preset nope --out " + q(dir_ / "s")).code, 2);
  EXPECT_EQ(run("robustness --preset sync-groups --fraction 1.0").code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(CliTest, MissingInputIsDataError) {
  auto cfg = write("run.json", R"({"posts": "nowhere.jsonl"})");
  EXPECT_EQ(run("detect --config " + q(cfg)).code, 3);
  EXPECT_EQ(run("ingest-check --posts " + q(dir_ / "nowhere.jsonl")).code, 3);
}

TEST_F(CliTest, EmptyPostsWarnsAndWritesNothing) {
  write("posts.jsonl", "");
  auto cfg = write("run.json", R"({"posts": "posts.jsonl", "out": "out"})");
  auto o = run("detect --config " + q(cfg));
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.output.find("no data"), std::string::npos) << o.output;
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, IngestCheckReportsLedger) {
  auto posts = write("posts.jsonl",
                     "{\"post_id\": \"p1\", \"user_id\": \"u1\", \"timestamp\": 1722470400}\n"
                     "not json at all\n");
  auto o = run("ingest-check --posts " + q(posts));
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.output.find("posts 1"), std::string::npos) << o.output;
  EXPECT_NE(o.output.find("ledger 1"), std::string::npos) << o.output;
}

TEST_F(CliTest, SynthDetectEvalRoundTrip) {
  std::ofstream(dir_ / "scenario.json") << to_json(tiny_scenario()).dump();
  auto synth = run("synth --scenario " + q(dir_ / "scenario.json") + " --seed 3 --out " + q(dir_ / "corpus"));
  ASSERT_EQ(synth.code, 0) << synth.output;
  for (const char* f : {"posts.jsonl", "comments.jsonl", "embeddings.jsonl", "truth.json", "run.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "corpus" / f)) << f;
  }
  const auto cfg = q(dir_ / "corpus" / "run.json");
  auto detect = run("detect --config " + cfg + " --trace hashtag_sequence --trace speech_similarity --threads 2");
  ASSERT_EQ(detect.code, 0) << detect.output;
  const auto out = dir_ / "corpus" / "detect";
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "2024-08" / "hashtag_sequence" / "clusters.json"));
  auto manifest = Json::parse(std::ifstream(out / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 3);

  auto report = run("report --config " + cfg + " --trace hashtag_sequence --out " + q(dir_ / "rep"));
  EXPECT_EQ(report.code, 0);
  EXPECT_NE(report.output.find("== 2024-08 / hashtag_sequence (ok)"), std::string::npos) << report.output;

  auto eval = run("eval --config " + cfg + " --trace hashtag_sequence --truth " + q(dir_ / "corpus" / "truth.json"));
  ASSERT_EQ(eval.code, 0) << eval.output;
  auto scores = Json::parse(std::ifstream(out / "eval.json"));
  EXPECT_DOUBLE_EQ(scores["hashtag_sequence"]["campaign_recall"]["hashtag-68"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(scores["hashtag_sequence"]["precision"].get<double>(), 1.0);

  EXPECT_EQ(run("detect --config " + cfg + " --window 1999").code, 2);
  EXPECT_EQ(run("detect --config " + cfg + " --trace astrology").code, 2);
}

TEST_F(CliTest, NonConvergenceExitsWithFour) {
  std::ofstream(dir_ / "scenario.json") << to_json(tiny_scenario()).dump();
  ASSERT_EQ(run("synth --scenario " + q(dir_ / "scenario.json") + " --out " + q(dir_)).code, 0);
  auto j = Json::parse(std::ifstream(dir_ / "run.json"));
  j["prune"] = {{"*", {{"max_iterations", 1}, {"power_iteration_tol", 1e-15}}}};
  j["traces"] = {"co_domain_description"};
  std::ofstream(dir_ / "run.json") << j.dump();
  auto o = run("detect --config " + q(dir_ / "run.json"));
  EXPECT_EQ(o.code, 4) << o.output;
  auto manifest = Json::parse(std::ifstream(dir_ / "detect" / "manifest.json"));
  EXPECT_EQ(manifest["runs"][0]["status"], "convergence_error");
}

TEST_F(CliTest, RobustnessWritesTable) {
  Scenario s = sync_groups();
  s.organic.users = 200;
  std::ofstream(dir_ / "scenario.json") << to_json(s).dump();
  auto o = run("robustness --scenario " + q(dir_ / "scenario.json") +
               " --seed 1 --trace synchronized_posting --out " + q(dir_ / "rb"));
  ASSERT_EQ(o.code, 0) << o.output;
  std::ifstream in(dir_ / "rb" / "robustness.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "trace,loss=5%,loss=10%");
  EXPECT_EQ(row.rfind("synchronized_posting,", 0), 0u) << row;
  EXPECT_TRUE(fs::exists(dir_ / "rb" / "robustness.json"));
}

TEST_F(CliTest, AudioClusterLabelsEveryClip) {
  const auto palette = voice_palette();
  fs::create_directories(dir_ / "wav");
  for (std::size_t v = 0; v < 3; ++v) {
    for (int c = 0; c < 8; ++c) {
      std::ofstream out(dir_ / "wav" / ("v" + std::to_string(v) + "_" + std::to_string(c) + ".wav"), std::ios::binary);
      write_wav(out, synthesize_voice(palette[3 * v], 50 * v + c, 3.0), 16000);
    }
  }
  auto o = run("audio-cluster --audio-dir " + q(dir_ / "wav") + " --out " + q(dir_ / "ac"));
  ASSERT_EQ(o.code, 0) << o.output;
  std::ifstream in(dir_ / "ac" / "labels.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "post_id,cluster_label");
  std::map<std::string, std::set<std::string>> by_voice;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto comma = line.find(',');
    by_voice[line.substr(0, 2)].insert(line.substr(comma + 1));
  }
  EXPECT_EQ(rows, 24u);
  std::set<std::string> labels;
  for (const auto& [voice, ls] : by_voice) {
    EXPECT_EQ(ls.size(), 1u) << voice;
    labels.insert(ls.begin(), ls.end());
  }
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_FALSE(labels.count("-1"));
  EXPECT_TRUE(fs::exists(dir_ / "ac" / "k_distance.csv"));
  EXPECT_EQ(run("audio-cluster --audio-dir " + q(dir_ / "nope") + " --out " + q(dir_ / "ac")).code, 3);
}
