#include <gtest/gtest.h>

#include <fstream>

#include "cibnet/synthbench.hpp"

using namespace cibnet;

namespace {

Scenario small_scenario() {
  Scenario s = paper_august();
  s.organic.users = 300;
  return s;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

}  // namespace

TEST(Presets, FilesMatchBuiltins) {
  for (const char* name : {"paper-august", "sync-groups", "organic-only"}) {
    const auto file = read_json(std::string(CIBNET_PRESET_DIR) + "/" + name + ".json");
    EXPECT_EQ(file, to_json(preset(name))) << name;
    EXPECT_EQ(to_json(scenario_from_json(file)), file) << name;
  }
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Presets, PaperAugustCampaignShape) {
  const auto s = paper_august();
  std::map<std::string, std::size_t> sizes;
  for (const auto& c : s.campaigns) sizes[c.name] = c.size;
  EXPECT_EQ(sizes.at("hashtag-68"), 68u);
  EXPECT_EQ(sizes.at("codomain-16"), 16u);
  EXPECT_EQ(sizes.at("speech-42"), 42u);
  EXPECT_EQ(sizes.at("video-67"), 67u);
  EXPECT_EQ(sizes.at("sync-group-4"), 12u);
}

TEST(Scenario, JsonErrorsAreConfigErrors) {
  Json j = to_json(sync_groups());
  j["campaigns"][1]["name"] = "sync-group-1";
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  Json k = to_json(sync_groups());
  k["window"]["days"] = 0;
  EXPECT_THROW(scenario_from_json(k), ConfigError);
  EXPECT_THROW(scenario_from_json(Json::parse("{\"organic\": 3}")), ConfigError);
}

TEST(Generate, DeterministicAcrossThreadCounts) {
  const auto s = small_scenario();
  const auto a = generate(s, 5, 1);
  const auto b = generate(s, 5, 4);
  EXPECT_EQ(a.data.posts, b.data.posts);
  EXPECT_EQ(a.data.comments, b.data.comments);
  EXPECT_EQ(a.data.embeddings, b.data.embeddings);
  EXPECT_EQ(to_json(a.truth), to_json(b.truth));
  const auto c = generate(s, 6, 1);
  EXPECT_NE(a.data.posts, c.data.posts);
}

TEST(Generate, TruthCoversEveryAuthor) {
  const auto s = small_scenario();
  const auto g = generate(s, 2);
  EXPECT_EQ(g.truth.organic.size(), 300u);
  for (const auto& c : s.campaigns) EXPECT_EQ(g.truth.campaigns.at(c.name).size(), c.size) << c.name;
  const auto campaign = g.truth.campaign_accounts();
  std::set<std::string> post_ids;
  for (const auto& p : g.data.posts) {
    EXPECT_TRUE(g.truth.organic.count(p.user_id) || campaign.count(p.user_id)) << p.user_id;
    EXPECT_GE(p.timestamp, s.window_start);
    EXPECT_LT(p.timestamp, s.window_end());
    EXPECT_TRUE(post_ids.insert(p.post_id).second) << p.post_id;
  }
  for (const auto& e : g.data.embeddings) EXPECT_TRUE(post_ids.count(e.post_id)) << e.post_id;
  EXPECT_TRUE(std::is_sorted(g.data.posts.begin(), g.data.posts.end(),
                             [](const PostRecord& a, const PostRecord& b) { return a.timestamp < b.timestamp; }));
}

TEST(Generate, GroundTruthJsonRoundTrip) {
  const auto g = generate(sync_groups(), 1);
  EXPECT_EQ(to_json(ground_truth_from_json(to_json(g.truth))), to_json(g.truth));
  EXPECT_THROW(ground_truth_from_json(Json::object()), DataError);
}

TEST(DropPosts, KeepsExactRoundedCountInOrder) {
  std::vector<PostRecord> posts(1001);
  for (std::size_t i = 0; i < posts.size(); ++i) {
    posts[i].post_id = "p" + std::to_string(i);
    posts[i].timestamp = static_cast<std::int64_t>(i);
  }
  for (double f : {0.0, 0.05, 0.1, 0.5, 0.999}) {
    auto kept = drop_posts(posts, f, 3);
    EXPECT_EQ(kept.size(), static_cast<std::size_t>(std::llround((1.0 - f) * 1001))) << f;
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end(),
                               [](const PostRecord& a, const PostRecord& b) { return a.timestamp < b.timestamp; }));
  }
  EXPECT_EQ(drop_posts(posts, 0.1, 3), drop_posts(posts, 0.1, 3));
  EXPECT_NE(drop_posts(posts, 0.1, 3), drop_posts(posts, 0.1, 4));
  EXPECT_THROW(drop_posts(posts, 1.0, 1), ConfigError);
  EXPECT_THROW(drop_posts(posts, -0.1, 1), ConfigError);
}

TEST(DropPosts, RestrictKeepsOnlySurvivingEmbeddings) {
  const auto g = generate(small_scenario(), 3);
  auto d = restrict_to_posts(g.data, drop_posts(g.data.posts, 0.5, 9));
  std::set<std::string> ids;
  for (const auto& p : d.posts) ids.insert(p.post_id);
  for (const auto& e : d.embeddings) EXPECT_TRUE(ids.count(e.post_id));
  EXPECT_LT(d.embeddings.size(), g.data.embeddings.size());
}

TEST(Scoring, RetentionAndEvaluate) {
  EXPECT_DOUBLE_EQ(retention({"a", "b", "c", "d"}, {"a", "c", "z"}), 0.5);
  EXPECT_THROW(retention({}, {"a"}), ContractViolation);

  GroundTruth t;
  t.campaigns["c1"] = {"a", "b", "c"};
  t.campaigns["c2"] = {"d"};
  t.organic = {"x", "y"};
  auto r = evaluate({"a", "b", "x"}, t);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_NEAR(r.f1, 2 * (2.0 / 3.0) * 0.5 / (2.0 / 3.0 + 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(r.campaign_recall.at("c1"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.campaign_recall.at("c2"), 0.0);
  auto none = evaluate({}, t);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.f1, 0.0);
}
