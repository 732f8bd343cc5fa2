// Plant a hashtag campaign in a synthetic corpus, then find it again.

#include <iostream>

#include "cibnet/cibnet.hpp"

int main() {
  using namespace cibnet;

  const auto gen = generate(paper_august(), /*seed=*/7);
  std::cout << gen.data.posts.size() << " posts from " << gen.truth.organic.size() << " organic users\n";

  const auto result = run_trace(gen.data, default_run_config(TraceKind::HashtagSequence), "2024-08");
  std::cout << "network: " << result.network.node_count() << " users, " << result.network.edge_count() << " edges\n";

  std::vector<ClusterReport> reports;
  for (std::size_t i = 0; i < result.clusters.size(); ++i) {
    reports.push_back(cluster_report(result.clusters[i], i, gen.data.posts));
  }
  write_report_table(std::cout, reports);

  const auto score = evaluate(result.detected(), gen.truth);
  std::cout << "precision " << score.precision << ", hashtag campaign recall "
            << score.campaign_recall.at("hashtag-68") << '\n';
}
