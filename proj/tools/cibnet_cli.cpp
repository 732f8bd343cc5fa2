// cibnet: batch front end for coordinated-behavior detection.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 non-convergence.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "cibnet/cibnet.hpp"

namespace fs = std::filesystem;
using namespace cibnet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cibnet");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("CIBNET_LOG_LEVEL")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for explicitly.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

struct Common {
  std::string config;
  std::string window;
  std::vector<std::string> traces;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t threads = 0;
  std::string strategy;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "Run configuration (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--window", c.window, "Only run this window label");
  cmd->add_option("--trace", c.traces, "Trace to run (repeatable); default all");
  cmd->add_option("--out", c.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", c.threads, "Worker threads; 0 uses every core");
  cmd->add_option("--strategy", c.strategy, "Pruning strategy for every trace")->check(CLI::IsMember({"node", "edge+node"}));
}

RunConfig resolve_config(const Common& c) {
  auto cfg = load_run_config(c.config);
  if (!c.out.empty()) cfg.out = c.out;
  if (c.seed_set) cfg.seed = c.seed;
  if (c.threads != 0) cfg.threads = c.threads;
  return cfg;
}

DetectOptions detect_options(const Common& c) {
  DetectOptions o;
  if (!c.window.empty()) o.window = c.window;
  for (const auto& t : c.traces) o.traces.push_back(parse_trace_kind(t));
  if (!c.strategy.empty()) o.strategy = parse_prune_strategy(c.strategy);
  return o;
}

void log_ledger(const LoadedInputs& in) {
  for (const auto& [file, e] : in.ledger) {
    if (e.line) spdlog::warn("{}:{}: {}", file, e.line, e.message);
    else spdlog::warn("{}: {}", file, e.message);
  }
}

/// Loads inputs and runs detection; returns nullopt on the "no data" path.
std::optional<DetectSummary> detect(const RunConfig& cfg, const DetectOptions& opts) {
  const auto inputs = load_inputs(cfg.inputs);
  log_ledger(inputs);
  if (inputs.data.posts.empty()) {
    spdlog::warn("no data: '{}' holds no posts; nothing written", cfg.inputs.posts.string());
    return std::nullopt;
  }
  spdlog::info("loaded {} posts, {} comments, {} embeddings", inputs.data.posts.size(), inputs.data.comments.size(),
               inputs.data.embeddings.size());
  auto summary = run_detect(cfg, inputs.data, opts);
  for (const auto& r : summary.runs) {
    if (r.status != "ok") {
      spdlog::error("{} / {}: {}", r.window, to_string(r.trace), r.message);
      continue;
    }
    spdlog::info("{} / {}: {} nodes, {} edges, {} kept, {} clusters", r.window, to_string(r.trace), r.nodes, r.edges,
                 r.pruned_nodes, r.clusters.size());
  }
  return summary;
}

int finish(const DetectSummary& s) {
  if (s.any_failed()) {
    spdlog::error("some traces did not converge; see manifest.json");
    return kExitConvergence;
  }
  return 0;
}

Scenario load_scenario(const std::string& preset_name, const std::string& scenario_path) {
  if (!scenario_path.empty()) {
    std::ifstream in(scenario_path);
    if (!in) throw ConfigError("cannot open scenario '" + scenario_path + "'");
    try {
      return scenario_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
      throw ConfigError("scenario '" + scenario_path + "' is not valid JSON: " + e.what());
    }
  }
  return preset(preset_name);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

std::string percent_label(double f) {
  std::ostringstream s;
  s << "loss=" << f * 100.0 << '%';
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Coordinated inauthentic behavior detection over behavioral-trace similarity networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common common;

  auto* ingest = app.add_subcommand("ingest-check", "Parse inputs and print the error ledger");
  add_common(ingest, common, false);
  std::string posts_path, comments_path, embeddings_path;
  ingest->add_option("--posts", posts_path, "Posts JSON-lines");
  ingest->add_option("--comments", comments_path, "Comments JSON-lines");
  ingest->add_option("--embeddings", embeddings_path, "Embeddings JSON-lines");

  auto* detect_cmd = app.add_subcommand("detect", "Build, prune and cluster every (window, trace) network");
  add_common(detect_cmd, common, true);
  auto* seed_opt = detect_cmd->add_option("--seed", common.seed, "Seed recorded in the manifest");

  auto* report_cmd = app.add_subcommand("report", "Run detection and print the per-cluster evidence table");
  add_common(report_cmd, common, true);

  std::string preset_name = "paper-august", scenario_path, truth_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted campaigns");
  synth->add_option("--preset", preset_name, "paper-august, sync-groups or organic-only");
  synth->add_option("--scenario", scenario_path, "Scenario JSON (overrides --preset)");
  auto* synth_seed = synth->add_option("--seed", common.seed, "Generator seed");
  synth->add_option("--out", common.out, "Output directory")->required();
  synth->add_option("--threads", common.threads, "Worker threads; 0 uses every core");

  auto* eval = app.add_subcommand("eval", "Run detection and score it against ground truth");
  add_common(eval, common, true);
  eval->add_option("--truth", truth_path, "Ground truth JSON written by synth")->required();

  std::vector<double> fractions = {0.05, 0.10};
  std::vector<std::uint64_t> seeds;
  auto* robust = app.add_subcommand("robustness", "Detection retention under random post loss");
  robust->add_option("--preset", preset_name, "Scenario preset");
  robust->add_option("--scenario", scenario_path, "Scenario JSON (overrides --preset)");
  robust->add_option("--seed", seeds, "Seeds (repeatable); default 1..10");
  robust->add_option("--fraction", fractions, "Loss fractions (repeatable); default 0.05 0.10");
  robust->add_option("--trace", common.traces, "Trace to evaluate (repeatable)");
  robust->add_option("--out", common.out, "Output directory");
  robust->add_option("--threads", common.threads, "Worker threads; 0 uses every core");

  std::string audio_dir, metric = "euclidean";
  std::size_t min_pts = 5;
  double eps = -1.0;
  auto* audio = app.add_subcommand("audio-cluster", "Cluster WAV voiceovers by mel-spectrogram voiceprint");
  audio->add_option("--config", common.config, "Run configuration providing audio_dir");
  audio->add_option("--audio-dir", audio_dir, "Directory of .wav files (overrides the config)");
  audio->add_option("--min-pts", min_pts, "DBSCAN min_pts");
  audio->add_option("--eps", eps, "DBSCAN radius; negative picks the k-distance elbow");
  audio->add_option("--metric", metric, "euclidean or cosine")->check(CLI::IsMember({"euclidean", "cosine"}));
  audio->add_option("--out", common.out, "Output directory")->required();
  audio->add_option("--threads", common.threads, "Worker threads; 0 uses every core");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  common.seed_set = seed_opt->count() > 0 || synth_seed->count() > 0;

  try {
    if (*ingest) {
      InputPaths paths;
      if (!common.config.empty()) paths = load_run_config(common.config).inputs;
      if (!posts_path.empty()) paths.posts = posts_path;
      if (!comments_path.empty()) paths.comments = comments_path;
      if (!embeddings_path.empty()) paths.embeddings = embeddings_path;
      if (paths.posts.empty()) throw ConfigError("ingest-check needs --posts or --config");
      const auto in = load_inputs(paths);
      std::cout << "posts " << in.data.posts.size() << "\ncomments " << in.data.comments.size() << "\nembeddings "
                << in.data.embeddings.size() << "\nledger " << in.ledger.size() << '\n';
      for (const auto& [file, e] : in.ledger) std::cout << file << ':' << e.line << ": " << e.message << '\n';
      return 0;
    }

    if (*detect_cmd || *report_cmd) {
      const auto cfg = resolve_config(common);
      const auto summary = detect(cfg, detect_options(common));
      if (!summary) return 0;
      if (*report_cmd) {
        for (const auto& r : summary->runs) {
          std::cout << "== " << r.window << " / " << to_string(r.trace) << " (" << r.status << ")\n";
          write_report_table(std::cout, r.reports);
        }
      }
      spdlog::info("artifacts in {}", cfg.out.string());
      return finish(*summary);
    }

    if (*synth) {
      const auto scenario = load_scenario(preset_name, scenario_path);
      const auto gen = generate(scenario, common.seed, common.threads);
      const fs::path out(common.out);
      fs::create_directories(out);
      std::ostringstream posts, comments, embeddings;
      write_posts(posts, gen.data.posts);
      write_comments(comments, gen.data.comments);
      write_embeddings(embeddings, gen.data.embeddings);
      write_file(out / "posts.jsonl", posts.str());
      write_file(out / "comments.jsonl", comments.str());
      write_file(out / "embeddings.jsonl", embeddings.str());
      write_file(out / "truth.json", to_json(gen.truth).dump(2) + "\n");
      write_file(out / "scenario.json", to_json(scenario).dump(2) + "\n");
      const Json run = {{"posts", "posts.jsonl"},
                        {"comments", "comments.jsonl"},
                        {"embeddings", "embeddings.jsonl"},
                        {"windows",
                         {{{"label", scenario.window_label},
                           {"start", scenario.window_start},
                           {"end", scenario.window_start + scenario.window_days * 86400}}}},
                        {"out", "detect"},
                        {"seed", common.seed}};
      write_file(out / "run.json", run.dump(2) + "\n");
      spdlog::info("wrote {} posts for {} campaigns to {}", gen.data.posts.size(), gen.truth.campaigns.size(),
                   out.string());
      return 0;
    }

    if (*eval) {
      const auto cfg = resolve_config(common);
      std::ifstream tin(truth_path);
      if (!tin) throw DataError("missing ground truth '" + truth_path + "'");
      Json tj;
      try {
        tj = Json::parse(tin);
      } catch (const Json::parse_error& e) {
        throw DataError(std::string("ground truth is not valid JSON: ") + e.what());
      }
      const auto truth = ground_truth_from_json(tj);
      const auto summary = detect(cfg, detect_options(common));
      if (!summary) return 0;
      std::set<TraceKind> kinds;
      for (const auto& r : summary->runs) kinds.insert(r.trace);
      Json result = Json::object();
      std::cout << std::left << std::setw(24) << "trace" << std::setw(11) << "precision" << "recall\n";
      for (auto kind : kinds) {
        const auto ev = evaluate(summary->detected(kind), truth);
        result[std::string(to_string(kind))] = to_json(ev);
        std::cout << std::left << std::setw(24) << to_string(kind) << std::setw(11) << std::setprecision(4)
                  << ev.precision << ev.recall << '\n';
      }
      fs::create_directories(cfg.out);
      write_file(cfg.out / "eval.json", result.dump(2) + "\n");
      return finish(*summary);
    }

    if (*robust) {
      const auto scenario = load_scenario(preset_name, scenario_path);
      RobustnessConfig rc;
      rc.loss_fractions = fractions;
      if (!seeds.empty()) rc.seeds = seeds;
      if (!common.traces.empty()) {
        rc.traces.clear();
        for (const auto& t : common.traces) rc.traces.push_back(parse_trace_kind(t));
      }
      rc.threads = common.threads;
      const auto rows = robustness(scenario, rc);
      std::ostringstream csv;
      csv << "trace";
      for (double f : fractions) csv << ',' << percent_label(f);
      csv << '\n';
      Json j = Json::array();
      for (const auto& row : rows) {
        csv << to_string(row.trace);
        Json cells = Json::array();
        for (std::size_t f = 0; f < row.cells.size(); ++f) {
          csv << ',' << detail::format_double(row.cells[f].mean);
          cells.push_back({{"fraction", fractions[f]},
                           {"mean", row.cells[f].mean},
                           {"per_seed", row.cells[f].per_seed},
                           {"skipped_seeds", row.cells[f].skipped}});
        }
        csv << '\n';
        j.push_back({{"trace", to_string(row.trace)}, {"cells", std::move(cells)}});
      }
      std::cout << csv.str();
      if (!common.out.empty()) {
        fs::create_directories(common.out);
        write_file(fs::path(common.out) / "robustness.csv", csv.str());
        write_file(fs::path(common.out) / "robustness.json", j.dump(2) + "\n");
      }
      return 0;
    }

    if (*audio) {
      fs::path dir = audio_dir;
      if (dir.empty() && !common.config.empty()) dir = load_run_config(common.config).inputs.audio_dir;
      if (dir.empty()) throw ConfigError("audio-cluster needs --audio-dir or a config with audio_dir");
      if (!fs::is_directory(dir)) throw DataError("missing audio directory '" + dir.string() + "'");
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DataError("no .wav files in '" + dir.string() + "'");
      const MelParams mel;
      std::vector<std::vector<double>> prints(files.size());
      detail::parallel_chunks(files.size(), detail::resolve_threads(common.threads),
                              [&](std::size_t, std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i) {
                                  auto wav = read_wav_file(files[i].string());
                                  auto samples = wav.sample_rate == mel.sample_rate
                                                     ? std::move(wav.samples)
                                                     : resample_linear(wav.samples, wav.sample_rate, mel.sample_rate);
                                  prints[i] = voiceprint(mel_spectrogram(samples, mel));
                                }
                              });
      VoiceClusterOptions vo;
      vo.min_pts = min_pts;
      vo.eps = eps;
      vo.metric = metric == "cosine" ? Metric::Cosine : Metric::Euclidean;
      vo.threads = common.threads;
      const auto result = cluster_voiceprints(prints, vo);
      const fs::path out(common.out);
      fs::create_directories(out);
      std::ostringstream labels, kdist;
      labels << "post_id,cluster_label\n";
      for (std::size_t i = 0; i < files.size(); ++i) labels << files[i].stem().string() << ',' << result.labels[i] << '\n';
      write_file(out / "labels.csv", labels.str());
      if (!result.k_distances.empty()) {
        write_k_distance_csv(kdist, result.k_distances);
        write_file(out / "k_distance.csv", kdist.str());
      }
      spdlog::info("{} clips, eps {}, {} clusters", files.size(), result.eps, result.cluster_count());
      return 0;
    }
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    spdlog::error("{}", e.what());
    return kExitConvergence;
  } catch (const DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  }
  return 0;
}
