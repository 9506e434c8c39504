// vsum: train and evaluate a reinforcement-learning frame-selection agent
// for diagnostic video summarization.
//
// Subcommands: synth, segment, train, summarize, evaluate, plot.
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsum/datamodel.hpp"
#include "vsum/evaluation.hpp"
#include "vsum/features.hpp"
#include "vsum/scorer.hpp"
#include "vsum/segmentation.hpp"
#include "vsum/summarizer.hpp"
#include "vsum/trainer.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string json_scalar(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return value.dump();
}

// Fills options the command line left unset from a flat JSON object whose
// keys mirror the long flag names. Precedence: flag > config > default.
void merge_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  json parsed;
  try {
    in >> parsed;
  } catch (const json::exception& e) {
    throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!parsed.is_object()) {
    throw CLI::FileError("config must be a JSON object");
  }
  for (const auto& [key, value] : parsed.items()) {
    if (key == "config") continue;
    CLI::Option* option = cmd->get_option_no_throw("--" + key);
    if (option == nullptr) {
      throw CLI::ValidationError("--config", "unknown key '" + key + "'");
    }
    if (option->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& element : value) option->add_result(json_scalar(element));
    } else {
      option->add_result(json_scalar(value));
    }
    option->run_callback();
  }
}

// required-after-config: flags may also arrive via the config file
void require_present(const CLI::App* cmd,
                     std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (cmd->get_option(name)->count() == 0) {
      throw CLI::RequiredError(name);
    }
  }
}

vsum::RewardFlags parse_reward_flags(const std::string& spec) {
  vsum::RewardFlags flags{false, false, false};
  if (spec == "none" || spec.empty()) return flags;
  std::string token;
  std::stringstream stream(spec);
  while (std::getline(stream, token, ',')) {
    if (token == "rep") {
      flags.rep = true;
    } else if (token == "div") {
      flags.div = true;
    } else if (token == "det") {
      flags.det = true;
    } else {
      throw CLI::ValidationError(
          "--rewards", "unknown reward term '" + token +
                           "' (expected a comma list of rep,div,det or none)");
    }
  }
  return flags;
}

vsum::TrainMode parse_mode(const std::string& mode) {
  if (mode == "sup" || mode == "supervised") return vsum::TrainMode::supervised;
  if (mode == "unsup" || mode == "unsupervised") {
    return vsum::TrainMode::unsupervised;
  }
  throw CLI::ValidationError("--mode", "expected sup or unsup");
}

void add_train_config_options(CLI::App* cmd, vsum::TrainConfig& config,
                              std::string& mode, std::string& rewards) {
  cmd->add_option("--mode", mode, "Training mode: sup or unsup");
  cmd->add_option("--episodes", config.episodes,
                  "Policy-gradient rollouts per step");
  cmd->add_option("--epochs", config.epochs, "Training epochs");
  cmd->add_option("--lr", config.lr, "Initial learning rate");
  cmd->add_option("--lr-decay-factor", config.lr_decay_factor,
                  "Learning-rate decay factor");
  cmd->add_option("--lr-decay-every", config.lr_decay_every,
                  "Epochs between learning-rate decays");
  cmd->add_option("--momentum", config.momentum, "SGD momentum");
  cmd->add_option("--weight-decay", config.weight_decay, "L2 weight decay");
  cmd->add_option("--epsilon", config.epsilon,
                  "Target mean selection probability");
  cmd->add_option("--beta", config.beta, "Regularization weight");
  cmd->add_option("--gamma", config.gamma, "Reward weight");
  cmd->add_option("--budget", config.budget, "Summary budget fraction");
  cmd->add_option("--hidden-size", config.hidden_size, "LSTM hidden size");
  cmd->add_option("--seed", config.seed, "Random seed");
  cmd->add_option("--rewards", rewards,
                  "Active reward terms, e.g. rep,div,det");
}

void add_kts_options(CLI::App* cmd, vsum::KtsConfig& kts) {
  cmd->add_option("--max-segments", kts.max_segments,
                  "Maximum shot count (0 = auto)");
  cmd->add_option("--penalty", kts.penalty_weight,
                  "Segment-count penalty weight");
}

void add_config_option(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path, "JSON config file mirroring flag names");
}

json summary_to_json(const vsum::VideoRecord& video,
                     const vsum::ShotSegmentation& seg,
                     const vsum::SummaryResult& summary,
                     const vsum::ImportanceScores& probs, double budget) {
  json shots = json::array();
  for (int id : summary.selected_shots) {
    shots.push_back({seg.shots[id].start, seg.shots[id].end});
  }
  json segments = json::array();
  for (const auto& shot : seg.shots) {
    segments.push_back({shot.start, shot.end});
  }
  json out = {
      {"video_id", video.id()},     {"budget", budget},
      {"shots", shots},             {"frame_scores", probs.probs},
      {"used_frames", summary.used_frames},
      {"segments", segments},
  };
  if (video.ground_truth) {
    const auto gt_mask =
        vsum::keyframes_to_scores(seg, video.ground_truth->keyframes);
    out["gt_mask"] = gt_mask;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << contents;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

// ---------------------------------------------------------------------------
// subcommand bodies

struct SynthArgs {
  vsum::SyntheticSpec spec;
  std::vector<int> frames = {400, 600};
  std::vector<int> segment_len = {20, 60};
  std::string out;
  std::string config;
};

void run_synth(SynthArgs& args) {
  args.spec.frames_range = {args.frames[0], args.frames[1]};
  args.spec.segment_len_range = {args.segment_len[0], args.segment_len[1]};
  const vsum::Dataset data = vsum::generate_synthetic(args.spec);
  vsum::save_dataset(data, args.out);
  std::cout << "wrote " << data.size() << " videos to " << args.out << "\n";
}

struct SegmentArgs {
  std::string dataset;
  std::string out;
  std::string config;
  vsum::KtsConfig kts;
};

void run_segment(SegmentArgs& args) {
  const vsum::Dataset data = vsum::load_dataset(args.dataset);
  json videos = json::array();
  for (const auto& video : data) {
    const auto seg = vsum::kts_segment(video.features, args.kts);
    json boundaries = json::array();
    for (const auto& shot : seg.shots) {
      boundaries.push_back({shot.start, shot.end});
    }
    videos.push_back({{"id", video.id()}, {"boundaries", boundaries}});
  }
  write_text(args.out, json{{"videos", videos}}.dump(2) + "\n");
  std::cout << "segmented " << data.size() << " videos into " << args.out
            << "\n";
}

struct TrainArgs {
  std::string dataset;
  std::string out;
  std::string log;
  std::string mode;
  std::string rewards = "rep,div,det";
  std::string config_file;
  vsum::TrainConfig config;
  vsum::KtsConfig kts;
};

void run_train(TrainArgs& args) {
  args.config.mode = parse_mode(args.mode);
  args.config.reward_flags = parse_reward_flags(args.rewards);
  const vsum::Dataset data = vsum::load_dataset(args.dataset);

  const fs::path log_path =
      args.log.empty() ? fs::path(args.out + ".log.jsonl") : fs::path(args.log);
  std::ofstream(log_path, std::ios::trunc);  // fresh log per run

  const auto t0 = std::chrono::steady_clock::now();
  const auto [state, reports] = vsum::train(
      data, args.config, args.kts, [&](const vsum::EpochReport& report) {
        vsum::append_training_log(log_path, {&report, 1});
        if ((report.epoch + 1) % 25 == 0 ||
            report.epoch + 1 == args.config.epochs) {
          std::cerr << "epoch " << report.epoch + 1 << "/"
                    << args.config.epochs
                    << "  reward=" << report.mean_reward
                    << "  lr=" << report.lr << "\n";
        }
      });
  const auto seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  vsum::save_checkpoint(args.out, state.params, args.config);
  std::cout << "trained " << args.config.epochs << " epochs on "
            << data.size() << " videos";
  if (!reports.empty()) {
    std::cout << ", final mean reward " << reports.back().mean_reward;
  }
  std::cout << "; checkpoint " << args.out << " (" << std::fixed
            << std::setprecision(1) << seconds << "s)\n";
}

struct SummarizeArgs {
  std::string dataset;
  std::string checkpoint;
  std::string out;
  std::string config;
  double budget = -1.0;  // <0: use the budget recorded in the checkpoint
  vsum::KtsConfig kts;
};

void run_summarize(SummarizeArgs& args) {
  const vsum::Dataset data = vsum::load_dataset(args.dataset);
  const auto [params, config] = vsum::load_checkpoint(args.checkpoint);
  const double budget = args.budget < 0.0 ? config.budget : args.budget;

  fs::create_directories(args.out);
  for (const auto& video : data) {
    const auto seg = vsum::kts_segment(video.features, args.kts);
    const auto probs = vsum::score_frames(params, video.features);
    const auto scores = vsum::shot_scores(seg, probs);
    const auto summary = vsum::select_shots(seg, scores, budget);
    const json out = summary_to_json(video, seg, summary, probs, budget);
    write_text(fs::path(args.out) / (video.id() + ".summary.json"),
               out.dump(2) + "\n");
  }
  std::cout << "summarized " << data.size() << " videos at budget " << budget
            << " into " << args.out << "\n";
}

struct EvaluateArgs {
  std::string dataset;
  std::string out;
  std::string mode;
  std::string rewards = "rep,div,det";
  std::string config_file;
  vsum::TrainConfig config;
  vsum::KtsConfig kts;
  vsum::SplitPlan plan;
  std::vector<double> budgets;
};

void run_evaluate(EvaluateArgs& args) {
  args.config.mode = parse_mode(args.mode);
  const vsum::RewardFlags flags = parse_reward_flags(args.rewards);
  if (args.budgets.empty()) args.budgets = {args.config.budget};
  args.plan.seed = args.config.seed;
  const vsum::Dataset data = vsum::load_dataset(args.dataset);

  const vsum::EvalReport report = vsum::run_experiment(
      data, args.config, args.kts, args.plan, args.budgets, flags);

  fs::create_directories(args.out);
  vsum::write_csv(fs::path(args.out) / "results.csv", report);
  vsum::write_summary_json(fs::path(args.out) / "summary.json", report);
  std::cout << "evaluated " << args.plan.n_splits << " splits; grand mean F1 "
            << report.grand_mean_f1() << "; reports in " << args.out << "\n";
}

struct PlotArgs {
  std::string summaries;
  std::vector<std::string> reports;
  std::string out;
  std::string config;
};

void run_plot(PlotArgs& args) {
  fs::create_directories(args.out);

  std::vector<fs::path> summary_files;
  for (const auto& entry : fs::directory_iterator(args.summaries)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 13 &&
        name.substr(name.size() - 13) == ".summary.json") {
      summary_files.push_back(entry.path());
    }
  }
  std::sort(summary_files.begin(), summary_files.end());
  if (summary_files.empty()) {
    throw std::runtime_error("no *.summary.json files under " +
                             args.summaries);
  }

  int curves = 0;
  for (const auto& file : summary_files) {
    std::ifstream in(file);
    json summary;
    in >> summary;
    const std::string id = summary.at("video_id").get<std::string>();
    const auto scores = summary.at("frame_scores").get<std::vector<double>>();
    std::vector<std::uint8_t> gt_mask;
    if (summary.contains("gt_mask")) {
      gt_mask = summary.at("gt_mask").get<std::vector<std::uint8_t>>();
    }
    std::vector<std::pair<int, int>> selected;
    for (const auto& shot : summary.at("shots")) {
      selected.emplace_back(shot.at(0).get<int>(), shot.at(1).get<int>());
    }
    write_text(fs::path(args.out) / (id + ".scores.svg"),
               vsum::svg::score_curve("frame scores: " + id, scores, gt_mask,
                                      selected));
    ++curves;
  }

  std::vector<double> budgets;
  std::vector<vsum::svg::Series> series;
  for (const auto& report_path : args.reports) {
    std::ifstream in(report_path);
    if (!in) {
      throw std::runtime_error("missing report: " + report_path);
    }
    json report;
    in >> report;
    vsum::svg::Series s;
    s.label = report.at("rewards").get<std::string>();
    std::vector<double> these_budgets;
    for (const auto& row : report.at("by_budget")) {
      these_budgets.push_back(row.at("budget").get<double>());
      s.values.push_back(row.at("f1").get<double>());
    }
    if (budgets.empty()) {
      budgets = these_budgets;
    } else if (budgets != these_budgets) {
      throw std::runtime_error("reports disagree on the budget grid");
    }
    series.push_back(std::move(s));
  }
  write_text(fs::path(args.out) / "f1_vs_budget.svg",
             vsum::svg::budget_bars("mean F1 vs summary budget", budgets,
                                    series));

  std::cout << "wrote " << curves << " score curves and 1 bar chart to "
            << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagnostic video summarization via RL frame selection"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_config_option(synth, synth_args.config);
  synth->add_option("--out", synth_args.out, "Output dataset directory");
  synth->add_option("--n-videos", synth_args.spec.n_videos, "Video count");
  synth->add_option("--frames", synth_args.frames,
                    "Frame-count range: MIN MAX")
      ->expected(2);
  synth->add_option("--segment-len", synth_args.segment_len,
                    "Segment-length range: MIN MAX")
      ->expected(2);
  synth->add_option("--dim", synth_args.spec.dim, "Feature dimension");
  synth->add_option("--classes", synth_args.spec.n_plane_classes,
                    "Number of plane classes");
  synth->add_option("--plane-fraction", synth_args.spec.plane_fraction,
                    "Per-segment plane probability");
  synth->add_option("--noise-sigma", synth_args.spec.noise_sigma,
                    "Feature noise sigma");
  synth->add_option("--drift-sigma", synth_args.spec.drift_sigma,
                    "Random-walk step sigma");
  synth->add_option("--label-noise", synth_args.spec.label_noise,
                    "Detection-score corruption");
  synth->add_option("--seed", synth_args.spec.seed, "Random seed");
  synth->callback([&] {
    merge_config(synth, synth_args.config);
    require_present(synth, {"--out", "--n-videos"});
    run_synth(synth_args);
  });

  SegmentArgs segment_args;
  auto* segment =
      app.add_subcommand("segment", "Shot boundaries via kernel temporal "
                                    "segmentation, emitted as JSON");
  add_config_option(segment, segment_args.config);
  segment->add_option("--dataset", segment_args.dataset, "Dataset directory");
  segment->add_option("--out", segment_args.out, "Output JSON file");
  add_kts_options(segment, segment_args.kts);
  segment->callback([&] {
    merge_config(segment, segment_args.config);
    require_present(segment, {"--dataset", "--out"});
    run_segment(segment_args);
  });

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the frame scorer");
  add_config_option(train, train_args.config_file);
  train->add_option("--dataset", train_args.dataset, "Dataset directory");
  train->add_option("--out", train_args.out, "Checkpoint output path");
  train->add_option("--log", train_args.log,
                    "Training log path (default: <out>.log.jsonl)");
  add_train_config_options(train, train_args.config, train_args.mode,
                           train_args.rewards);
  add_kts_options(train, train_args.kts);
  train->callback([&] {
    merge_config(train, train_args.config_file);
    require_present(train, {"--dataset", "--out", "--mode"});
    run_train(train_args);
  });

  SummarizeArgs summarize_args;
  auto* summarize =
      app.add_subcommand("summarize", "Emit summary JSON per video");
  add_config_option(summarize, summarize_args.config);
  summarize->add_option("--dataset", summarize_args.dataset,
                        "Dataset directory");
  summarize->add_option("--checkpoint", summarize_args.checkpoint,
                        "Trained checkpoint");
  summarize->add_option("--out", summarize_args.out, "Output directory");
  summarize->add_option("--budget", summarize_args.budget,
                        "Budget fraction (default: from checkpoint)");
  add_kts_options(summarize, summarize_args.kts);
  summarize->callback([&] {
    merge_config(summarize, summarize_args.config);
    require_present(summarize, {"--dataset", "--checkpoint", "--out"});
    run_summarize(summarize_args);
  });

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Repeated-split experiment: train, summarize, score");
  add_config_option(evaluate, evaluate_args.config_file);
  evaluate->add_option("--dataset", evaluate_args.dataset,
                       "Dataset directory");
  evaluate->add_option("--out", evaluate_args.out, "Output directory");
  add_train_config_options(evaluate, evaluate_args.config, evaluate_args.mode,
                           evaluate_args.rewards);
  add_kts_options(evaluate, evaluate_args.kts);
  evaluate->add_option("--splits", evaluate_args.plan.n_splits,
                       "Number of train/test splits");
  evaluate->add_option("--train-fraction", evaluate_args.plan.train_fraction,
                       "Training fraction per split");
  evaluate->add_option("--budgets", evaluate_args.budgets,
                       "Budgets to sweep (default: --budget)");
  evaluate->callback([&] {
    merge_config(evaluate, evaluate_args.config_file);
    require_present(evaluate, {"--dataset", "--out", "--mode"});
    run_evaluate(evaluate_args);
  });

  PlotArgs plot_args;
  auto* plot = app.add_subcommand(
      "plot", "Score-curve and F1-vs-budget figures from existing outputs");
  add_config_option(plot, plot_args.config);
  plot->add_option("--summaries", plot_args.summaries,
                   "Directory of *.summary.json files");
  plot->add_option("--report", plot_args.reports,
                   "summary.json report(s) from evaluate");
  plot->add_option("--out", plot_args.out, "Output directory");
  plot->callback([&] {
    merge_config(plot, plot_args.config);
    require_present(plot, {"--summaries", "--report", "--out"});
    run_plot(plot_args);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "vsum: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
