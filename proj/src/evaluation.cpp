#include "vsum/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "vsum/rng.hpp"
#include "vsum/summarizer.hpp"
#include "vsum/trainer.hpp"

namespace vsum {

namespace {

constexpr std::uint64_t kSplitSalt = 0x73706c69;  // "spli"
constexpr std::uint64_t kTrainSalt = 0x7472616e;  // "tran"

}  // namespace

PrecisionRecallF1 precision_recall_f1(
    std::span<const std::uint8_t> gt_mask,
    std::span<const std::uint8_t> pred_mask) {
  if (gt_mask.size() != pred_mask.size()) {
    throw std::invalid_argument("mask lengths differ");
  }
  std::size_t overlap = 0, gt_count = 0, pred_count = 0;
  for (std::size_t t = 0; t < gt_mask.size(); ++t) {
    gt_count += gt_mask[t] != 0;
    pred_count += pred_mask[t] != 0;
    overlap += gt_mask[t] != 0 && pred_mask[t] != 0;
  }
  PrecisionRecallF1 out;
  out.precision = pred_count > 0
                      ? static_cast<double>(overlap) / pred_count
                      : 0.0;
  out.recall = gt_count > 0 ? static_cast<double>(overlap) / gt_count : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
make_splits(const std::vector<std::string>& video_ids, const SplitPlan& plan) {
  const int n = static_cast<int>(video_ids.size());
  if (n < 2) {
    throw std::invalid_argument("need at least 2 videos to split");
  }
  if (plan.n_splits < 1 ||
      !(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw std::invalid_argument("invalid split plan");
  }
  const int n_train = std::clamp(
      static_cast<int>(std::llround(plan.train_fraction * n)), 1, n - 1);

  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
      splits;
  splits.reserve(plan.n_splits);
  for (int s = 0; s < plan.n_splits; ++s) {
    std::vector<std::string> ids = video_ids;
    Rng rng(mix_seed(plan.seed, kSplitSalt, static_cast<std::uint64_t>(s)));
    std::shuffle(ids.begin(), ids.end(), rng);
    splits.emplace_back(
        std::vector<std::string>(ids.begin(), ids.begin() + n_train),
        std::vector<std::string>(ids.begin() + n_train, ids.end()));
  }
  return splits;
}

PrecisionRecallF1 EvalReport::split_mean(int split, double budget) const {
  PrecisionRecallF1 mean;
  int count = 0;
  for (const auto& row : rows) {
    if (row.split != split || row.budget != budget) continue;
    mean.precision += row.prf.precision;
    mean.recall += row.prf.recall;
    mean.f1 += row.prf.f1;
    ++count;
  }
  if (count > 0) {
    mean.precision /= count;
    mean.recall /= count;
    mean.f1 /= count;
  }
  return mean;
}

double EvalReport::mean_f1(double budget) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& row : rows) {
    if (row.budget != budget) continue;
    sum += row.prf.f1;
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

double EvalReport::grand_mean_f1() const {
  double sum = 0.0;
  for (const auto& row : rows) sum += row.prf.f1;
  return rows.empty() ? 0.0 : sum / rows.size();
}

EvalReport run_experiment(const Dataset& videos, const TrainConfig& config,
                          const KtsConfig& kts_config, const SplitPlan& plan,
                          std::span<const double> budgets,
                          const RewardFlags& flags) {
  if (config.mode == TrainMode::unsupervised && !flags.any()) {
    throw std::invalid_argument(
        "unsupervised training with no reward terms has no objective");
  }
  if (budgets.empty()) {
    throw std::invalid_argument("at least one budget required");
  }
  std::map<std::string, const VideoRecord*> by_id;
  std::vector<std::string> ids;
  for (const auto& v : videos) {
    if (!v.ground_truth) {
      throw std::invalid_argument("video '" + v.id() +
                                  "' lacks ground truth for evaluation");
    }
    by_id[v.id()] = &v;
    ids.push_back(v.id());
  }

  const auto splits = make_splits(ids, plan);

  EvalReport report;
  report.budgets.assign(budgets.begin(), budgets.end());
  report.n_splits = plan.n_splits;
  report.flags = flags;

  for (int s = 0; s < static_cast<int>(splits.size()); ++s) {
    Dataset train_set;
    for (const auto& id : splits[s].first) train_set.push_back(*by_id[id]);

    TrainConfig split_config = config;
    split_config.reward_flags = flags;
    split_config.seed =
        mix_seed(config.seed, kTrainSalt, static_cast<std::uint64_t>(s));
    const auto [state, reports] = train(train_set, split_config, kts_config);

    for (const auto& id : splits[s].second) {
      const VideoRecord& video = *by_id[id];
      const ShotSegmentation seg = kts_segment(video.features, kts_config);
      const auto gt_mask =
          keyframes_to_scores(seg, video.ground_truth->keyframes);
      const ImportanceScores probs = score_frames(state.params,
                                                  video.features);
      const std::vector<double> per_shot = shot_scores(seg, probs);
      for (double budget : budgets) {
        const SummaryResult summary = select_shots(seg, per_shot, budget);
        ExperimentRow row;
        row.split = s;
        row.budget = budget;
        row.video_id = id;
        row.prf = precision_recall_f1(gt_mask, summary.frame_mask);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

std::string reward_flags_label(const RewardFlags& flags) {
  std::string label;
  if (flags.rep) label += "rep";
  if (flags.div) label += label.empty() ? "div" : "+div";
  if (flags.det) label += label.empty() ? "det" : "+det";
  return label.empty() ? "none" : label;
}

void write_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << "split,budget,rewards,video_id,precision,recall,f1\n";
  const std::string label = reward_flags_label(report.flags);
  char line[256];
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%s,%s,%.9g,%.9g,%.9g\n",
                  row.split, row.budget, label.c_str(), row.video_id.c_str(),
                  row.prf.precision, row.prf.recall, row.prf.f1);
    out << line;
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

void write_summary_json(const std::filesystem::path& path,
                        const EvalReport& report) {
  nlohmann::json by_budget = nlohmann::json::array();
  for (double budget : report.budgets) {
    double precision = 0.0, recall = 0.0;
    int count = 0;
    for (const auto& row : report.rows) {
      if (row.budget != budget) continue;
      precision += row.prf.precision;
      recall += row.prf.recall;
      ++count;
    }
    by_budget.push_back({
        {"budget", budget},
        {"precision", count ? precision / count : 0.0},
        {"recall", count ? recall / count : 0.0},
        {"f1", report.mean_f1(budget)},
    });
  }
  const nlohmann::json summary = {
      {"n_splits", report.n_splits},
      {"rewards", reward_flags_label(report.flags)},
      {"grand_mean_f1", report.grand_mean_f1()},
      {"by_budget", by_budget},
  };
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << summary.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace vsum
