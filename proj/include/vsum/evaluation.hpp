#pragma once

// Temporal-overlap precision/recall/F1 and the repeated-split experiment
// harness (budget sweep, reward ablation).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsum/datamodel.hpp"
#include "vsum/segmentation.hpp"

namespace vsum {

struct SplitPlan {
  int n_splits = 5;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Overlap O = |gt & pred|; P = O/|pred|, R = O/|gt|, F = 2PR/(P+R).
// Every quotient with a zero denominator is 0.
PrecisionRecallF1 precision_recall_f1(std::span<const std::uint8_t> gt_mask,
                                      std::span<const std::uint8_t> pred_mask);

// n_splits seeded random partitions with train size round(fraction * N);
// each split is disjoint and exhaustive. Throws if fewer than 2 ids.
std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
make_splits(const std::vector<std::string>& video_ids, const SplitPlan& plan);

struct ExperimentRow {
  int split = 0;
  double budget = 0.0;
  std::string video_id;
  PrecisionRecallF1 prf;
};

struct EvalReport {
  std::vector<ExperimentRow> rows;  // one per (split, budget, test video)
  std::vector<double> budgets;
  int n_splits = 0;
  RewardFlags flags;

  PrecisionRecallF1 split_mean(int split, double budget) const;
  double mean_f1(double budget) const;  // across all splits and videos
  double grand_mean_f1() const;         // across everything
};

// For each split: trains on the train videos with only the flagged reward
// terms active, then summarizes every test video at every budget and
// scores it against the key-shot ground truth derived from that video's
// own KTS segmentation (shared with prediction). Rejects an empty flag
// set in unsupervised mode and any test video lacking ground truth.
EvalReport run_experiment(const Dataset& videos, const TrainConfig& config,
                          const KtsConfig& kts_config, const SplitPlan& plan,
                          std::span<const double> budgets,
                          const RewardFlags& flags);

// results table: split,budget,rewards,video_id,precision,recall,f1
void write_csv(const std::filesystem::path& path, const EvalReport& report);
// means per budget plus the grand mean
void write_summary_json(const std::filesystem::path& path,
                        const EvalReport& report);

std::string reward_flags_label(const RewardFlags& flags);

}  // namespace vsum
