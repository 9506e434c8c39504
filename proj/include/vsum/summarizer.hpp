#pragma once

// Frame scores to summary: ground-truth conversion (key shots), shot
// scoring, budget-constrained shot selection (exact 0/1 knapsack), and the
// composed scoring pipeline.

#include <span>
#include <utility>
#include <vector>

#include "vsum/datamodel.hpp"
#include "vsum/scorer.hpp"
#include "vsum/segmentation.hpp"

namespace vsum {

struct SummaryResult {
  std::vector<int> selected_shots;        // ascending shot ids
  std::vector<std::uint8_t> frame_mask;   // 1 iff frame is in a selected shot
  std::vector<double> shot_scores;        // the scores the selection used
  int budget_frames = 0;
  int used_frames = 0;
};

// Frame t scores 1 iff its shot contains at least one keyframe.
std::vector<std::uint8_t> keyframes_to_scores(const ShotSegmentation& seg,
                                              std::span<const int> keyframes);

// Per-shot arithmetic mean of the frame probabilities.
std::vector<double> shot_scores(const ShotSegmentation& seg,
                                const ImportanceScores& probs);

// Exact 0/1 knapsack: maximize sum of score_i * length_i over selected
// shots subject to sum of lengths <= floor(budget * T). Ties prefer the
// lexicographically earliest shot-id set.
SummaryResult select_shots(const ShotSegmentation& seg,
                           std::span<const double> scores, double budget);

// score_frames -> kts_segment -> shot_scores -> select_shots.
std::pair<SummaryResult, ImportanceScores> generate_summary(
    const ScorerParams& params, const FrameFeatureSequence& features,
    const KtsConfig& kts_config, double budget);

}  // namespace vsum
