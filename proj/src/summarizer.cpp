#include "vsum/summarizer.hpp"

#include <cmath>
#include <stdexcept>

namespace vsum {

std::vector<std::uint8_t> keyframes_to_scores(const ShotSegmentation& seg,
                                              std::span<const int> keyframes) {
  const int T = seg.total_frames();
  std::vector<std::uint8_t> key_shot(seg.shots.size(), 0);
  for (int shot : shots_containing(seg, keyframes)) {
    key_shot[shot] = 1;
  }
  std::vector<std::uint8_t> scores(T, 0);
  for (std::size_t i = 0; i < seg.shots.size(); ++i) {
    if (!key_shot[i]) continue;
    for (int t = seg.shots[i].start; t < seg.shots[i].end; ++t) scores[t] = 1;
  }
  return scores;
}

std::vector<double> shot_scores(const ShotSegmentation& seg,
                                const ImportanceScores& probs) {
  if (probs.frames() != seg.total_frames()) {
    throw std::invalid_argument("score length differs from segmentation");
  }
  std::vector<double> out;
  out.reserve(seg.shots.size());
  for (const auto& shot : seg.shots) {
    double sum = 0.0;
    for (int t = shot.start; t < shot.end; ++t) sum += probs.probs[t];
    out.push_back(sum / shot.length());
  }
  return out;
}

SummaryResult select_shots(const ShotSegmentation& seg,
                           std::span<const double> scores, double budget) {
  if (!(budget > 0.0 && budget <= 1.0)) {
    throw std::invalid_argument("budget must be in (0, 1]");
  }
  const int n = seg.count();
  if (static_cast<int>(scores.size()) != n) {
    throw std::invalid_argument("one score per shot required");
  }
  const int T = seg.total_frames();
  // The epsilon absorbs cases like 0.15 * 600 landing just below the
  // mathematical integer.
  const int capacity = static_cast<int>(std::floor(budget * T + 1e-9));

  // Suffix-form knapsack over shot ids: best[i][c] = max value using shots
  // i.. with c frames of room. Reconstructing front-to-back and taking on
  // ties yields the lexicographically earliest optimal id set.
  std::vector<std::vector<double>> best(
      n + 1, std::vector<double>(capacity + 1, 0.0));
  for (int i = n - 1; i >= 0; --i) {
    const int len = seg.shots[i].length();
    const double value = scores[i] * len;
    for (int c = 0; c <= capacity; ++c) {
      best[i][c] = best[i + 1][c];
      if (len <= c) {
        best[i][c] = std::max(best[i][c], value + best[i + 1][c - len]);
      }
    }
  }

  SummaryResult result;
  result.shot_scores.assign(scores.begin(), scores.end());
  result.budget_frames = capacity;
  result.frame_mask.assign(T, 0);
  int room = capacity;
  for (int i = 0; i < n; ++i) {
    const int len = seg.shots[i].length();
    if (len > room) continue;
    const double take = scores[i] * len + best[i + 1][room - len];
    if (take >= best[i + 1][room]) {
      result.selected_shots.push_back(i);
      result.used_frames += len;
      for (int t = seg.shots[i].start; t < seg.shots[i].end; ++t) {
        result.frame_mask[t] = 1;
      }
      room -= len;
    }
  }
  return result;
}

std::pair<SummaryResult, ImportanceScores> generate_summary(
    const ScorerParams& params, const FrameFeatureSequence& features,
    const KtsConfig& kts_config, double budget) {
  ImportanceScores probs = score_frames(params, features);
  const ShotSegmentation seg = kts_segment(features, kts_config);
  const std::vector<double> per_shot = shot_scores(seg, probs);
  SummaryResult summary = select_shots(seg, per_shot, budget);
  return {std::move(summary), std::move(probs)};
}

}  // namespace vsum
