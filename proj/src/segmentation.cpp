#include "vsum/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace vsum {

namespace {

int auto_max_segments(int T) {
  const int m = (T + 19) / 20;
  return std::clamp(m, 1, 50);
}

}  // namespace

KtsResult kts_segment_full(const FrameFeatureSequence& features,
                           const KtsConfig& config) {
  const int T = features.frames();
  if (T < 1) {
    throw std::invalid_argument("kts_segment requires T >= 1");
  }
  int m_max =
      config.max_segments > 0 ? config.max_segments : auto_max_segments(T);
  if (m_max < 1) {
    throw std::invalid_argument("max_segments must be >= 1");
  }
  m_max = std::min(m_max, T);

  const Eigen::MatrixXd frames = features.features.cast<double>();
  const Eigen::MatrixXd gram = frames * frames.transpose();  // T x T

  // Prefix sums: diag[i] = sum of K(k,k) for k < i, and the 2D table
  // block[i][j] = sum of K(k,l) for k < i, l < j. Both O(1) per segment.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(T + 1);
  for (int i = 0; i < T; ++i) diag[i + 1] = diag[i] + gram(i, i);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(T + 1, T + 1);
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      block(i + 1, j + 1) =
          gram(i, j) + block(i, j + 1) + block(i + 1, j) - block(i, j);
    }
  }
  // Within-segment scatter of [a, b).
  const auto scatter = [&](int a, int b) {
    const double sum =
        block(b, b) - block(a, b) - block(b, a) + block(a, a);
    return (diag[b] - diag[a]) - sum / static_cast<double>(b - a);
  };

  // Suffix DP: cost[m][t] = minimal scatter splitting [t, T) into m
  // segments; cut[m][t] = end of the first segment. Scanning the cut
  // point in ascending order with strict improvement makes reconstruction
  // yield the lexicographically earliest boundary set.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(
      m_max + 1, std::vector<double>(T + 1, inf));
  std::vector<std::vector<int>> cut(m_max + 1, std::vector<int>(T + 1, -1));
  for (int t = 0; t < T; ++t) cost[1][t] = scatter(t, T);
  cost[1][T] = inf;
  for (int m = 2; m <= m_max; ++m) {
    // first segment [t, e); leave at least m-1 frames after e
    for (int t = 0; t + m <= T; ++t) {
      double best = inf;
      int best_e = -1;
      for (int e = t + 1; e + (m - 1) <= T; ++e) {
        const double c = scatter(t, e) + cost[m - 1][e];
        if (c < best) {
          best = c;
          best_e = e;
        }
      }
      cost[m][t] = best;
      cut[m][t] = best_e;
    }
  }

  KtsResult result;
  result.scatter_by_m.resize(m_max);
  int chosen = 1;
  double chosen_score = inf;
  for (int m = 1; m <= m_max; ++m) {
    result.scatter_by_m[m - 1] = cost[m][0];
    const double penalty =
        config.penalty_weight * m *
        (std::log(static_cast<double>(T) / m) + 1.0);
    const double score = cost[m][0] + penalty;
    if (score < chosen_score) {
      chosen_score = score;
      chosen = m;
    }
  }
  result.chosen_segments = chosen;

  int t = 0;
  for (int m = chosen; m >= 1; --m) {
    const int e = m == 1 ? T : cut[m][t];
    result.segmentation.shots.push_back({t, e});
    t = e;
  }
  validate(result.segmentation, T);
  return result;
}

ShotSegmentation kts_segment(const FrameFeatureSequence& features,
                             const KtsConfig& config) {
  return kts_segment_full(features, config).segmentation;
}

std::vector<int> shots_containing(const ShotSegmentation& seg,
                                  std::span<const int> frame_indices) {
  const int T = seg.total_frames();
  std::vector<int> starts;
  starts.reserve(seg.shots.size());
  for (const auto& s : seg.shots) starts.push_back(s.start);

  std::vector<int> out;
  out.reserve(frame_indices.size());
  for (int f : frame_indices) {
    if (f < 0 || f >= T) {
      throw std::out_of_range("frame index outside the segmentation");
    }
    const auto it = std::upper_bound(starts.begin(), starts.end(), f);
    out.push_back(static_cast<int>(it - starts.begin()) - 1);
  }
  return out;
}

}  // namespace vsum
