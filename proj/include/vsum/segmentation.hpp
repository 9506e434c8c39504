#pragma once

// Kernel temporal segmentation: penalized changepoint detection that
// partitions a video into shots by minimizing within-segment scatter of
// the linear-kernel Gram matrix, via dynamic programming over segment
// counts m = 1..max_segments with penalty m * (log(T/m) + 1).

#include <span>
#include <vector>

#include "vsum/datamodel.hpp"

namespace vsum {

struct KtsConfig {
  int max_segments = 0;        // 0 = auto: ceil(T/20) capped at 50
  double penalty_weight = 1.0;
};

struct KtsResult {
  ShotSegmentation segmentation;
  // scatter_by_m[m-1] = minimal total within-segment scatter over all
  // segmentations into exactly m shots; non-increasing in m.
  std::vector<double> scatter_by_m;
  int chosen_segments = 0;
};

// Deterministic; ties prefer fewer segments, then the lexicographically
// earliest boundary set. T = 1 yields the single shot [0,1).
KtsResult kts_segment_full(const FrameFeatureSequence& features,
                           const KtsConfig& config = {});
ShotSegmentation kts_segment(const FrameFeatureSequence& features,
                             const KtsConfig& config = {});

// Shot id for each frame index; throws std::out_of_range on bad indices.
std::vector<int> shots_containing(const ShotSegmentation& seg,
                                  std::span<const int> frame_indices);

}  // namespace vsum
