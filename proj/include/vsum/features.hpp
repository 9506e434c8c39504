#pragma once

// Pluggable frame-feature and plane-evidence provider. The real encoder is
// out of scope; this module ships (a) a synthetic generator standing in
// for it and (b) the reduction from per-class softmax outputs to the
// scalar detection evidence the rewards consume.

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "vsum/datamodel.hpp"

namespace vsum {

struct SyntheticSpec {
  int n_videos = 1;
  std::pair<int, int> frames_range = {400, 600};       // inclusive
  int dim = 64;
  int n_plane_classes = 13;                            // plus background
  std::pair<int, int> segment_len_range = {20, 60};    // inclusive
  double plane_fraction = 0.3;     // per-segment plane probability
  double noise_sigma = 0.1;        // per-frame isotropic Gaussian noise
  double drift_sigma = 0.02;       // per-step random-walk step size
  double label_noise = 0.05;       // detection-score corruption amplitude
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

// Each video is a concatenation of contiguous segments, each assigned
// background or one of the plane classes; frame features are the fixed
// unit-norm class prototype plus Gaussian noise plus a per-video random
// walk. Plane frames get det_score = 1 - label_noise*u, background frames
// label_noise*u. Exactly one keyframe per plane segment. Deterministic
// given the seed; videos use seeds derived from (seed, video index).
Dataset generate_synthetic(const SyntheticSpec& spec);

// Reduces a T x (n_plane_classes + 1) row-stochastic matrix (background in
// column 0) to PlaneEvidence: is_plane = argmax lands on a plane column,
// det_score = max over plane columns. Throws if a row is not normalized.
PlaneEvidence reduce_class_probs(const Eigen::MatrixXd& class_probs);

}  // namespace vsum
