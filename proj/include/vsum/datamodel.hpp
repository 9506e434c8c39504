#pragma once

// Core domain types and the on-disk dataset container shared by all modules.
//
// A dataset is a directory holding `manifest.json` plus one raw binary file
// per video and per channel (features, detection scores, plane flags), all
// little-endian IEEE-754 binary32. Frame indexing is 0-based and intervals
// are half-open throughout.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vsum {

// Row-major so a T x D block maps 1:1 onto the feature file layout.
using FeatureMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-video frame feature vectors; row t = feature vector of frame t.
struct FrameFeatureSequence {
  std::string video_id;
  FeatureMatrix features;  // T x D, all entries finite
  double fps = 25.0;

  int frames() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

// Per-frame standard-plane detection evidence: score in [0,1] plus the
// binary class verdict.
struct PlaneEvidence {
  std::vector<float> det_score;
  std::vector<std::uint8_t> is_plane;
};

// Binary selection mask; the summary set S is { t : actions[t] == 1 }.
struct ActionSequence {
  std::vector<std::uint8_t> actions;

  std::vector<int> selected() const;
  int count_selected() const;
};

// Frame-level selection probabilities, each strictly inside (0,1).
struct ImportanceScores {
  std::vector<double> probs;

  int frames() const { return static_cast<int>(probs.size()); }
};

// Ordered, disjoint, exhaustive partition of [0, T) into shots.
struct ShotSegmentation {
  struct Shot {
    int start = 0;
    int end = 0;  // exclusive
    int length() const { return end - start; }
  };
  std::vector<Shot> shots;

  int count() const { return static_cast<int>(shots.size()); }
  int total_frames() const { return shots.empty() ? 0 : shots.back().end; }
};

// Throws std::invalid_argument unless shots are non-empty, sorted, disjoint
// and exactly cover [0, n_frames).
void validate(const ShotSegmentation& seg, int n_frames);

// Sonographer-saved keyframe indices, sorted ascending. Frame-level binary
// scores are derived on demand from a ShotSegmentation (see summarizer).
struct GroundTruthAnnotation {
  std::vector<int> keyframes;
};

struct VideoRecord {
  FrameFeatureSequence features;
  PlaneEvidence evidence;
  // absent = annotation withheld (distinct from present-but-empty)
  std::optional<GroundTruthAnnotation> ground_truth;

  int frames() const { return features.frames(); }
  const std::string& id() const { return features.video_id; }
};

using Dataset = std::vector<VideoRecord>;

// Which reward terms contribute to the total; disabled terms contribute 0.
struct RewardFlags {
  bool rep = true;
  bool div = true;
  bool det = true;

  bool any() const { return rep || div || det; }
};

enum class TrainMode { supervised, unsupervised };

struct TrainConfig {
  TrainMode mode = TrainMode::unsupervised;
  int episodes = 5;          // rollouts per policy-gradient estimate
  int epochs = 300;
  double lr = 1e-4;
  double lr_decay_factor = 0.5;
  int lr_decay_every = 50;   // epochs
  double momentum = 0.9;
  double weight_decay = 1e-5;
  double epsilon = 0.5;      // target mean selection probability
  double beta = 0.01;        // weight of the regularization loss
  double gamma = 1.0;        // weight of the reward term
  double budget = 0.15;      // summary length as a fraction of the video
  int hidden_size = 256;
  std::uint64_t seed = 0;
  RewardFlags reward_flags;
};

void validate(const TrainConfig& config);

// Checks every per-video invariant (shape consistency, finiteness, value
// ranges, keyframe bounds). Throws std::invalid_argument on violation.
void validate(const VideoRecord& video);

// Reads manifest.json and all referenced binary files under `root`.
// Throws std::runtime_error on missing files, shape mismatches, non-finite
// values or out-of-range keyframes.
Dataset load_dataset(const std::filesystem::path& root);

// Writes the manifest plus one binary file per channel per video. The
// round trip load_dataset(save_dataset(x)) is the identity, bit-exact for
// all binary32 payloads. Returns the manifest path.
std::filesystem::path save_dataset(const Dataset& data,
                                   const std::filesystem::path& root);

}  // namespace vsum
