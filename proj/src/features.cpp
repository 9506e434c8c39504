#include "vsum/features.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "vsum/rng.hpp"

namespace vsum {

namespace {

constexpr std::uint64_t kPrototypeSalt = 0x70726f746f;  // "proto"
constexpr std::uint64_t kVideoSalt = 0x766964;          // "vid"

Eigen::MatrixXd make_prototypes(int n_classes, int dim, std::uint64_t seed) {
  // Random Gaussian directions, normalized: near-orthogonal in expectation
  // for dim >> n_classes, so the reward terms have signal.
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd prototypes(n_classes, dim);
  for (int c = 0; c < n_classes; ++c) {
    for (int d = 0; d < dim; ++d) prototypes(c, d) = gauss(rng);
    prototypes.row(c).normalize();
  }
  return prototypes;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.n_videos < 0) {
    throw std::invalid_argument("n_videos must be >= 0");
  }
  if (spec.dim < 1 || spec.n_plane_classes < 1) {
    throw std::invalid_argument("dim and n_plane_classes must be >= 1");
  }
  if (spec.frames_range.first < 1 ||
      spec.frames_range.second < spec.frames_range.first) {
    throw std::invalid_argument("frames_range must be positive and ordered");
  }
  if (spec.segment_len_range.first < 1 ||
      spec.segment_len_range.second < spec.segment_len_range.first) {
    throw std::invalid_argument(
        "segment_len_range must be positive and ordered");
  }
  if (spec.segment_len_range.first > spec.frames_range.second) {
    throw std::invalid_argument(
        "minimum segment length exceeds the maximum video length");
  }
  if (!(spec.plane_fraction >= 0.0 && spec.plane_fraction <= 1.0)) {
    throw std::invalid_argument("plane_fraction must be in [0, 1]");
  }
  if (!(spec.label_noise >= 0.0 && spec.label_noise < 0.5)) {
    throw std::invalid_argument("label_noise must be in [0, 0.5)");
  }
  if (spec.noise_sigma < 0.0 || spec.drift_sigma < 0.0) {
    throw std::invalid_argument("noise sigmas must be >= 0");
  }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  const Eigen::MatrixXd prototypes = make_prototypes(
      spec.n_plane_classes + 1, spec.dim,
      mix_seed(spec.seed, kPrototypeSalt));

  Dataset data;
  data.reserve(spec.n_videos);
  for (int v = 0; v < spec.n_videos; ++v) {
    Rng rng(mix_seed(spec.seed, kVideoSalt, static_cast<std::uint64_t>(v)));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::uniform_int_distribution<int> frames_dist(spec.frames_range.first,
                                                   spec.frames_range.second);
    const int T = frames_dist(rng);

    VideoRecord rec;
    char id[32];
    std::snprintf(id, sizeof(id), "vid_%03d", v);
    rec.features.video_id = id;
    rec.features.fps = 25.0;
    rec.features.features.resize(T, spec.dim);
    rec.evidence.det_score.resize(T);
    rec.evidence.is_plane.resize(T);
    GroundTruthAnnotation gt;

    // Segment structure: lengths uniform in range, last one truncated;
    // class and keyframe drawn as each segment is placed.
    std::uniform_int_distribution<int> len_dist(spec.segment_len_range.first,
                                                spec.segment_len_range.second);
    std::uniform_int_distribution<int> class_dist(1, spec.n_plane_classes);
    std::vector<int> frame_class(T, 0);
    int start = 0;
    while (start < T) {
      const int end = std::min(T, start + len_dist(rng));
      const bool plane = uniform(rng) < spec.plane_fraction;
      const int cls = plane ? class_dist(rng) : 0;
      for (int t = start; t < end; ++t) frame_class[t] = cls;
      if (plane) {
        std::uniform_int_distribution<int> key_dist(start, end - 1);
        gt.keyframes.push_back(key_dist(rng));
      }
      start = end;
    }

    for (int t = 0; t < T; ++t) {
      const bool plane = frame_class[t] != 0;
      rec.evidence.is_plane[t] = plane ? 1 : 0;
      const double u = uniform(rng);
      rec.evidence.det_score[t] = static_cast<float>(
          plane ? 1.0 - spec.label_noise * u : spec.label_noise * u);
    }

    Eigen::VectorXd walk = Eigen::VectorXd::Zero(spec.dim);
    for (int t = 0; t < T; ++t) {
      if (t > 0) {
        for (int d = 0; d < spec.dim; ++d) {
          walk[d] += spec.drift_sigma * gauss(rng);
        }
      }
      for (int d = 0; d < spec.dim; ++d) {
        const double value = prototypes(frame_class[t], d) +
                             spec.noise_sigma * gauss(rng) + walk[d];
        rec.features.features(t, d) = static_cast<float>(value);
      }
    }

    rec.ground_truth = std::move(gt);
    validate(rec);
    data.push_back(std::move(rec));
  }
  return data;
}

PlaneEvidence reduce_class_probs(const Eigen::MatrixXd& class_probs) {
  const int T = static_cast<int>(class_probs.rows());
  const int cols = static_cast<int>(class_probs.cols());
  if (T < 1 || cols < 2) {
    throw std::invalid_argument(
        "class_probs needs at least one row and two columns");
  }
  PlaneEvidence evidence;
  evidence.det_score.resize(T);
  evidence.is_plane.resize(T);
  for (int t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double p = class_probs(t, c);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("row not normalized");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument("row not normalized");
    }
    Eigen::Index argmax;
    class_probs.row(t).maxCoeff(&argmax);  // first max wins ties
    evidence.is_plane[t] = argmax > 0 ? 1 : 0;
    const double plane_max = class_probs.row(t).tail(cols - 1).maxCoeff();
    evidence.det_score[t] =
        static_cast<float>(std::min(1.0, std::max(0.0, plane_max)));
  }
  return evidence;
}

}  // namespace vsum
