#include "vsum/rewards.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vsum {

namespace {

void check_lengths(int frames, const ActionSequence& actions) {
  if (static_cast<int>(actions.actions.size()) != frames) {
    throw std::invalid_argument("action mask length differs from T");
  }
}

}  // namespace

RewardEvaluator::RewardEvaluator(const FrameFeatureSequence& features,
                                 bool cache_distances) {
  const int T = features.frames();
  const int D = features.dim();
  frames_.resize(D, T);
  for (int t = 0; t < T; ++t) {
    frames_.col(t) = features.features.row(t).cast<double>().transpose();
  }
  norms_ = frames_.colwise().norm();
  if (cache_distances) {
    distances_.resize(T, T);
    for (int a = 0; a < T; ++a) {
      distances_(a, a) = 0.0;
      for (int b = a + 1; b < T; ++b) {
        const double d = (frames_.col(a) - frames_.col(b)).norm();
        distances_(a, b) = d;
        distances_(b, a) = d;
      }
    }
  }
}

double RewardEvaluator::pair_distance(int a, int b) const {
  if (distances_.size() > 0) return distances_(a, b);
  return (frames_.col(a) - frames_.col(b)).norm();
}

double RewardEvaluator::rep(const ActionSequence& actions) const {
  const int T = static_cast<int>(frames_.cols());
  check_lengths(T, actions);
  const auto selected = actions.selected();
  if (selected.empty()) return 0.0;

  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int s : selected) {
      nearest = std::min(nearest, pair_distance(t, s));
    }
    sum += nearest;
  }
  return std::exp(-sum / T);
}

double RewardEvaluator::div(const ActionSequence& actions) const {
  const int T = static_cast<int>(frames_.cols());
  check_lengths(T, actions);
  const auto selected = actions.selected();
  const int n = static_cast<int>(selected.size());
  if (n <= 1) return 0.0;

  for (int s : selected) {
    if (norms_(s) == 0.0) {
      throw std::invalid_argument(
          "zero-norm feature vector among selected frames");
    }
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a = selected[i];
      const int b = selected[j];
      const double cosine =
          frames_.col(a).dot(frames_.col(b)) / (norms_(a) * norms_(b));
      sum += 2.0 * (1.0 - cosine);  // both ordered pairs (a,b) and (b,a)
    }
  }
  return sum / (static_cast<double>(n) * (n - 1));
}

double RewardEvaluator::det(const PlaneEvidence& evidence,
                            const ActionSequence& actions) const {
  const int T = static_cast<int>(frames_.cols());
  check_lengths(T, actions);
  if (static_cast<int>(evidence.det_score.size()) != T ||
      static_cast<int>(evidence.is_plane.size()) != T) {
    throw std::invalid_argument("evidence length differs from T");
  }
  const auto selected = actions.selected();
  if (selected.empty()) return 0.0;

  double sum = 0.0;
  for (int s : selected) {
    const double score = evidence.det_score[s];
    sum += evidence.is_plane[s] ? score : -score;
  }
  return sum / static_cast<double>(selected.size());
}

RewardBreakdown RewardEvaluator::total(const PlaneEvidence& evidence,
                                       const ActionSequence& actions,
                                       const RewardFlags& flags) const {
  RewardBreakdown r;
  if (flags.rep) r.rep = rep(actions);
  if (flags.div) r.div = div(actions);
  if (flags.det) r.det = det(evidence, actions);
  r.total = r.rep + r.div + r.det;
  return r;
}

double representativeness_reward(const FrameFeatureSequence& features,
                                 const ActionSequence& actions) {
  return RewardEvaluator(features, false).rep(actions);
}

double diversity_reward(const FrameFeatureSequence& features,
                        const ActionSequence& actions) {
  return RewardEvaluator(features, false).div(actions);
}

double detection_reward(const PlaneEvidence& evidence,
                        const ActionSequence& actions) {
  const int T = static_cast<int>(evidence.det_score.size());
  check_lengths(T, actions);
  const auto selected = actions.selected();
  if (selected.empty()) return 0.0;

  double sum = 0.0;
  for (int s : selected) {
    const double score = evidence.det_score[s];
    sum += evidence.is_plane[s] ? score : -score;
  }
  return sum / static_cast<double>(selected.size());
}

RewardBreakdown total_reward(const FrameFeatureSequence& features,
                             const PlaneEvidence& evidence,
                             const ActionSequence& actions,
                             const RewardFlags& flags) {
  return RewardEvaluator(features, false).total(evidence, actions, flags);
}

}  // namespace vsum
