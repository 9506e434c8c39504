#pragma once

// The three reward terms driving the frame-selection agent and their sum.
//
// Conventions for degenerate selections: every term is 0 when S is empty,
// and the diversity term is 0 when |S| <= 1 (the defining sums are empty).

#include <vector>

#include <Eigen/Core>

#include "vsum/datamodel.hpp"

namespace vsum {

struct RewardBreakdown {
  double rep = 0.0;
  double div = 0.0;
  double det = 0.0;
  double total = 0.0;  // always the exact sum rep + div + det
};

// exp(-(1/T) * sum_t min_{t' in S} ||x_t - x_{t'}||_2): how well the
// selected frames cover the whole sequence via their nearest medoids.
double representativeness_reward(const FrameFeatureSequence& features,
                                 const ActionSequence& actions);

// Mean pairwise cosine dissimilarity 1 - u.v/(|u||v|) over ordered pairs
// of distinct selected frames. Throws std::invalid_argument if a selected
// frame has a zero-norm feature vector.
double diversity_reward(const FrameFeatureSequence& features,
                        const ActionSequence& actions);

// Mean over S of +s_i for plane frames and -s_i for background frames.
double detection_reward(const PlaneEvidence& evidence,
                        const ActionSequence& actions);

RewardBreakdown total_reward(const FrameFeatureSequence& features,
                             const PlaneEvidence& evidence,
                             const ActionSequence& actions,
                             const RewardFlags& flags = {});

// Amortizes per-video work (double-cast features, optionally the full
// pairwise distance table) across the many reward evaluations of a
// training step. Results are identical to the free functions above.
class RewardEvaluator {
 public:
  explicit RewardEvaluator(const FrameFeatureSequence& features,
                           bool cache_distances = true);

  double rep(const ActionSequence& actions) const;
  double div(const ActionSequence& actions) const;
  double det(const PlaneEvidence& evidence,
             const ActionSequence& actions) const;
  RewardBreakdown total(const PlaneEvidence& evidence,
                        const ActionSequence& actions,
                        const RewardFlags& flags = {}) const;

 private:
  double pair_distance(int a, int b) const;

  Eigen::MatrixXd frames_;       // D x T, column t = x_t
  Eigen::VectorXd norms_;        // per-frame Euclidean norms
  Eigen::MatrixXd distances_;    // T x T when cached, empty otherwise
};

}  // namespace vsum
