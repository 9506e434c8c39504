#pragma once

// Optimizes the scorer. The objective per video is
//   (supervised ? L_pred : 0) + beta * L_reg - gamma * R,
// where the reward term enters through the REINFORCE surrogate
// -(1/E) sum_e (R_e - b) log pi(a_e) with a per-video moving-average
// baseline b. One SGD-with-momentum step per video, weight decay 1e-5,
// learning rate halved every 50 epochs by default.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vsum/datamodel.hpp"
#include "vsum/rewards.hpp"
#include "vsum/rng.hpp"
#include "vsum/scorer.hpp"
#include "vsum/segmentation.hpp"

namespace vsum {

struct TrainState {
  ScorerParams params;
  Eigen::VectorXd velocity;                 // momentum buffer, flat layout
  int epoch = 0;
  std::map<std::string, double> baselines;  // video id -> reward baseline
};

struct EpochReport {
  int epoch = 0;
  double mean_reward = 0.0;
  double mean_pred_loss = 0.0;  // 0 in unsupervised mode
  double mean_reg_loss = 0.0;
  double lr = 0.0;              // learning rate in effect this epoch
};

// (1/T) sum_t (p_t - p*_t)^2 against binary ground-truth scores.
double prediction_loss(const ImportanceScores& probs,
                       std::span<const std::uint8_t> gt_scores);

// (mean(p) - epsilon)^2.
double regularization_loss(const ImportanceScores& probs, double epsilon);

// lr * decay_factor^floor(epoch / decay_every).
double learning_rate_at(int epoch, const TrainConfig& config);

// One SGD step: v <- momentum*v + (grad + weight_decay*theta);
// theta <- theta - lr*v.
void sgd_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
              Eigen::VectorXd& velocity, double lr, double momentum,
              double weight_decay);

// Core of the REINFORCE estimator: d/dp of the per-episode average of
// (reward_e - baseline) * log pi(a_e), i.e. the ascent direction for the
// expected reward with respect to the Bernoulli probabilities themselves.
std::vector<double> reinforce_grad_wrt_probs(
    const ImportanceScores& probs,
    std::span<const ActionSequence> episode_actions,
    std::span<const double> episode_rewards, double baseline);

struct PolicyGradientEstimate {
  ScorerParams grad;                    // ascent direction for J(theta)
  double mean_reward = 0.0;
  std::vector<double> episode_rewards;
};

// Samples `episodes` action sequences from Bernoulli(p_t) and returns the
// averaged (R_e - baseline) * grad log pi(a_e) estimator over the scorer
// parameters.
PolicyGradientEstimate estimate_policy_gradient(
    const ScorerParams& params, const FrameFeatureSequence& features,
    const PlaneEvidence& evidence, int episodes, double baseline, Rng& rng,
    const RewardFlags& flags = {});

using EpochCallback = std::function<void(const EpochReport&)>;

// Runs config.epochs epochs over the training videos in seeded-shuffled
// order, one optimizer step per video. Supervised mode derives the
// ground-truth frame scores from each video's KTS segmentation. Throws on
// an empty dataset, missing ground truth in supervised mode, or a
// non-finite loss/parameter (reporting the epoch).
std::pair<TrainState, std::vector<EpochReport>> train(
    const Dataset& videos, const TrainConfig& config,
    const KtsConfig& kts_config = {}, const EpochCallback& on_epoch = {});

// Line-delimited JSON, one object per epoch, appended in order.
void append_training_log(const std::filesystem::path& path,
                         std::span<const EpochReport> reports);

}  // namespace vsum
