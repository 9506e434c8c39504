#include "vsum/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vsum/summarizer.hpp"

namespace vsum {

namespace {

constexpr double kLogClamp = 1e-7;       // must match log_prob_of_actions
constexpr double kBaselineMomentum = 0.9;
constexpr std::uint64_t kInitSalt = 0x696e6974;     // "init"
constexpr std::uint64_t kShuffleSalt = 0x73687566;  // "shuf"
constexpr std::uint64_t kEpisodeSalt = 0x65706973;  // "epis"

}  // namespace

double prediction_loss(const ImportanceScores& probs,
                       std::span<const std::uint8_t> gt_scores) {
  const std::size_t T = probs.probs.size();
  if (gt_scores.size() != T) {
    throw std::invalid_argument("ground-truth score length differs from T");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double d = probs.probs[t] - static_cast<double>(gt_scores[t]);
    sum += d * d;
  }
  return sum / static_cast<double>(T);
}

double regularization_loss(const ImportanceScores& probs, double epsilon) {
  const double mean =
      std::accumulate(probs.probs.begin(), probs.probs.end(), 0.0) /
      static_cast<double>(probs.probs.size());
  const double d = mean - epsilon;
  return d * d;
}

double learning_rate_at(int epoch, const TrainConfig& config) {
  const int steps = epoch / config.lr_decay_every;
  return config.lr * std::pow(config.lr_decay_factor, steps);
}

void sgd_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
              Eigen::VectorXd& velocity, double lr, double momentum,
              double weight_decay) {
  velocity = momentum * velocity + (grad + weight_decay * theta);
  theta -= lr * velocity;
}

std::vector<double> reinforce_grad_wrt_probs(
    const ImportanceScores& probs,
    std::span<const ActionSequence> episode_actions,
    std::span<const double> episode_rewards, double baseline) {
  if (episode_actions.size() != episode_rewards.size() ||
      episode_actions.empty()) {
    throw std::invalid_argument("episode actions/rewards mismatch");
  }
  const std::size_t T = probs.probs.size();
  std::vector<double> grad(T, 0.0);
  for (std::size_t e = 0; e < episode_actions.size(); ++e) {
    const auto& actions = episode_actions[e].actions;
    if (actions.size() != T) {
      throw std::invalid_argument("episode action length differs from T");
    }
    const double advantage = episode_rewards[e] - baseline;
    for (std::size_t t = 0; t < T; ++t) {
      const double p = std::clamp(probs.probs[t], kLogClamp, 1.0 - kLogClamp);
      // d/dp of [a log p + (1-a) log(1-p)]
      const double dlogpi = actions[t] ? 1.0 / p : -1.0 / (1.0 - p);
      grad[t] += advantage * dlogpi;
    }
  }
  const double scale = 1.0 / static_cast<double>(episode_actions.size());
  for (double& g : grad) g *= scale;
  return grad;
}

PolicyGradientEstimate estimate_policy_gradient(
    const ScorerParams& params, const FrameFeatureSequence& features,
    const PlaneEvidence& evidence, int episodes, double baseline, Rng& rng,
    const RewardFlags& flags) {
  if (episodes < 1) {
    throw std::invalid_argument("episodes must be >= 1");
  }
  const ScorerTrace trace = score_frames_traced(params, features);
  const RewardEvaluator reward(features, features.frames() <= 1024);

  std::vector<ActionSequence> actions;
  std::vector<double> rewards;
  actions.reserve(episodes);
  rewards.reserve(episodes);
  for (int e = 0; e < episodes; ++e) {
    actions.push_back(sample_actions(trace.probs, rng));
    rewards.push_back(reward.total(evidence, actions.back(), flags).total);
  }

  const std::vector<double> dJ_dp =
      reinforce_grad_wrt_probs(trace.probs, actions, rewards, baseline);
  const Eigen::VectorXd dprobs =
      Eigen::Map<const Eigen::VectorXd>(dJ_dp.data(), dJ_dp.size());

  PolicyGradientEstimate estimate;
  estimate.grad = scorer_backward(params, trace, dprobs);
  estimate.episode_rewards = std::move(rewards);
  estimate.mean_reward = std::accumulate(estimate.episode_rewards.begin(),
                                         estimate.episode_rewards.end(), 0.0) /
                         episodes;
  return estimate;
}

std::pair<TrainState, std::vector<EpochReport>> train(
    const Dataset& videos, const TrainConfig& config,
    const KtsConfig& kts_config, const EpochCallback& on_epoch) {
  validate(config);
  if (videos.empty()) {
    throw std::invalid_argument("training set is empty");
  }
  const int input_dim = videos.front().features.dim();
  for (const auto& v : videos) {
    if (v.features.dim() != input_dim) {
      throw std::invalid_argument("videos disagree on feature dim");
    }
  }

  const bool supervised = config.mode == TrainMode::supervised;
  if (!supervised && !config.reward_flags.any()) {
    throw std::invalid_argument(
        "unsupervised training needs at least one reward term");
  }

  // Supervised targets: key-shot frame scores from each video's own KTS
  // segmentation.
  std::vector<std::vector<std::uint8_t>> gt_scores(videos.size());
  if (supervised) {
    for (std::size_t i = 0; i < videos.size(); ++i) {
      if (!videos[i].ground_truth) {
        throw std::invalid_argument("video '" + videos[i].id() +
                                    "' lacks ground truth (supervised mode)");
      }
      const ShotSegmentation seg =
          kts_segment(videos[i].features, kts_config);
      gt_scores[i] =
          keyframes_to_scores(seg, videos[i].ground_truth->keyframes);
    }
  }

  // Per-video reward evaluators carry the pairwise-distance cache across
  // every epoch and episode. The cache is quadratic in T, so long videos
  // fall back to on-demand distances.
  std::vector<RewardEvaluator> reward_evals;
  reward_evals.reserve(videos.size());
  for (const auto& v : videos) {
    reward_evals.emplace_back(v.features, v.frames() <= 1024);
  }

  TrainState state;
  state.params = make_scorer(input_dim, config.hidden_size,
                             mix_seed(config.seed, kInitSalt));
  Eigen::VectorXd theta = flatten(state.params);
  state.velocity = Eigen::VectorXd::Zero(theta.size());

  std::vector<EpochReport> reports;
  reports.reserve(config.epochs);
  std::vector<int> order(videos.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate_at(epoch, config);
    Rng shuffle_rng(mix_seed(config.seed, kShuffleSalt,
                             static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochReport report;
    report.epoch = epoch;
    report.lr = lr;

    for (int idx : order) {
      const VideoRecord& video = videos[idx];
      const int T = video.frames();
      ScorerTrace trace;
      try {
        trace = score_frames_traced(state.params, video.features);
      } catch (const std::runtime_error& e) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << " on video '"
            << video.id() << "': " << e.what();
        throw std::runtime_error(msg.str());
      }
      const ImportanceScores& probs = trace.probs;

      // Episode rollouts under the current policy.
      Rng episode_rng(mix_seed(mix_seed(config.seed, kEpisodeSalt),
                               static_cast<std::uint64_t>(epoch),
                               static_cast<std::uint64_t>(idx)));
      std::vector<ActionSequence> actions;
      std::vector<double> rewards;
      actions.reserve(config.episodes);
      rewards.reserve(config.episodes);
      for (int e = 0; e < config.episodes; ++e) {
        actions.push_back(sample_actions(probs, episode_rng));
        rewards.push_back(reward_evals[idx]
                              .total(video.evidence, actions.back(),
                                     config.reward_flags)
                              .total);
      }
      const double episode_mean =
          std::accumulate(rewards.begin(), rewards.end(), 0.0) /
          config.episodes;

      double& baseline = state.baselines[video.id()];  // starts at 0
      const std::vector<double> dJ_dp =
          reinforce_grad_wrt_probs(probs, actions, rewards, baseline);

      // dL/dp of the full objective; the reward enters with -gamma since
      // dJ_dp is an ascent direction.
      Eigen::VectorXd dloss_dp(T);
      const double mean_p =
          std::accumulate(probs.probs.begin(), probs.probs.end(), 0.0) / T;
      const double reg_common = 2.0 * (mean_p - config.epsilon) / T;
      double pred = 0.0;
      for (int t = 0; t < T; ++t) {
        double d = config.beta * reg_common - config.gamma * dJ_dp[t];
        if (supervised) {
          const double diff =
              probs.probs[t] - static_cast<double>(gt_scores[idx][t]);
          d += 2.0 * diff / T;
          pred += diff * diff;
        }
        dloss_dp[t] = d;
      }
      pred /= T;
      const double reg = (mean_p - config.epsilon) * (mean_p - config.epsilon);

      ScorerParams grad;
      try {
        grad = scorer_backward(state.params, trace, dloss_dp);
      } catch (const std::runtime_error& e) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << " on video '"
            << video.id() << "': " << e.what();
        throw std::runtime_error(msg.str());
      }
      sgd_step(theta, flatten(grad), state.velocity, lr, config.momentum,
               config.weight_decay);
      unflatten(theta, state.params);

      baseline = kBaselineMomentum * baseline +
                 (1.0 - kBaselineMomentum) * episode_mean;

      if (!theta.allFinite() || !std::isfinite(pred) || !std::isfinite(reg) ||
          !std::isfinite(episode_mean)) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << " on video '"
            << video.id() << "'";
        throw std::runtime_error(msg.str());
      }

      report.mean_reward += episode_mean;
      report.mean_pred_loss += pred;
      report.mean_reg_loss += reg;
    }

    const double n = static_cast<double>(videos.size());
    report.mean_reward /= n;
    report.mean_pred_loss /= n;
    report.mean_reg_loss /= n;
    reports.push_back(report);
    if (on_epoch) on_epoch(report);
  }

  state.epoch = config.epochs;
  return {std::move(state), std::move(reports)};
}

void append_training_log(const std::filesystem::path& path,
                         std::span<const EpochReport> reports) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  for (const auto& r : reports) {
    const nlohmann::json line = {
        {"epoch", r.epoch},
        {"mean_reward", r.mean_reward},
        {"pred_loss", r.mean_pred_loss},
        {"reg_loss", r.mean_reg_loss},
        {"lr", r.lr},
    };
    out << line.dump() << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace vsum
