#pragma once

// The decoder: one bidirectional LSTM layer over frame features, topped by
// an affine map on (x_t, h_t^fwd, h_t^bwd) and a sigmoid, giving per-frame
// selection probabilities. Includes Bernoulli action sampling and the
// action log-likelihood used by the policy-gradient estimator.
//
// Backpropagation is implemented by hand (see scorer_backward); gradients
// are validated against central finite differences in the test suite.

#include <cstdint>
#include <filesystem>
#include <utility>

#include <Eigen/Core>

#include "vsum/datamodel.hpp"
#include "vsum/rng.hpp"

namespace vsum {

// One LSTM direction. Gate rows are packed [input; forget; cell; output],
// H rows each.
struct LstmParams {
  Eigen::MatrixXd w_input;   // 4H x D
  Eigen::MatrixXd w_hidden;  // 4H x H
  Eigen::VectorXd bias;      // 4H
};

struct ScorerParams {
  int input_dim = 0;
  int hidden_size = 0;
  LstmParams forward_cell;
  LstmParams backward_cell;
  Eigen::VectorXd head_weight;  // D + 2H, segments [x | h_fwd | h_bwd]
  double head_bias = 0.0;
};

// Weights uniform in [-k, k] with k = 1/sqrt(hidden_size), biases zero.
ScorerParams make_scorer(int input_dim, int hidden_size, std::uint64_t seed);

std::size_t parameter_count(const ScorerParams& params);

// Flat views in a fixed order (forward cell, backward cell, head); the
// optimizer and the finite-difference checks operate on these.
Eigen::VectorXd flatten(const ScorerParams& params);
void unflatten(const Eigen::VectorXd& flat, ScorerParams& params);

// Everything the backward pass needs from a forward evaluation.
struct LstmTrace {
  Eigen::MatrixXd gate_i, gate_f, gate_g, gate_o;  // H x T, post-activation
  Eigen::MatrixXd cell, cell_tanh, hidden;         // H x T
};

struct ScorerTrace {
  Eigen::MatrixXd inputs;  // D x T, column t = x_t as double
  LstmTrace fwd, bwd;      // both indexed by absolute frame t
  Eigen::VectorXd logits;  // T
  ImportanceScores probs;
};

// Deterministic forward pass; both hidden states start at zero. Throws
// std::invalid_argument on a dimension mismatch and std::runtime_error if
// an intermediate value turns non-finite.
ImportanceScores score_frames(const ScorerParams& params,
                              const FrameFeatureSequence& features);
ScorerTrace score_frames_traced(const ScorerParams& params,
                                const FrameFeatureSequence& features);

// Gradient of a scalar loss wrt every parameter, given dloss/dprobs for
// the traced forward pass. Returned in ScorerParams layout.
ScorerParams scorer_backward(const ScorerParams& params,
                             const ScorerTrace& trace,
                             const Eigen::VectorXd& dprobs);

// a_t ~ Bernoulli(p_t), independent per frame.
ActionSequence sample_actions(const ImportanceScores& probs, Rng& rng);
ActionSequence sample_actions(const ImportanceScores& probs,
                              std::uint64_t seed);

// sum_t a_t log p_t + (1 - a_t) log(1 - p_t), with p clamped to
// [1e-7, 1 - 1e-7] before the log.
double log_prob_of_actions(const ImportanceScores& probs,
                           const ActionSequence& actions);

// Checkpoint container: round-trips ScorerParams exactly and records the
// TrainConfig in effect.
void save_checkpoint(const std::filesystem::path& path,
                     const ScorerParams& params, const TrainConfig& config);
std::pair<ScorerParams, TrainConfig> load_checkpoint(
    const std::filesystem::path& path);

}  // namespace vsum
