#include "vsum/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace vsum {

namespace {

constexpr double kLogClamp = 1e-7;    // applied before log in the likelihood
constexpr double kProbClamp = 1e-12;  // keeps probabilities strictly in (0,1)

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}

void fill_uniform(Eigen::MatrixXd& m, double k, Rng& rng) {
  std::uniform_real_distribution<double> dist(-k, k);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

void fill_uniform(Eigen::VectorXd& v, double k, Rng& rng) {
  std::uniform_real_distribution<double> dist(-k, k);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
}

// Runs one LSTM direction over the columns of inputs (D x T). Traces are
// indexed by absolute frame position regardless of direction.
void run_direction(const LstmParams& cell, const Eigen::MatrixXd& inputs,
                   bool reverse, LstmTrace& tr) {
  const int T = static_cast<int>(inputs.cols());
  const int H = static_cast<int>(cell.w_hidden.cols());

  Eigen::MatrixXd pre = cell.w_input * inputs;  // 4H x T
  pre.colwise() += cell.bias;

  tr.gate_i.resize(H, T);
  tr.gate_f.resize(H, T);
  tr.gate_g.resize(H, T);
  tr.gate_o.resize(H, T);
  tr.cell.resize(H, T);
  tr.cell_tanh.resize(H, T);
  tr.hidden.resize(H, T);

  Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd a(4 * H);
  for (int k = 0; k < T; ++k) {
    const int t = reverse ? T - 1 - k : k;
    a.noalias() = cell.w_hidden * h;
    a += pre.col(t);
    tr.gate_i.col(t) = sigmoid(a.segment(0, H).array());
    tr.gate_f.col(t) = sigmoid(a.segment(H, H).array());
    tr.gate_g.col(t) = a.segment(2 * H, H).array().tanh();
    tr.gate_o.col(t) = sigmoid(a.segment(3 * H, H).array());
    c = tr.gate_f.col(t).cwiseProduct(c) +
        tr.gate_i.col(t).cwiseProduct(tr.gate_g.col(t));
    tr.cell.col(t) = c;
    tr.cell_tanh.col(t) = c.array().tanh();
    h = tr.gate_o.col(t).cwiseProduct(tr.cell_tanh.col(t));
    tr.hidden.col(t) = h;
  }
}

// BPTT through one direction. d_hidden carries dloss/dh_t from the head.
void direction_backward(const LstmParams& cell, const Eigen::MatrixXd& inputs,
                        const LstmTrace& tr, const Eigen::MatrixXd& d_hidden,
                        bool reverse, LstmParams& grad) {
  const int T = static_cast<int>(inputs.cols());
  const int H = static_cast<int>(cell.w_hidden.cols());

  Eigen::MatrixXd d_pre(4 * H, T);       // gate pre-activation gradients
  Eigen::MatrixXd hidden_prev(H, T);     // h at the previous visited step

  Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_carry = Eigen::VectorXd::Zero(H);
  for (int k = T - 1; k >= 0; --k) {
    const int t = reverse ? T - 1 - k : k;
    const int t_prev = k > 0 ? (reverse ? T - k : k - 1) : -1;

    const auto i = tr.gate_i.col(t).array();
    const auto f = tr.gate_f.col(t).array();
    const auto g = tr.gate_g.col(t).array();
    const auto o = tr.gate_o.col(t).array();
    const auto ct = tr.cell_tanh.col(t).array();

    const Eigen::ArrayXd dh = d_hidden.col(t).array() + dh_carry.array();
    const Eigen::ArrayXd d_o = dh * ct;
    const Eigen::ArrayXd dc = dh * o * (1.0 - ct.square()) + dc_carry.array();

    Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(H);
    if (t_prev >= 0) {
      c_prev = tr.cell.col(t_prev).array();
      hidden_prev.col(t) = tr.hidden.col(t_prev);
    } else {
      hidden_prev.col(t).setZero();
    }

    const Eigen::ArrayXd d_i = dc * g;
    const Eigen::ArrayXd d_f = dc * c_prev;
    const Eigen::ArrayXd d_g = dc * i;
    dc_carry = (dc * f).matrix();

    d_pre.col(t).segment(0, H) = d_i * i * (1.0 - i);
    d_pre.col(t).segment(H, H) = d_f * f * (1.0 - f);
    d_pre.col(t).segment(2 * H, H) = d_g * (1.0 - g.square());
    d_pre.col(t).segment(3 * H, H) = d_o * o * (1.0 - o);

    dh_carry.noalias() = cell.w_hidden.transpose() * d_pre.col(t);
  }

  grad.w_input.noalias() = d_pre * inputs.transpose();
  grad.w_hidden.noalias() = d_pre * hidden_prev.transpose();
  grad.bias = d_pre.rowwise().sum();
}

void check_dims(const ScorerParams& params,
                const FrameFeatureSequence& features) {
  if (features.dim() != params.input_dim) {
    throw std::invalid_argument("feature dim does not match scorer input");
  }
  if (features.frames() < 1) {
    throw std::invalid_argument("empty frame sequence");
  }
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64_block(std::ofstream& out, const double* values,
                     std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u;
    std::memcpy(&u, &values[i], 8);
    for (int j = 0; j < 8; ++j) {
      buf[8 * i + j] = static_cast<unsigned char>((u >> (8 * j)) & 0xff);
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

void read_f64_block(std::ifstream& in, double* values, std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u = 0;
    for (int j = 0; j < 8; ++j) {
      u |= static_cast<std::uint64_t>(buf[8 * i + j]) << (8 * j);
    }
    std::memcpy(&values[i], &u, 8);
  }
}

const char kCheckpointMagic[8] = {'V', 'S', 'C', 'K', 'P', 'T', '0', '1'};

nlohmann::json config_to_json(const TrainConfig& c) {
  return {
      {"mode", c.mode == TrainMode::supervised ? "supervised" : "unsupervised"},
      {"episodes", c.episodes},
      {"epochs", c.epochs},
      {"lr", c.lr},
      {"lr_decay_factor", c.lr_decay_factor},
      {"lr_decay_every", c.lr_decay_every},
      {"momentum", c.momentum},
      {"weight_decay", c.weight_decay},
      {"epsilon", c.epsilon},
      {"beta", c.beta},
      {"gamma", c.gamma},
      {"budget", c.budget},
      {"hidden_size", c.hidden_size},
      {"seed", c.seed},
      {"rewards",
       {{"rep", c.reward_flags.rep},
        {"div", c.reward_flags.div},
        {"det", c.reward_flags.det}}},
  };
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.mode = j.at("mode").get<std::string>() == "supervised"
               ? TrainMode::supervised
               : TrainMode::unsupervised;
  c.episodes = j.at("episodes").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.lr = j.at("lr").get<double>();
  c.lr_decay_factor = j.at("lr_decay_factor").get<double>();
  c.lr_decay_every = j.at("lr_decay_every").get<int>();
  c.momentum = j.at("momentum").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.beta = j.at("beta").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.budget = j.at("budget").get<double>();
  c.hidden_size = j.at("hidden_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.reward_flags.rep = j.at("rewards").at("rep").get<bool>();
  c.reward_flags.div = j.at("rewards").at("div").get<bool>();
  c.reward_flags.det = j.at("rewards").at("det").get<bool>();
  return c;
}

}  // namespace

ScorerParams make_scorer(int input_dim, int hidden_size, std::uint64_t seed) {
  if (input_dim < 1 || hidden_size < 1) {
    throw std::invalid_argument("input_dim and hidden_size must be >= 1");
  }
  ScorerParams p;
  p.input_dim = input_dim;
  p.hidden_size = hidden_size;
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  Rng rng(seed);
  for (LstmParams* cell : {&p.forward_cell, &p.backward_cell}) {
    cell->w_input.resize(4 * hidden_size, input_dim);
    cell->w_hidden.resize(4 * hidden_size, hidden_size);
    cell->bias = Eigen::VectorXd::Zero(4 * hidden_size);
    fill_uniform(cell->w_input, k, rng);
    fill_uniform(cell->w_hidden, k, rng);
  }
  p.head_weight.resize(input_dim + 2 * hidden_size);
  fill_uniform(p.head_weight, k, rng);
  p.head_bias = 0.0;
  return p;
}

std::size_t parameter_count(const ScorerParams& p) {
  const auto cell_size = [](const LstmParams& c) {
    return static_cast<std::size_t>(c.w_input.size() + c.w_hidden.size() +
                                    c.bias.size());
  };
  return cell_size(p.forward_cell) + cell_size(p.backward_cell) +
         static_cast<std::size_t>(p.head_weight.size()) + 1;
}

Eigen::VectorXd flatten(const ScorerParams& p) {
  Eigen::VectorXd flat(parameter_count(p));
  Eigen::Index pos = 0;
  const auto put = [&](const double* data, Eigen::Index n) {
    flat.segment(pos, n) = Eigen::Map<const Eigen::VectorXd>(data, n);
    pos += n;
  };
  for (const LstmParams* cell : {&p.forward_cell, &p.backward_cell}) {
    put(cell->w_input.data(), cell->w_input.size());
    put(cell->w_hidden.data(), cell->w_hidden.size());
    put(cell->bias.data(), cell->bias.size());
  }
  put(p.head_weight.data(), p.head_weight.size());
  flat[pos++] = p.head_bias;
  return flat;
}

void unflatten(const Eigen::VectorXd& flat, ScorerParams& p) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count(p))) {
    throw std::invalid_argument("flat parameter vector has wrong length");
  }
  Eigen::Index pos = 0;
  const auto take = [&](double* data, Eigen::Index n) {
    Eigen::Map<Eigen::VectorXd>(data, n) = flat.segment(pos, n);
    pos += n;
  };
  for (LstmParams* cell : {&p.forward_cell, &p.backward_cell}) {
    take(cell->w_input.data(), cell->w_input.size());
    take(cell->w_hidden.data(), cell->w_hidden.size());
    take(cell->bias.data(), cell->bias.size());
  }
  take(p.head_weight.data(), p.head_weight.size());
  p.head_bias = flat[pos];
}

ScorerTrace score_frames_traced(const ScorerParams& params,
                                const FrameFeatureSequence& features) {
  check_dims(params, features);
  const int T = features.frames();
  const int D = params.input_dim;
  const int H = params.hidden_size;

  ScorerTrace tr;
  tr.inputs.resize(D, T);
  for (int t = 0; t < T; ++t) {
    tr.inputs.col(t) = features.features.row(t).cast<double>().transpose();
  }

  run_direction(params.forward_cell, tr.inputs, false, tr.fwd);
  run_direction(params.backward_cell, tr.inputs, true, tr.bwd);

  tr.logits = tr.inputs.transpose() * params.head_weight.segment(0, D);
  tr.logits.noalias() +=
      tr.fwd.hidden.transpose() * params.head_weight.segment(D, H);
  tr.logits.noalias() +=
      tr.bwd.hidden.transpose() * params.head_weight.segment(D + H, H);
  tr.logits.array() += params.head_bias;

  if (!tr.logits.allFinite()) {
    throw std::runtime_error("scorer forward produced non-finite values");
  }

  tr.probs.probs.resize(T);
  for (int t = 0; t < T; ++t) {
    const double p = 1.0 / (1.0 + std::exp(-tr.logits[t]));
    tr.probs.probs[t] = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  }
  return tr;
}

ImportanceScores score_frames(const ScorerParams& params,
                              const FrameFeatureSequence& features) {
  return score_frames_traced(params, features).probs;
}

ScorerParams scorer_backward(const ScorerParams& params,
                             const ScorerTrace& trace,
                             const Eigen::VectorXd& dprobs) {
  const int T = static_cast<int>(trace.inputs.cols());
  const int D = params.input_dim;
  const int H = params.hidden_size;
  if (dprobs.size() != T) {
    throw std::invalid_argument("dprobs length differs from T");
  }

  Eigen::VectorXd dlogits(T);
  for (int t = 0; t < T; ++t) {
    const double p = trace.probs.probs[t];
    dlogits[t] = dprobs[t] * p * (1.0 - p);
  }

  ScorerParams grad;
  grad.input_dim = D;
  grad.hidden_size = H;
  grad.head_weight.resize(D + 2 * H);
  grad.head_weight.segment(0, D).noalias() = trace.inputs * dlogits;
  grad.head_weight.segment(D, H).noalias() = trace.fwd.hidden * dlogits;
  grad.head_weight.segment(D + H, H).noalias() = trace.bwd.hidden * dlogits;
  grad.head_bias = dlogits.sum();

  const Eigen::MatrixXd d_hidden_fwd =
      params.head_weight.segment(D, H) * dlogits.transpose();  // H x T
  const Eigen::MatrixXd d_hidden_bwd =
      params.head_weight.segment(D + H, H) * dlogits.transpose();

  direction_backward(params.forward_cell, trace.inputs, trace.fwd,
                     d_hidden_fwd, false, grad.forward_cell);
  direction_backward(params.backward_cell, trace.inputs, trace.bwd,
                     d_hidden_bwd, true, grad.backward_cell);

  if (!grad.forward_cell.w_input.allFinite() ||
      !grad.backward_cell.w_input.allFinite() ||
      !grad.head_weight.allFinite()) {
    throw std::runtime_error("scorer backward produced non-finite values");
  }
  return grad;
}

ActionSequence sample_actions(const ImportanceScores& probs, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ActionSequence out;
  out.actions.resize(probs.probs.size());
  for (std::size_t t = 0; t < probs.probs.size(); ++t) {
    out.actions[t] = uniform(rng) < probs.probs[t] ? 1 : 0;
  }
  return out;
}

ActionSequence sample_actions(const ImportanceScores& probs,
                              std::uint64_t seed) {
  Rng rng(seed);
  return sample_actions(probs, rng);
}

double log_prob_of_actions(const ImportanceScores& probs,
                           const ActionSequence& actions) {
  if (probs.probs.size() != actions.actions.size()) {
    throw std::invalid_argument("probability and action lengths differ");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < probs.probs.size(); ++t) {
    const double p =
        std::clamp(probs.probs[t], kLogClamp, 1.0 - kLogClamp);
    sum += actions.actions[t] ? std::log(p) : std::log(1.0 - p);
  }
  return sum;
}

void save_checkpoint(const std::filesystem::path& path,
                     const ScorerParams& params, const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out.write(kCheckpointMagic, 8);
  const std::string config_json = config_to_json(config).dump();
  write_u32(out, static_cast<std::uint32_t>(config_json.size()));
  out.write(config_json.data(),
            static_cast<std::streamsize>(config_json.size()));
  write_u32(out, static_cast<std::uint32_t>(params.input_dim));
  write_u32(out, static_cast<std::uint32_t>(params.hidden_size));
  const Eigen::VectorXd flat = flatten(params);
  write_f64_block(out, flat.data(), static_cast<std::size_t>(flat.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::pair<ScorerParams, TrainConfig> load_checkpoint(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("missing file: " + path.string());
  }
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw std::runtime_error("not a scorer checkpoint: " + path.string());
  }
  const std::uint32_t json_len = read_u32(in);
  std::string config_json(json_len, '\0');
  in.read(config_json.data(), json_len);
  TrainConfig config;
  try {
    config = config_from_json(nlohmann::json::parse(config_json));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed checkpoint config: " +
                             std::string(e.what()));
  }
  const int input_dim = static_cast<int>(read_u32(in));
  const int hidden = static_cast<int>(read_u32(in));
  if (!in || input_dim < 1 || hidden < 1) {
    throw std::runtime_error("malformed checkpoint header");
  }
  ScorerParams params = make_scorer(input_dim, hidden, 0);
  Eigen::VectorXd flat(parameter_count(params));
  read_f64_block(in, flat.data(), static_cast<std::size_t>(flat.size()));
  if (!in) {
    throw std::runtime_error("truncated checkpoint: " + path.string());
  }
  unflatten(flat, params);
  return {std::move(params), config};
}

}  // namespace vsum
