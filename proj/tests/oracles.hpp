#pragma once

// Test-only reference implementations, written independently of the code
// under test: plain loops over the defining formulas, brute-force search
// instead of dynamic programming, and direct counting for metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "vsum/datamodel.hpp"

namespace oracles {

using Frame = std::vector<double>;

inline std::vector<Frame> to_frames(const vsum::FrameFeatureSequence& f) {
  std::vector<Frame> frames(f.frames(), Frame(f.dim()));
  for (int t = 0; t < f.frames(); ++t) {
    for (int d = 0; d < f.dim(); ++d) {
      frames[t][d] = static_cast<double>(f.features(t, d));
    }
  }
  return frames;
}

inline double euclidean(const Frame& a, const Frame& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    sum += (a[d] - b[d]) * (a[d] - b[d]);
  }
  return std::sqrt(sum);
}

inline double representativeness(const std::vector<Frame>& frames,
                                 const std::vector<int>& selected) {
  if (selected.empty()) return 0.0;
  double total = 0.0;
  for (const auto& frame : frames) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int s : selected) nearest = std::min(nearest, euclidean(frame, frames[s]));
    total += nearest;
  }
  return std::exp(-total / static_cast<double>(frames.size()));
}

inline double diversity(const std::vector<Frame>& frames,
                        const std::vector<int>& selected) {
  const int n = static_cast<int>(selected.size());
  if (n <= 1) return 0.0;
  double total = 0.0;
  for (int a : selected) {
    for (int b : selected) {
      if (a == b) continue;
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t d = 0; d < frames[a].size(); ++d) {
        dot += frames[a][d] * frames[b][d];
        na += frames[a][d] * frames[a][d];
        nb += frames[b][d] * frames[b][d];
      }
      total += 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
    }
  }
  return total / (static_cast<double>(n) * (n - 1));
}

inline double detection(const std::vector<double>& det_score,
                        const std::vector<std::uint8_t>& is_plane,
                        const std::vector<int>& selected) {
  if (selected.empty()) return 0.0;
  double total = 0.0;
  for (int s : selected) {
    total += is_plane[s] ? det_score[s] : -det_score[s];
  }
  return total / static_cast<double>(selected.size());
}

// Log-likelihood as the log of the product of Bernoulli pmfs, with the
// same [1e-7, 1-1e-7] clamp the implementation documents.
inline double bernoulli_log_pmf(const std::vector<double>& probs,
                                const std::vector<std::uint8_t>& actions) {
  double product = 1.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const double p = std::clamp(probs[t], 1e-7, 1.0 - 1e-7);
    product *= actions[t] ? p : 1.0 - p;
  }
  return std::log(product);
}

// Brute-force 0/1 knapsack value over all subsets.
inline double best_knapsack_value(const std::vector<int>& lengths,
                                  const std::vector<double>& values,
                                  int capacity) {
  const int n = static_cast<int>(lengths.size());
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int used = 0;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        used += lengths[i];
        value += values[i];
      }
    }
    if (used <= capacity) best = std::max(best, value);
  }
  return best;
}

// Within-segment scatter as sum of squared distances to the segment mean;
// an independent route to the Gram-matrix formula.
inline double segment_scatter(const std::vector<Frame>& frames, int begin,
                              int end) {
  const int len = end - begin;
  const std::size_t dim = frames[0].size();
  Frame mean(dim, 0.0);
  for (int t = begin; t < end; ++t) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += frames[t][d];
  }
  for (std::size_t d = 0; d < dim; ++d) mean[d] /= len;
  double scatter = 0.0;
  for (int t = begin; t < end; ++t) {
    for (std::size_t d = 0; d < dim; ++d) {
      scatter += (frames[t][d] - mean[d]) * (frames[t][d] - mean[d]);
    }
  }
  return scatter;
}

// Minimal total scatter across every placement of m-1 boundaries.
inline double exhaustive_min_scatter(const std::vector<Frame>& frames, int m,
                                     std::vector<int>* best_bounds = nullptr) {
  const int T = static_cast<int>(frames.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> bounds(m - 1);
  const std::function<void(int, int, double, std::vector<int>&)> recurse =
      [&](int placed, int start, double cost, std::vector<int>& acc) {
        if (placed == m - 1) {
          const double total = cost + segment_scatter(frames, start, T);
          if (total < best) {
            best = total;
            if (best_bounds) *best_bounds = acc;
          }
          return;
        }
        for (int e = start + 1; e + (m - 1 - placed - 1) < T; ++e) {
          acc[placed] = e;
          recurse(placed + 1, e, cost + segment_scatter(frames, start, e),
                  acc);
        }
      };
  if (m == 1) {
    best = segment_scatter(frames, 0, T);
  } else {
    recurse(0, 0, 0.0, bounds);
  }
  return best;
}

struct Counts {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Counts count_prf(const std::vector<std::uint8_t>& gt,
                        const std::vector<std::uint8_t>& pred) {
  int overlap = 0, n_gt = 0, n_pred = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    if (gt[t]) ++n_gt;
    if (pred[t]) ++n_pred;
    if (gt[t] && pred[t]) ++overlap;
  }
  Counts c;
  if (n_pred) c.precision = double(overlap) / n_pred;
  if (n_gt) c.recall = double(overlap) / n_gt;
  if (c.precision + c.recall > 0) {
    c.f1 = 2 * c.precision * c.recall / (c.precision + c.recall);
  }
  return c;
}

}  // namespace oracles
