#include <doctest.h>

#include <cmath>
#include <random>

#include "vsum/features.hpp"
#include "vsum/rng.hpp"
#include "helpers.hpp"

using namespace vsum;

TEST_CASE("generator is deterministic: equal seeds give equal datasets") {
  SyntheticSpec spec;
  spec.n_videos = 3;
  spec.frames_range = {40, 80};
  spec.dim = 8;
  spec.segment_len_range = {5, 12};
  spec.seed = 7;

  const Dataset a = generate_synthetic(spec);
  const Dataset b = generate_synthetic(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].features.features == b[i].features.features);
    CHECK(a[i].evidence.det_score == b[i].evidence.det_score);
    CHECK(a[i].evidence.is_plane == b[i].evidence.is_plane);
    CHECK(a[i].ground_truth->keyframes == b[i].ground_truth->keyframes);
  }

  spec.seed = 8;
  const Dataset c = generate_synthetic(spec);
  CHECK(a[0].features.features != c[0].features.features);
}

TEST_CASE("plane_fraction = 0 yields no keyframes and no plane frames") {
  SyntheticSpec spec;
  spec.n_videos = 2;
  spec.frames_range = {50, 60};
  spec.dim = 4;
  spec.segment_len_range = {5, 10};
  spec.plane_fraction = 0.0;
  spec.seed = 3;

  for (const auto& video : generate_synthetic(spec)) {
    CHECK(video.ground_truth->keyframes.empty());
    for (auto p : video.evidence.is_plane) CHECK(p == 0);
    for (auto s : video.evidence.det_score) CHECK(s <= spec.label_noise);
  }
}

TEST_CASE("plane-frame fraction concentrates near plane_fraction") {
  SyntheticSpec spec;
  spec.n_videos = 10;
  spec.frames_range = {1000, 1000};
  spec.dim = 8;
  spec.segment_len_range = {10, 30};
  spec.plane_fraction = 0.3;
  spec.seed = 17;

  long plane = 0, total = 0;
  for (const auto& video : generate_synthetic(spec)) {
    for (auto p : video.evidence.is_plane) plane += p;
    total += video.frames();
  }
  const double fraction = static_cast<double>(plane) / total;
  CHECK(fraction > 0.27);
  CHECK(fraction < 0.33);
}

TEST_CASE("keyframes sit inside plane segments with near-certain scores") {
  SyntheticSpec spec;
  spec.n_videos = 4;
  spec.frames_range = {100, 200};
  spec.dim = 6;
  spec.segment_len_range = {8, 20};
  spec.seed = 5;

  for (const auto& video : generate_synthetic(spec)) {
    REQUIRE(video.ground_truth.has_value());
    for (int k : video.ground_truth->keyframes) {
      CHECK(video.evidence.is_plane[k] == 1);
      CHECK(video.evidence.det_score[k] >= 1.0f - spec.label_noise);
    }
  }
}

TEST_CASE("each plane segment holds exactly one keyframe") {
  SyntheticSpec spec;
  spec.n_videos = 3;
  spec.frames_range = {150, 150};
  spec.dim = 4;
  spec.segment_len_range = {10, 25};
  spec.plane_fraction = 0.5;
  spec.seed = 23;

  for (const auto& video : generate_synthetic(spec)) {
    // Count maximal plane runs; segment boundaries between same-class
    // plane segments are invisible, so runs are a lower bound.
    int runs = 0;
    for (int t = 0; t < video.frames(); ++t) {
      if (video.evidence.is_plane[t] &&
          (t == 0 || !video.evidence.is_plane[t - 1])) {
        ++runs;
      }
    }
    CHECK(static_cast<int>(video.ground_truth->keyframes.size()) >= runs);
    // one keyframe per segment means no duplicates
    auto kf = video.ground_truth->keyframes;
    CHECK(std::adjacent_find(kf.begin(), kf.end()) == kf.end());
  }
}

TEST_CASE("degenerate spec is rejected") {
  SyntheticSpec spec;
  spec.frames_range = {10, 20};
  spec.segment_len_range = {30, 40};  // min segment longer than any video
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

  SyntheticSpec bad_range;
  bad_range.frames_range = {20, 10};
  CHECK_THROWS_AS(generate_synthetic(bad_range), std::invalid_argument);

  SyntheticSpec bad_noise;
  bad_noise.label_noise = 0.5;
  CHECK_THROWS_AS(generate_synthetic(bad_noise), std::invalid_argument);
}

TEST_CASE("reduce_class_probs: forced rules") {
  Eigen::MatrixXd probs(2, 4);
  probs << 0.1, 0.9, 0.0, 0.0,   // argmax plane col 1
           0.6, 0.4, 0.0, 0.0;   // argmax background
  const PlaneEvidence ev = reduce_class_probs(probs);
  CHECK(ev.is_plane[0] == 1);
  CHECK(ev.det_score[0] == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(ev.is_plane[1] == 0);
  CHECK(ev.det_score[1] == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("reduce_class_probs rejects unnormalized rows") {
  Eigen::MatrixXd probs(1, 3);
  probs << 0.5, 0.6, 0.2;
  CHECK_THROWS_AS(reduce_class_probs(probs), std::invalid_argument);
  probs << 0.5, -0.1, 0.6;
  CHECK_THROWS_AS(reduce_class_probs(probs), std::invalid_argument);
}

TEST_CASE("reduce_class_probs matches a per-row argmax/max oracle") {
  Rng rng(31);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int T = 200, C = 5;  // C plane classes + background
  Eigen::MatrixXd probs(T, C + 1);
  for (int t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int c = 0; c <= C; ++c) {
      probs(t, c) = uniform(rng);
      sum += probs(t, c);
    }
    for (int c = 0; c <= C; ++c) probs(t, c) /= sum;
  }
  const PlaneEvidence ev = reduce_class_probs(probs);
  for (int t = 0; t < T; ++t) {
    int argmax = 0;
    double plane_max = 0.0;
    for (int c = 0; c <= C; ++c) {
      if (probs(t, c) > probs(t, argmax)) argmax = c;
      if (c > 0) plane_max = std::max(plane_max, probs(t, c));
    }
    CHECK(ev.is_plane[t] == (argmax > 0 ? 1 : 0));
    CHECK(ev.det_score[t] == doctest::Approx(plane_max).epsilon(1e-6));
    // output satisfies the PlaneEvidence invariants
    CHECK(ev.det_score[t] >= 0.0f);
    CHECK(ev.det_score[t] <= 1.0f);
  }
}
