#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vsum/datamodel.hpp"
#include "vsum/rng.hpp"

namespace testutil {

inline vsum::FrameFeatureSequence make_features(
    const std::vector<std::vector<double>>& rows,
    const std::string& id = "test") {
  vsum::FrameFeatureSequence f;
  f.video_id = id;
  f.features.resize(static_cast<int>(rows.size()),
                    static_cast<int>(rows.front().size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t d = 0; d < rows[t].size(); ++d) {
      f.features(static_cast<int>(t), static_cast<int>(d)) =
          static_cast<float>(rows[t][d]);
    }
  }
  return f;
}

inline vsum::FrameFeatureSequence random_features(int frames, int dim,
                                                  vsum::Rng& rng,
                                                  double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  vsum::FrameFeatureSequence f;
  f.video_id = "rand";
  f.features.resize(frames, dim);
  for (int t = 0; t < frames; ++t) {
    for (int d = 0; d < dim; ++d) {
      f.features(t, d) = static_cast<float>(gauss(rng));
    }
  }
  return f;
}

inline vsum::ActionSequence make_actions(std::vector<std::uint8_t> mask) {
  vsum::ActionSequence a;
  a.actions = std::move(mask);
  return a;
}

// Scratch directory under the system temp dir, wiped on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vsum_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
