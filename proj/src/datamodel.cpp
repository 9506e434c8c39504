#include "vsum/datamodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vsum {

namespace {

using nlohmann::json;

std::uint32_t float_to_bits(float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

float bits_to_float(std::uint32_t u) {
  float v;
  std::memcpy(&v, &u, sizeof(v));
  return v;
}

// Raw binary32 payloads, explicitly little-endian regardless of host order.
void write_f32_le(const std::filesystem::path& path,
                  const float* values, std::size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  std::vector<unsigned char> buf(count * 4);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t u = float_to_bits(values[i]);
    buf[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
    buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::vector<float> read_f32_le(const std::filesystem::path& path,
                               std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("missing file: " + path.string());
  }
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  if (file_size != expected_count * 4) {
    std::ostringstream msg;
    msg << "shape mismatch: " << path.string() << " holds " << file_size
        << " bytes, expected " << expected_count * 4;
    throw std::runtime_error(msg.str());
  }
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(expected_count * 4);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!in) {
    throw std::runtime_error("read failed: " + path.string());
  }
  std::vector<float> values(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i + 0]) |
                            (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                            (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                            (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
    values[i] = bits_to_float(u);
  }
  return values;
}

}  // namespace

std::vector<int> ActionSequence::selected() const {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(actions.size()); ++t) {
    if (actions[t]) out.push_back(t);
  }
  return out;
}

int ActionSequence::count_selected() const {
  int n = 0;
  for (auto a : actions) n += (a != 0);
  return n;
}

void validate(const ShotSegmentation& seg, int n_frames) {
  if (seg.shots.empty()) {
    if (n_frames == 0) return;
    throw std::invalid_argument("segmentation is empty");
  }
  if (seg.shots.front().start != 0) {
    throw std::invalid_argument("segmentation does not start at frame 0");
  }
  for (std::size_t i = 0; i < seg.shots.size(); ++i) {
    const auto& s = seg.shots[i];
    if (s.end <= s.start) {
      throw std::invalid_argument("empty or inverted shot interval");
    }
    if (i + 1 < seg.shots.size() && seg.shots[i + 1].start != s.end) {
      throw std::invalid_argument("segmentation has a gap or overlap");
    }
  }
  if (seg.shots.back().end != n_frames) {
    throw std::invalid_argument("segmentation does not cover all frames");
  }
}

void validate(const TrainConfig& config) {
  if (config.episodes < 1) {
    throw std::invalid_argument("episodes must be >= 1");
  }
  if (config.epochs < 0) {
    throw std::invalid_argument("epochs must be >= 0");
  }
  if (!(config.budget > 0.0 && config.budget <= 1.0)) {
    throw std::invalid_argument("budget must be in (0, 1]");
  }
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must be in [0, 1]");
  }
  if (!(config.lr > 0.0)) {
    throw std::invalid_argument("lr must be > 0");
  }
  if (config.lr_decay_every < 1) {
    throw std::invalid_argument("lr_decay_every must be >= 1");
  }
  if (config.hidden_size < 1) {
    throw std::invalid_argument("hidden_size must be >= 1");
  }
}

void validate(const VideoRecord& video) {
  const int T = video.features.frames();
  const int D = video.features.dim();
  if (T < 1 || D < 1) {
    throw std::invalid_argument("video '" + video.id() +
                                "': T and D must both be >= 1");
  }
  if (!video.features.features.allFinite()) {
    throw std::invalid_argument("video '" + video.id() +
                                "': non-finite feature value");
  }
  if (!(video.features.fps > 0.0) ||
      !std::isfinite(video.features.fps)) {
    throw std::invalid_argument("video '" + video.id() + "': invalid fps");
  }
  if (static_cast<int>(video.evidence.det_score.size()) != T ||
      static_cast<int>(video.evidence.is_plane.size()) != T) {
    throw std::invalid_argument("video '" + video.id() +
                                "': evidence length differs from T");
  }
  for (int t = 0; t < T; ++t) {
    const float s = video.evidence.det_score[t];
    if (!(s >= 0.0f && s <= 1.0f)) {
      throw std::invalid_argument("video '" + video.id() +
                                  "': det_score outside [0,1]");
    }
    if (video.evidence.is_plane[t] > 1) {
      throw std::invalid_argument("video '" + video.id() +
                                  "': is_plane must be 0 or 1");
    }
  }
  if (video.ground_truth) {
    const auto& kf = video.ground_truth->keyframes;
    if (!std::is_sorted(kf.begin(), kf.end())) {
      throw std::invalid_argument("video '" + video.id() +
                                  "': keyframes not sorted");
    }
    for (int k : kf) {
      if (k < 0 || k >= T) {
        throw std::invalid_argument("video '" + video.id() +
                                    "': keyframe index out of range");
      }
    }
  }
}

Dataset load_dataset(const std::filesystem::path& root) {
  const auto manifest_path = root / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::runtime_error("missing file: " + manifest_path.string());
  }
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest: " + std::string(e.what()));
  }

  Dataset data;
  try {
    const auto& videos = manifest.at("videos");
    const int dim = videos.empty() ? 0 : manifest.at("dim").get<int>();
    std::set<std::string> seen_ids;
    for (const auto& v : videos) {
      VideoRecord rec;
      rec.features.video_id = v.at("id").get<std::string>();
      if (!seen_ids.insert(rec.features.video_id).second) {
        throw std::runtime_error("duplicate video id: " +
                                 rec.features.video_id);
      }
      const int n_frames = v.at("n_frames").get<int>();
      rec.features.fps = v.at("fps").get<double>();
      if (n_frames < 1 || dim < 1) {
        throw std::runtime_error("video '" + rec.features.video_id +
                                 "': n_frames and dim must be >= 1");
      }

      const auto features = read_f32_le(
          root / v.at("features_file").get<std::string>(),
          static_cast<std::size_t>(n_frames) * dim);
      rec.features.features.resize(n_frames, dim);
      std::copy(features.begin(), features.end(),
                rec.features.features.data());

      rec.evidence.det_score = read_f32_le(
          root / v.at("det_score_file").get<std::string>(),
          static_cast<std::size_t>(n_frames));
      const auto plane = read_f32_le(
          root / v.at("is_plane_file").get<std::string>(),
          static_cast<std::size_t>(n_frames));
      rec.evidence.is_plane.resize(plane.size());
      for (std::size_t t = 0; t < plane.size(); ++t) {
        if (plane[t] != 0.0f && plane[t] != 1.0f) {
          throw std::runtime_error("video '" + rec.features.video_id +
                                   "': is_plane value not in {0,1}");
        }
        rec.evidence.is_plane[t] = plane[t] == 1.0f ? 1 : 0;
      }

      if (v.contains("keyframes")) {
        GroundTruthAnnotation gt;
        gt.keyframes = v.at("keyframes").get<std::vector<int>>();
        rec.ground_truth = std::move(gt);
      }

      try {
        validate(rec);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what());
      }
      data.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest: " + std::string(e.what()));
  }
  return data;
}

std::filesystem::path save_dataset(const Dataset& data,
                                   const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    throw std::runtime_error("cannot create directory: " + root.string());
  }

  json videos = json::array();
  int dim = 0;
  for (const auto& rec : data) {
    validate(rec);
    if (dim != 0 && rec.features.dim() != dim) {
      throw std::invalid_argument("videos disagree on feature dim");
    }
    dim = rec.features.dim();

    const std::string id = rec.id();
    const std::string features_file = id + ".features.f32";
    const std::string det_file = id + ".det.f32";
    const std::string plane_file = id + ".plane.f32";
    const int T = rec.frames();

    write_f32_le(root / features_file, rec.features.features.data(),
                 static_cast<std::size_t>(T) * rec.features.dim());
    write_f32_le(root / det_file, rec.evidence.det_score.data(),
                 static_cast<std::size_t>(T));
    std::vector<float> plane(rec.evidence.is_plane.begin(),
                             rec.evidence.is_plane.end());
    write_f32_le(root / plane_file, plane.data(), plane.size());

    json v = {
        {"id", id},
        {"n_frames", T},
        {"fps", rec.features.fps},
        {"features_file", features_file},
        {"det_score_file", det_file},
        {"is_plane_file", plane_file},
    };
    if (rec.ground_truth) {
      v["keyframes"] = rec.ground_truth->keyframes;
    }
    videos.push_back(std::move(v));
  }

  const json manifest = {{"dim", dim}, {"videos", videos}};
  const auto manifest_path = root / "manifest.json";
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " +
                             manifest_path.string());
  }
  out << manifest.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("write failed: " + manifest_path.string());
  }
  return manifest_path;
}

}  // namespace vsum
