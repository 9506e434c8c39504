// Process-level checks of the vsum binary: exit codes, determinism of the
// emitted files, config-file precedence. The binary path arrives in the
// VSUM_BIN environment variable (set by ctest).

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsum/scorer.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
  const char* bin = std::getenv("VSUM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "VSUM_BIN must point at the vsum binary");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd =
      binary() + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing " << path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return slurp(a) == slurp(b);
}

std::string make_tiny_dataset(const testutil::TempDir& dir,
                              const std::string& name, int seed) {
  const std::string ds = (dir.path() / name).string();
  const int code = run("synth --out " + ds +
                       " --n-videos 3 --frames 60 90 --dim 6"
                       " --segment-len 6 14 --seed " +
                       std::to_string(seed));
  REQUIRE(code == 0);
  return ds;
}

}  // namespace

TEST_CASE("cli: help exits 0, usage errors exit 2, runtime errors exit 1") {
  CHECK(run("--help") == 0);
  CHECK(run("synth --help") == 0);
  CHECK(run("--no-such-flag") == 2);
  CHECK(run("synth --n-videos 2") == 2);          // missing required --out
  CHECK(run("synth --out x --n-videos 2 --bogus 1") == 2);
  CHECK(run("nosuchcommand") == 2);

  testutil::TempDir dir("clierr");
  CHECK(run("segment --dataset " + (dir.path() / "absent").string() +
            " --out " + (dir.path() / "o.json").string()) == 1);
  CHECK(run("train --dataset " + (dir.path() / "absent").string() +
            " --mode unsup --out " + (dir.path() / "m.ckpt").string()) == 1);
}

TEST_CASE("cli: synth is byte-deterministic and honors plane-fraction 0") {
  testutil::TempDir dir("clisynth");
  const std::string a = (dir.path() / "a").string();
  const std::string b = (dir.path() / "b").string();
  const std::string flags =
      " --n-videos 3 --frames 50 70 --dim 5 --segment-len 5 12 --seed 11";
  CHECK(run("synth --out " + a + flags) == 0);
  CHECK(run("synth --out " + b + flags) == 0);
  CHECK(same_bytes(fs::path(a) / "manifest.json",
                   fs::path(b) / "manifest.json"));
  CHECK(same_bytes(fs::path(a) / "vid_000.features.f32",
                   fs::path(b) / "vid_000.features.f32"));
  CHECK(same_bytes(fs::path(a) / "vid_002.det.f32",
                   fs::path(b) / "vid_002.det.f32"));

  const std::string zero = (dir.path() / "zero").string();
  CHECK(run("synth --out " + zero + flags + " --plane-fraction 0") == 0);
  json manifest;
  std::ifstream(fs::path(zero) / "manifest.json") >> manifest;
  for (const auto& video : manifest.at("videos")) {
    CHECK(video.at("keyframes").empty());
  }
}

TEST_CASE("cli: segment, train, summarize, evaluate and plot are "
          "deterministic given the seed") {
  testutil::TempDir dir("clidet");
  const std::string ds = make_tiny_dataset(dir, "ds", 21);

  const std::string seg1 = (dir.path() / "seg1.json").string();
  const std::string seg2 = (dir.path() / "seg2.json").string();
  CHECK(run("segment --dataset " + ds + " --out " + seg1) == 0);
  CHECK(run("segment --dataset " + ds + " --out " + seg2) == 0);
  CHECK(same_bytes(seg1, seg2));

  const std::string train_flags = " --mode unsup --epochs 2 --hidden-size 6"
                                  " --lr 1e-3 --seed 5";
  const std::string ck1 = (dir.path() / "m1.ckpt").string();
  const std::string ck2 = (dir.path() / "m2.ckpt").string();
  CHECK(run("train --dataset " + ds + " --out " + ck1 + train_flags) == 0);
  CHECK(run("train --dataset " + ds + " --out " + ck2 + train_flags) == 0);
  CHECK(same_bytes(ck1, ck2));
  CHECK(same_bytes(ck1 + ".log.jsonl", ck2 + ".log.jsonl"));

  const std::string sums1 = (dir.path() / "s1").string();
  const std::string sums2 = (dir.path() / "s2").string();
  CHECK(run("summarize --dataset " + ds + " --checkpoint " + ck1 + " --out " +
            sums1 + " --budget 0.2") == 0);
  CHECK(run("summarize --dataset " + ds + " --checkpoint " + ck1 + " --out " +
            sums2 + " --budget 0.2") == 0);
  CHECK(same_bytes(fs::path(sums1) / "vid_000.summary.json",
                   fs::path(sums2) / "vid_000.summary.json"));
  CHECK(same_bytes(fs::path(sums1) / "vid_002.summary.json",
                   fs::path(sums2) / "vid_002.summary.json"));

  const std::string eval_flags = " --mode unsup --epochs 1 --hidden-size 6"
                                 " --splits 2 --budgets 0.15 0.3 --seed 9";
  const std::string ev1 = (dir.path() / "e1").string();
  const std::string ev2 = (dir.path() / "e2").string();
  CHECK(run("evaluate --dataset " + ds + " --out " + ev1 + eval_flags) == 0);
  CHECK(run("evaluate --dataset " + ds + " --out " + ev2 + eval_flags) == 0);
  CHECK(same_bytes(fs::path(ev1) / "results.csv", fs::path(ev2) / "results.csv"));
  CHECK(same_bytes(fs::path(ev1) / "summary.json",
                   fs::path(ev2) / "summary.json"));

  const std::string p1 = (dir.path() / "p1").string();
  const std::string p2 = (dir.path() / "p2").string();
  const std::string plot_flags = " --summaries " + sums1 + " --report " +
                                 (fs::path(ev1) / "summary.json").string();
  CHECK(run("plot" + plot_flags + " --out " + p1) == 0);
  CHECK(run("plot" + plot_flags + " --out " + p2) == 0);
  CHECK(same_bytes(fs::path(p1) / "vid_001.scores.svg",
                   fs::path(p2) / "vid_001.scores.svg"));
  CHECK(same_bytes(fs::path(p1) / "f1_vs_budget.svg",
                   fs::path(p2) / "f1_vs_budget.svg"));

  // 3 curve files + 1 bar chart
  int svg_count = 0;
  for (const auto& entry : fs::directory_iterator(p1)) {
    if (entry.path().extension() == ".svg") ++svg_count;
  }
  CHECK(svg_count == 4);
}

TEST_CASE("cli: evaluate emits splits x budgets x test-videos CSV rows") {
  testutil::TempDir dir("clicsv");
  const std::string ds = make_tiny_dataset(dir, "ds", 33);
  const std::string out = (dir.path() / "eval").string();
  CHECK(run("evaluate --dataset " + ds + " --out " + out +
            " --mode unsup --epochs 1 --hidden-size 6 --splits 2"
            " --train-fraction 0.67 --budgets 0.15 0.25 --seed 4") == 0);

  std::ifstream csv(fs::path(out) / "results.csv");
  std::string line;
  int rows = -1;  // skip header
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2 * 2 * 1);  // 3 videos -> 2 train / 1 test
}

TEST_CASE("cli: train with zero epochs reproduces the seeded initialization") {
  testutil::TempDir dir("cliinit");
  const std::string ds_a = make_tiny_dataset(dir, "a", 41);
  const std::string ds_b = make_tiny_dataset(dir, "b", 42);
  const std::string ck_a = (dir.path() / "a.ckpt").string();
  const std::string ck_b = (dir.path() / "b.ckpt").string();
  const std::string flags = " --mode unsup --epochs 0 --hidden-size 8 --seed 6";
  CHECK(run("train --dataset " + ds_a + " --out " + ck_a + flags) == 0);
  CHECK(run("train --dataset " + ds_b + " --out " + ck_b + flags) == 0);
  // initialization depends only on the seed and the shapes
  CHECK(same_bytes(ck_a, ck_b));
}

TEST_CASE("cli: unsupervised training works on a ground-truth-stripped "
          "dataset, supervised refuses") {
  testutil::TempDir dir("clistrip");
  const std::string ds = make_tiny_dataset(dir, "ds", 51);

  json manifest;
  std::ifstream(fs::path(ds) / "manifest.json") >> manifest;
  for (auto& video : manifest.at("videos")) video.erase("keyframes");
  std::ofstream(fs::path(ds) / "manifest.json") << manifest.dump(2) << "\n";

  const std::string ck = (dir.path() / "m.ckpt").string();
  CHECK(run("train --dataset " + ds + " --out " + ck +
            " --mode unsup --epochs 1 --hidden-size 6") == 0);
  CHECK(run("train --dataset " + ds + " --out " + ck +
            " --mode sup --epochs 1 --hidden-size 6") == 1);
}

TEST_CASE("cli: summarize honors the budget and full budget takes all") {
  testutil::TempDir dir("clibudget");
  const std::string ds = make_tiny_dataset(dir, "ds", 61);
  const std::string ck = (dir.path() / "m.ckpt").string();
  CHECK(run("train --dataset " + ds + " --out " + ck +
            " --mode unsup --epochs 1 --hidden-size 6 --seed 2") == 0);

  const std::string sums = (dir.path() / "sums").string();
  CHECK(run("summarize --dataset " + ds + " --checkpoint " + ck + " --out " +
            sums + " --budget 0.2") == 0);
  for (const auto& entry : fs::directory_iterator(sums)) {
    json summary;
    std::ifstream(entry.path()) >> summary;
    const int T =
        static_cast<int>(summary.at("frame_scores").size());
    CHECK(summary.at("used_frames").get<int>() <=
          static_cast<int>(std::floor(0.2 * T + 1e-9)));
  }

  const std::string full = (dir.path() / "full").string();
  CHECK(run("summarize --dataset " + ds + " --checkpoint " + ck + " --out " +
            full + " --budget 1.0") == 0);
  for (const auto& entry : fs::directory_iterator(full)) {
    json summary;
    std::ifstream(entry.path()) >> summary;
    const int T = static_cast<int>(summary.at("frame_scores").size());
    CHECK(summary.at("used_frames").get<int>() == T);
    CHECK(summary.at("shots").size() == summary.at("segments").size());
  }
}

TEST_CASE("cli: config file fills unset flags, command line wins") {
  testutil::TempDir dir("clicfg");
  const std::string ds = make_tiny_dataset(dir, "ds", 71);

  const auto cfg_path = dir.path() / "train.json";
  std::ofstream(cfg_path) << R"({"epochs": 3, "lr": 0.002, "hidden-size": 6,
                                 "mode": "unsup"})";

  const std::string ck = (dir.path() / "m.ckpt").string();
  CHECK(run("train --dataset " + ds + " --out " + ck + " --config " +
            cfg_path.string() + " --epochs 1") == 0);

  const auto [params, config] = vsum::load_checkpoint(ck);
  CHECK(config.epochs == 1);     // flag beats config file
  CHECK(config.lr == 0.002);     // config file beats default
  CHECK(config.hidden_size == 6);
  CHECK(config.momentum == 0.9);  // untouched default
}
