// Copyright 2025 The SpikeMotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "smd/bench.hpp"
#include "smd/codd.hpp"
#include "smd/config.hpp"
#include "smd/hsmd.hpp"
#include "smd/image_io.hpp"
#include "smd/imaging.hpp"
#include "smd/mhsnn.hpp"
#include "smd/whiten.hpp"

namespace fs = std::filesystem;
using namespace smd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommonOpts {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

ToolConfig load_tool_config(const CommonOpts& opts) {
  ToolConfig cfg = opts.config_path.empty() ? default_config() : parse_config(opts.config_path);
  apply_config_pairs(cfg, opts.overrides);
  return cfg;
}

std::vector<std::string> list_frames(const std::string& dir) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp")
      paths.push_back(e.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

// Direction suite layout: <root>/<label>/seqNNN/input/in*.png
struct SuiteSequence {
  DirectionLabel label;
  std::string dir;  // the CDnet-layout sequence directory
  std::string name;
};

std::vector<SuiteSequence> load_direction_suite(const std::string& root) {
  std::vector<SuiteSequence> out;
  for (const char* label : {"leftwards", "rightwards", "upwards", "downwards"}) {
    const fs::path dir = fs::path(root) / label;
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> seq_dirs;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_directory()) seq_dirs.push_back(e.path());
    std::sort(seq_dirs.begin(), seq_dirs.end());
    for (const auto& sd : seq_dirs)
      out.push_back({direction_label_from_string(label), sd.string(),
                     std::string(label) + "/" + sd.filename().string()});
  }
  if (out.empty()) throw IoError("no direction suite found under " + root);
  return out;
}

std::vector<GrayFrame> load_gray_sequence(const std::string& seq_dir, int length, int width) {
  const fs::path input_dir = fs::path(seq_dir) / "input";
  const auto paths = list_frames(fs::is_directory(input_dir) ? input_dir.string() : seq_dir);
  if (paths.empty()) throw IoError("no frames under " + seq_dir);
  std::vector<GrayFrame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) {
    GrayFrame g = to_grayscale(load_image(p));
    if (g.height != length || g.width != width) g = resize(g, width, length);
    frames.push_back(std::move(g));
  }
  return frames;
}

void write_pcc_csv(const std::string& output,
                   const std::map<DirectionLabel, std::pair<long long, long long>>& counts) {
  std::ofstream f(output);
  if (!f) throw IoError("cannot write " + output);
  f << "direction,tp,fp,pcc,pwc\n";
  char buf[160];
  for (const auto& [label, c] : counts) {
    auto [pcc, pwc] = pcc_pwc(c.first, c.second);
    std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%.6f,%.6f\n", to_string(label), c.first,
                  c.second, pcc, pwc);
    f << buf;
  }
  if (!f) throw IoError("short write on " + output);
}

int run_hsmd(const CommonOpts& common, const std::string& input, const std::string& output) {
  ToolConfig cfg = load_tool_config(common);
  const auto paths = list_frames(input);
  fs::create_directories(output);

  std::vector<StageTimings> timings;
  pipeline_run(paths, cfg.hsmd, cfg.backend,
               [&](size_t i, const MotionMask& mask, const StageTimings& t) {
                 char name[32];
                 std::snprintf(name, sizeof(name), "bin%06zu.png", i + 1);
                 save_mask_png((fs::path(output) / name).string(), mask.width, mask.height,
                               mask.binary);
                 timings.push_back(t);
               });

  StageTimings mean;
  double total_ms = 0;
  for (const auto& t : timings) {
    mean.grayscale_ms += t.grayscale_ms / timings.size();
    mean.bs_ms += t.bs_ms / timings.size();
    mean.encode_ms += t.encode_ms / timings.size();
    mean.snn_ms += t.snn_ms / timings.size();
    mean.post_ms += t.post_ms / timings.size();
    total_ms += t.total_ms();
  }
  nlohmann::json j;
  j["frames"] = timings.size();
  j["mean_fps"] = total_ms > 0 ? 1000.0 * timings.size() / total_ms : 0.0;
  j["per_stage_ms"] = {{"grayscale", mean.grayscale_ms}, {"bs", mean.bs_ms},
                       {"encode", mean.encode_ms},       {"snn", mean.snn_ms},
                       {"post", mean.post_ms}};
  std::ofstream f(fs::path(output) / "timing.json");
  f << j.dump(2) << '\n';
  if (!f) throw IoError("cannot write timing.json under " + output);
  std::cout << "wrote " << timings.size() << " masks to " << output << " ("
            << j["mean_fps"].get<double>() << " fps)\n";
  return kExitOk;
}

int run_synth(const SyntheticSceneSpec& spec, const std::string& output, bool oracle_masks,
              const std::string& suite, int per_dir, int test_per_dir) {
  if (suite.empty()) {
    synth_export(synth_generate(spec), output, oracle_masks);
    std::cout << "wrote " << spec.n_frames << " frames to " << output << "\n";
    return kExitOk;
  }
  if (suite != "mhsnn") throw std::invalid_argument("unknown suite: " + suite);

  // Labelled direction suite with train/ and test/ splits. The coordinate
  // along the motion axis keeps travel margin; the other axis spans the
  // frame.
  const int size = spec.width;
  const int travel = spec.n_frames - 1;
  std::mt19937 rng(static_cast<unsigned>(spec.seed));
  std::uniform_int_distribution<int> along(1, std::max(1, size - spec.object_size - travel - 1));
  std::uniform_int_distribution<int> across(1, std::max(1, size - spec.object_size - 1));

  auto emit = [&](const std::string& split, int count, int base_index) {
    for (int k = 0; k < count; ++k) {
      const int a = across(rng), b = along(rng);
      struct Item {
        const char* label;
        int vi, vj, si, sj;
      };
      const Item items[] = {
          {"rightwards", 0, 1, a, b},
          {"leftwards", 0, -1, a, b + travel},
          {"downwards", 1, 0, b, a},
          {"upwards", -1, 0, b + travel, a},
      };
      for (const Item& item : items) {
        SyntheticSceneSpec s = spec;
        s.height = size;
        s.velocity_i = item.vi;
        s.velocity_j = item.vj;
        s.start_i = item.si;
        s.start_j = item.sj;
        char name[32];
        std::snprintf(name, sizeof(name), "seq%03d", base_index + k);
        synth_export(synth_generate(s),
                     (fs::path(output) / split / item.label / name).string(), oracle_masks);
      }
    }
  };
  emit("train", per_dir, 0);
  emit("test", test_per_dir, per_dir);
  std::cout << "wrote mhsnn suite (" << per_dir << " train + " << test_per_dir
            << " test per direction) to " << output << "\n";
  return kExitOk;
}

int run_mhsnn_train(const CommonOpts& common, const std::string& input,
                    const std::string& weights_out, const std::string& csv_out, int iterations,
                    bool whiten) {
  ToolConfig cfg = load_tool_config(common);
  auto suite = load_direction_suite(input);

  std::vector<LabelledSequence> data;
  for (const auto& seq : suite) {
    LabelledSequence ls;
    ls.label = seq.label;
    ls.frames = load_gray_sequence(seq.dir, cfg.mhsnn.length, cfg.mhsnn.width);
    data.push_back(std::move(ls));
  }
  if (whiten) {
    std::vector<GrayFrame> all_frames;
    for (const auto& ls : data)
      all_frames.insert(all_frames.end(), ls.frames.begin(), ls.frames.end());
    WhitenModel model = whiten_fit(all_frames, cfg.whiten_epsilon);
    for (auto& ls : data)
      for (auto& f : ls.frames) f = whiten_apply(model, f);
  }

  MhsnnNetwork net(cfg.mhsnn);
  const int iters = iterations > 0 ? iterations : cfg.mhsnn.train_iterations;
  train(net, data, cfg.mhsnn.resume, iters);
  net.save_weights(weights_out);
  if (!csv_out.empty()) net.export_weights_csv(csv_out);
  std::cout << "trained on " << data.size() << " sequences, weights written to " << weights_out
            << "\n";
  return kExitOk;
}

int run_mhsnn_eval(const CommonOpts& common, const std::string& input,
                   const std::string& weights_path, const std::string& output) {
  ToolConfig cfg = load_tool_config(common);
  MhsnnNetwork net(cfg.mhsnn);
  net.load_weights(weights_path);
  auto suite = load_direction_suite(input);

  std::map<DirectionLabel, std::pair<long long, long long>> counts;
  for (const auto& seq : suite) {
    auto frames = load_gray_sequence(seq.dir, cfg.mhsnn.length, cfg.mhsnn.width);
    auto labels = classify(net, frames, static_cast<int>(frames.size()));
    for (DirectionLabel got : labels) {
      auto& [tp, fp] = counts[seq.label];
      got == seq.label ? ++tp : ++fp;
    }
  }
  write_pcc_csv(output, counts);
  std::cout << "wrote " << output << "\n";
  return kExitOk;
}

int run_codd(const ToolConfig& cfg, const std::string& input, const std::string& output,
             bool oracle, int jobs) {
  auto suite = load_direction_suite(input);

  struct SeqResult {
    DirectionLabel label = DirectionLabel::kNone;
    long long tp = 0, fp = 0;
  };
  std::vector<SeqResult> results(suite.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t k = next.fetch_add(1); k < suite.size(); k = next.fetch_add(1)) {
      const auto& seq = suite[k];
      SeqResult r;
      r.label = seq.label;
      CoddState state;
      BsBackendState backend = cfg.backend;
      backend.kind = BsKind::kFrameDiff;
      backend.previous = GrayFrame{};
      const bool horizontal = seq.label == DirectionLabel::kLeftwards ||
                              seq.label == DirectionLabel::kRightwards;
      const auto frame_paths = list_frames((fs::path(seq.dir) / "input").string());
      for (size_t t = 0; t < frame_paths.size(); ++t) {
        std::vector<std::uint8_t> mask;
        int w = 0, h = 0;
        if (oracle) {
          char name[32];
          std::snprintf(name, sizeof(name), "gt%06zu.png", t + 1);
          GtFrame gt = load_gt_frame((fs::path(seq.dir) / "groundtruth" / name).string());
          w = gt.width;
          h = gt.height;
          mask.resize(gt.labels.size());
          for (size_t i = 0; i < mask.size(); ++i)
            mask[i] = gt.labels[i] == GtLabel::kMoving ? 1 : 0;
        } else {
          GrayFrame g = to_grayscale(load_image(frame_paths[t]));
          GrayFrame fg = bs_apply(backend, g);
          w = fg.width;
          h = fg.height;
          mask.resize(fg.size());
          for (size_t i = 0; i < mask.size(); ++i) mask[i] = fg.data[i] > 0 ? 1 : 0;
        }
        CoddResult res = codd_direction(mask, w, h, state);
        if (t == 0) continue;  // first frame only primes the centre of mass
        const DirectionLabel got = horizontal ? res.horizontal : res.vertical;
        got == seq.label ? ++r.tp : ++r.fp;
      }
      results[k] = r;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs) - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::map<DirectionLabel, std::pair<long long, long long>> counts;
  for (const auto& r : results) {
    counts[r.label].first += r.tp;
    counts[r.label].second += r.fp;
  }
  write_pcc_csv(output, counts);
  std::cout << "wrote " << output << "\n";
  return kExitOk;
}

int run_bench(const std::string& dataset, const std::vector<std::string>& mask_dirs,
              const std::string& category, const std::string& output,
              const std::string& timing_path) {
  CdnetSequence seq = load_cdnet(dataset);
  std::vector<MetricsReport> reports;
  for (const auto& spec : mask_dirs) {
    // Either NAME=PATH or a bare path (method named after the directory).
    const size_t eq = spec.find('=');
    const std::string mask_dir = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string method =
        eq == std::string::npos ? fs::path(mask_dir).filename().string() : spec.substr(0, eq);
    ConfusionCounts total;
    for (size_t t = 0; t < seq.entries.size(); ++t) {
      if (!seq.in_temporal_roi(seq.entries[t].frame_number)) continue;
      auto [frame, gt] = seq.load(t);
      char name[32];
      std::snprintf(name, sizeof(name), "bin%06d.png", seq.entries[t].frame_number);
      const fs::path mask_path = fs::path(mask_dir) / name;
      if (!fs::exists(mask_path))
        throw IoError("missing mask " + mask_path.string() + " for method " + method);
      GrayFrame m = load_gray(mask_path.string());
      if (m.width != gt.width || m.height != gt.height)
        throw std::invalid_argument("mask dimensions do not match ground truth: " +
                                    mask_path.string());
      std::vector<std::uint8_t> mask(m.size());
      for (size_t i = 0; i < mask.size(); ++i) mask[i] = m.data[i] >= 0.5 ? 1 : 0;
      total += score_frame(mask, gt.width, gt.height, gt);
    }
    reports.push_back(compute_metrics(total, method, category));
  }
  RankTable table = rank_methods(reports);
  BenchTiming timing;
  if (!timing_path.empty()) {
    std::ifstream tf(timing_path);
    if (!tf) throw IoError("cannot read timing file: " + timing_path);
    nlohmann::json j;
    tf >> j;
    if (j.contains("mean_fps")) timing.fps_per_sequence[category] = j["mean_fps"].get<double>();
  }
  emit_report(table, reports, timing, output);
  std::cout << "wrote metrics.csv and summary.json to " << output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SpikeMotion: bio-inspired motion detection toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string input, output, weights, csv_out, backend_flag, mode_flag;
  int jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key=value config file");
    sub->add_option("--jobs", jobs, "parallelism across sequences")->check(CLI::PositiveNumber);
  };
  auto add_backend_mode = [&](CLI::App* sub) {
    sub->add_option("--backend", backend_flag, "background subtraction backend")
        ->check(CLI::IsMember({"diff", "gauss"}));
    sub->add_option("--mode", mode_flag, "SNN compute mode")
        ->check(CLI::IsMember({"dense", "sparse"}));
  };

  auto* hsmd_cmd = app.add_subcommand("hsmd-run", "run the motion-detection pipeline");
  hsmd_cmd->add_option("--input", input, "directory of ordered frames")->required();
  hsmd_cmd->add_option("--output", output, "mask output directory")->required();
  add_common(hsmd_cmd);
  add_backend_mode(hsmd_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture");
  SyntheticSceneSpec spec;
  std::string object_kind = "rect", suite;
  bool oracle_masks = false, wrap = false;
  int per_dir = 75, test_per_dir = 25;
  double drift = 0.0;
  synth_cmd->add_option("--output", output, "fixture directory")->required();
  synth_cmd->add_option("--width", spec.width);
  synth_cmd->add_option("--height", spec.height);
  synth_cmd->add_option("--frames", spec.n_frames);
  synth_cmd->add_option("--object", object_kind)->check(CLI::IsMember({"rect", "disc"}));
  synth_cmd->add_option("--size", spec.object_size);
  synth_cmd->add_option("--vel-i", spec.velocity_i);
  synth_cmd->add_option("--vel-j", spec.velocity_j);
  synth_cmd->add_option("--noise", spec.noise_sigma);
  synth_cmd->add_option("--seed", spec.seed);
  synth_cmd->add_option("--background", spec.background_intensity);
  synth_cmd->add_option("--drift", drift, "background intensity drift per frame");
  synth_cmd->add_option("--object-intensity", spec.object_intensity);
  synth_cmd->add_option("--start-i", spec.start_i);
  synth_cmd->add_option("--start-j", spec.start_j);
  synth_cmd->add_flag("--wrap", wrap, "wrap the object at frame edges");
  synth_cmd->add_flag("--oracle-masks", oracle_masks, "also write perfect masks/");
  synth_cmd->add_option("--suite", suite, "emit a labelled direction suite (mhsnn)");
  synth_cmd->add_option("--per-dir", per_dir, "training sequences per direction");
  synth_cmd->add_option("--test-per-dir", test_per_dir, "test sequences per direction");

  auto* train_cmd = app.add_subcommand("mhsnn-train", "train the direction-sensitive network");
  int iterations = 0;
  bool whiten = false;
  train_cmd->add_option("--input", input, "direction suite root (train split)")->required();
  train_cmd->add_option("--weights-out", weights, "output weights file")->required();
  train_cmd->add_option("--export-csv", csv_out, "also export weights as CSV");
  train_cmd->add_option("--iterations", iterations, "training iterations (default from config)");
  train_cmd->add_flag("--whiten", whiten, "whiten frames before training");
  add_common(train_cmd);

  auto* eval_cmd = app.add_subcommand("mhsnn-eval", "classify a direction suite");
  eval_cmd->add_option("--input", input, "direction suite root (test split)")->required();
  eval_cmd->add_option("--weights", weights, "trained weights file")->required();
  eval_cmd->add_option("--output", output, "PCC/PWC CSV path")->required();
  add_common(eval_cmd);

  auto* codd_cmd = app.add_subcommand("codd-run", "centre-of-mass direction baseline");
  bool oracle = false;
  codd_cmd->add_option("--input", input, "direction suite root")->required();
  codd_cmd->add_option("--output", output, "PCC/PWC CSV path")->required();
  codd_cmd->add_flag("--oracle", oracle, "use ground-truth masks instead of frame diff");
  add_common(codd_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "score masks against ground truth");
  std::vector<std::string> mask_dirs;
  std::string category = "default", timing_path;
  bench_cmd->add_option("--input", input, "CDnet-layout sequence directory")->required();
  bench_cmd
      ->add_option("--masks", mask_dirs,
                   "mask directory, optionally NAME=PATH (repeatable; one method each)")
      ->required();
  bench_cmd->add_option("--category", category, "category name for the report");
  bench_cmd->add_option("--output", output, "report directory")->required();
  bench_cmd->add_option("--timing", timing_path, "timing.json from hsmd-run to embed");
  add_common(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!backend_flag.empty()) common.overrides["backend"] = backend_flag;
    if (!mode_flag.empty()) common.overrides["mode"] = mode_flag;
    if (jobs > 0) common.overrides["jobs"] = std::to_string(jobs);

    if (hsmd_cmd->parsed()) return run_hsmd(common, input, output);
    if (synth_cmd->parsed()) {
      spec.object = object_kind == "disc" ? SynthObject::kDisc : SynthObject::kRectangle;
      spec.background_drift = drift;
      spec.background = drift != 0.0 ? SynthBackground::kDrifting : SynthBackground::kConstant;
      spec.wrap = wrap;
      return run_synth(spec, output, oracle_masks, suite, per_dir, test_per_dir);
    }
    if (train_cmd->parsed())
      return run_mhsnn_train(common, input, weights, csv_out, iterations, whiten);
    if (eval_cmd->parsed()) return run_mhsnn_eval(common, input, weights, output);
    if (codd_cmd->parsed()) {
      ToolConfig cfg = load_tool_config(common);
      return run_codd(cfg, input, output, oracle, cfg.jobs);
    }
    if (bench_cmd->parsed()) return run_bench(input, mask_dirs, category, output, timing_path);
    std::cerr << "unknown subcommand\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
