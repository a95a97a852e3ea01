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

#ifndef SMD_BENCH_HPP_
#define SMD_BENCH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smd/frame.hpp"

namespace smd {

/// Five-valued change-detection ground-truth label, stored as its grayscale
/// code.
enum class GtLabel : std::uint8_t {
  kStatic = 0,
  kShadow = 50,
  kNonRoi = 85,
  kUnknown = 170,
  kMoving = 255,
};

/// Decodes a grayscale code; any other value is an error.
GtLabel decode_gt_label(std::uint8_t value);

struct GtFrame {
  int width = 0;
  int height = 0;
  std::vector<GtLabel> labels;

  GtFrame() = default;
  GtFrame(int w, int h, GtLabel fill = GtLabel::kStatic)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}
  GtLabel at(int i, int j) const { return labels[static_cast<size_t>(i) * width + j]; }
  GtLabel& at(int i, int j) { return labels[static_cast<size_t>(i) * width + j]; }
};

struct ConfusionCounts {
  long long tp = 0, tn = 0, fp = 0, fn = 0;
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  long long total() const { return tp + tn + fp + fn; }
};

/// The eight change-detection metrics for one method and category.
/// Complementary metrics (fnr, fpr, wcr) are emitted as exact complements of
/// their rational partners, so re+fnr, sp+fpr and wcr+ccr equal 1 exactly.
struct MetricsReport {
  double re = 0, sp = 0, fpr = 0, fnr = 0, wcr = 0, ccr = 0, pr = 0, f1 = 0;
  std::string method;
  std::string category;
  bool degenerate = false;  // a zero denominator was replaced by 0
};

/// Per-metric ranks plus the aggregates R (per category) and ARC.
struct RankTable {
  std::vector<std::string> methods;     // sorted
  std::vector<std::string> categories;  // sorted
  // ranks[category][metric 0..7][method] with metrics ordered
  // re, sp, fpr, fnr, wcr, ccr, pr, f1
  std::map<std::string, std::array<std::map<std::string, double>, 8>> ranks;
  std::map<std::string, std::map<std::string, double>> r;  // r[category][method]
  std::map<std::string, double> arc;                       // arc[method]
};

/// One CDnet-layout sequence: paired input/ and groundtruth/ files, the
/// temporal region of interest and an optional spatial ROI mask.
struct CdnetSequence {
  struct Entry {
    int frame_number = 0;  // 1-based, from the file name
    std::string input_path;
    std::string gt_path;
  };
  std::vector<Entry> entries;
  std::pair<int, int> temporal_roi{1, 0};  // inclusive frame numbers
  std::vector<std::uint8_t> roi;           // empty, or nonzero = inside ROI
  int roi_width = 0, roi_height = 0;

  bool in_temporal_roi(int frame_number) const {
    return frame_number >= temporal_roi.first && frame_number <= temporal_roi.second;
  }
  /// Loads one frame pair; gt pixels outside the spatial ROI become NonROI.
  std::pair<RawFrame, GtFrame> load(size_t idx) const;
};

/// Scans a directory with input/ and groundtruth/ subdirectories, pairs
/// frames by index and parses temporalROI.txt. Throws IoError on missing
/// pieces, naming the offending index where applicable.
CdnetSequence load_cdnet(const std::string& path);

/// Reads one ground-truth PNG and decodes the five label codes.
GtFrame load_gt_frame(const std::string& path);

enum class SynthObject { kRectangle, kDisc };
enum class SynthBackground { kConstant, kDrifting };

/// Deterministic moving-object scene with exact per-pixel ground truth.
struct SyntheticSceneSpec {
  int width = 320;
  int height = 240;
  SynthObject object = SynthObject::kRectangle;
  int object_size = 20;  // rectangle side / disc diameter
  int velocity_i = 0;    // rows per frame
  int velocity_j = 2;    // columns per frame
  int n_frames = 200;
  SynthBackground background = SynthBackground::kConstant;
  double background_intensity = 0.2;
  double background_drift = 0.0;  // intensity per frame when drifting
  double object_intensity = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int start_i = -1;  // -1 centres the object vertically
  int start_j = -1;  // -1 starts at the left margin
  bool wrap = false;

  void validate() const;
};

/// Generates the scene. Ground truth is Moving exactly where the object is
/// rendered and Static elsewhere; noise never touches the ground truth.
std::vector<std::pair<RawFrame, GtFrame>> synth_generate(const SyntheticSceneSpec& spec);

/// Writes a generated scene in the CDnet layout (input/, groundtruth/,
/// temporalROI.txt); optionally an oracle masks/ directory mirroring the
/// Moving pixels.
void synth_export(const std::vector<std::pair<RawFrame, GtFrame>>& scene,
                  const std::string& out_dir, bool oracle_masks = false);

/// Scores one binary mask against ground truth. NonROI and Unknown pixels
/// are excluded from every count; Moving is the positive class; Static and
/// Shadow are the negative class.
ConfusionCounts score_frame(const std::vector<std::uint8_t>& mask, int width, int height,
                            const GtFrame& gt);

/// The eight metric formulas. Zero denominators yield 0 and set the
/// degenerate flag.
MetricsReport compute_metrics(const ConfusionCounts& c, const std::string& method = "",
                              const std::string& category = "");

/// Ranks every method per category and metric (descending for re, sp, ccr,
/// pr, f1; ascending for fpr, fnr, wcr), ties sharing the mean rank; R is
/// the mean rank over the 8 metrics and ARC the mean of R over categories.
RankTable rank_methods(const std::vector<MetricsReport>& reports);

/// Optional throughput numbers embedded in the JSON summary.
struct BenchTiming {
  std::map<std::string, double> fps_per_sequence;
};

/// Writes metrics.csv (method,category,re,sp,fpr,fnr,wcr,ccr,pr,f1,r) and
/// summary.json ({"arc": ..., "fps": ...}) with deterministic ordering.
void emit_report(const RankTable& table, const std::vector<MetricsReport>& reports,
                 const BenchTiming& timing, const std::string& out_dir);

}  // namespace smd

#endif  // SMD_BENCH_HPP_
