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

#include "smd/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "smd/image_io.hpp"

namespace fs = std::filesystem;

namespace smd {

GtLabel decode_gt_label(std::uint8_t value) {
  switch (value) {
    case 0: return GtLabel::kStatic;
    case 50: return GtLabel::kShadow;
    case 85: return GtLabel::kNonRoi;
    case 170: return GtLabel::kUnknown;
    case 255: return GtLabel::kMoving;
    default:
      throw std::invalid_argument("decode_gt_label: unknown code " + std::to_string(value));
  }
}

GtFrame load_gt_frame(const std::string& path) {
  GrayFrame g = load_gray(path);
  GtFrame gt(g.width, g.height);
  for (size_t k = 0; k < g.data.size(); ++k) {
    const int code = static_cast<int>(std::lround(g.data[k] * 255.0));
    gt.labels[k] = decode_gt_label(static_cast<std::uint8_t>(code));
  }
  return gt;
}

namespace {

// Parses the trailing integer of names like in000123.jpg; -1 when absent.
int frame_number_of(const fs::path& p) {
  const std::string stem = p.stem().string();
  size_t pos = stem.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(stem[pos - 1]))) --pos;
  if (pos == stem.size()) return -1;
  return std::stoi(stem.substr(pos));
}

bool has_image_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](char c) { return std::tolower(c); });
  return e == ".png" || e == ".jpg" || e == ".jpeg" || e == ".bmp";
}

std::map<int, std::string> scan_frames(const fs::path& dir) {
  std::map<int, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !has_image_ext(entry.path())) continue;
    const int n = frame_number_of(entry.path());
    if (n >= 0) out[n] = entry.path().string();
  }
  return out;
}

}  // namespace

std::pair<RawFrame, GtFrame> CdnetSequence::load(size_t idx) const {
  const Entry& e = entries.at(idx);
  RawFrame frame = load_image(e.input_path);
  GtFrame gt = load_gt_frame(e.gt_path);
  if (!roi.empty()) {
    if (gt.width != roi_width || gt.height != roi_height)
      throw IoError("ROI mask dimensions do not match ground truth");
    for (size_t k = 0; k < gt.labels.size(); ++k)
      if (!roi[k]) gt.labels[k] = GtLabel::kNonRoi;
  }
  return {std::move(frame), std::move(gt)};
}

CdnetSequence load_cdnet(const std::string& path) {
  const fs::path root(path);
  if (!fs::is_directory(root / "input")) throw IoError("missing input/ directory under " + path);
  if (!fs::is_directory(root / "groundtruth"))
    throw IoError("missing groundtruth/ directory under " + path);

  const auto inputs = scan_frames(root / "input");
  const auto gts = scan_frames(root / "groundtruth");
  if (inputs.empty()) throw IoError("no input frames under " + path);

  CdnetSequence seq;
  for (const auto& [n, in_path] : inputs) {
    auto it = gts.find(n);
    if (it == gts.end())
      throw IoError("missing ground-truth frame " + std::to_string(n) + " under " + path);
    seq.entries.push_back({n, in_path, it->second});
  }
  if (inputs.size() != gts.size())
    throw IoError("input/groundtruth frame counts differ under " + path);

  const fs::path troi = root / "temporalROI.txt";
  if (!fs::exists(troi)) throw IoError("missing temporalROI.txt under " + path);
  std::ifstream f(troi);
  int first = 0, last = 0;
  if (!(f >> first >> last)) throw IoError("unparseable temporalROI.txt under " + path);
  seq.temporal_roi = {first, last};

  for (const char* name : {"ROI.bmp", "ROI.png"}) {
    const fs::path roi_path = root / name;
    if (fs::exists(roi_path)) {
      GrayFrame roi = load_gray(roi_path.string());
      seq.roi_width = roi.width;
      seq.roi_height = roi.height;
      seq.roi.resize(roi.size());
      for (size_t k = 0; k < roi.size(); ++k) seq.roi[k] = roi.data[k] > 0.0 ? 1 : 0;
      break;
    }
  }
  return seq;
}

void SyntheticSceneSpec::validate() const {
  if (width < 3 || height < 3) throw std::invalid_argument("synth: frame must be at least 3x3");
  if (n_frames < 1) throw std::invalid_argument("synth: need at least one frame");
  if (object_size < 1) throw std::invalid_argument("synth: object size must be positive");
  if (object_size > width || object_size > height)
    throw std::invalid_argument("synth: object larger than frame");
  if (noise_sigma < 0) throw std::invalid_argument("synth: negative noise sigma");
}

namespace {

// Fixed-algorithm Gaussian sampler (Box-Muller over mt19937_64) so sequences
// are bit-identical across standard library implementations.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() {
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
  }
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

std::vector<std::pair<RawFrame, GtFrame>> synth_generate(const SyntheticSceneSpec& spec) {
  spec.validate();
  GaussianRng rng(spec.seed);
  std::vector<std::pair<RawFrame, GtFrame>> out;
  out.reserve(spec.n_frames);

  const int si = spec.start_i >= 0 ? spec.start_i : (spec.height - spec.object_size) / 2;
  const int sj = spec.start_j >= 0 ? spec.start_j : 0;
  const double radius = spec.object_size / 2.0;

  for (int t = 0; t < spec.n_frames; ++t) {
    long long pi = static_cast<long long>(si) + static_cast<long long>(spec.velocity_i) * t;
    long long pj = static_cast<long long>(sj) + static_cast<long long>(spec.velocity_j) * t;
    if (!spec.wrap) {
      pi = std::clamp<long long>(pi, 0, spec.height - spec.object_size);
      pj = std::clamp<long long>(pj, 0, spec.width - spec.object_size);
    }
    const double bg =
        spec.background_intensity +
        (spec.background == SynthBackground::kDrifting ? spec.background_drift * t : 0.0);

    RawFrame frame(spec.width, spec.height);
    GtFrame gt(spec.width, spec.height, GtLabel::kStatic);
    const double half = (spec.object_size - 1) / 2.0;
    for (int i = 0; i < spec.height; ++i) {
      for (int j = 0; j < spec.width; ++j) {
        // Offset into the object box, unwrapped when the scene wraps.
        long long di = i - pi, dj = j - pj;
        if (spec.wrap) {
          di %= spec.height;
          if (di < 0) di += spec.height;
          dj %= spec.width;
          if (dj < 0) dj += spec.width;
        }
        bool inside;
        if (spec.object == SynthObject::kRectangle) {
          inside = di >= 0 && di < spec.object_size && dj >= 0 && dj < spec.object_size;
        } else {
          const double ddi = di - half;
          const double ddj = dj - half;
          inside = ddi * ddi + ddj * ddj <= radius * radius;
        }
        double v = inside ? spec.object_intensity : bg;
        if (spec.noise_sigma > 0) v += spec.noise_sigma * rng.next();
        v = std::clamp(v, 0.0, 1.0);
        const auto u = static_cast<std::uint8_t>(std::lround(v * 255.0));
        const size_t k = frame.idx(i, j);
        frame.r[k] = frame.g[k] = frame.b[k] = u;
        if (inside) gt.labels[k] = GtLabel::kMoving;
      }
    }
    out.emplace_back(std::move(frame), std::move(gt));
  }
  return out;
}

void synth_export(const std::vector<std::pair<RawFrame, GtFrame>>& scene,
                  const std::string& out_dir, bool oracle_masks) {
  if (scene.empty()) throw std::invalid_argument("synth_export: empty scene");
  const fs::path root(out_dir);
  fs::create_directories(root / "input");
  fs::create_directories(root / "groundtruth");
  if (oracle_masks) fs::create_directories(root / "masks");

  char name[32];
  for (size_t t = 0; t < scene.size(); ++t) {
    const auto& [frame, gt] = scene[t];
    std::snprintf(name, sizeof(name), "in%06zu.png", t + 1);
    GrayFrame gray(frame.width, frame.height);
    // Synthetic frames are grayscale by construction; emit the red plane.
    for (size_t k = 0; k < frame.size(); ++k) gray.data[k] = frame.r[k] / 255.0;
    save_gray_png((root / "input" / name).string(), gray);

    std::snprintf(name, sizeof(name), "gt%06zu.png", t + 1);
    GrayFrame gtg(gt.width, gt.height);
    for (size_t k = 0; k < gt.labels.size(); ++k)
      gtg.data[k] = static_cast<double>(static_cast<std::uint8_t>(gt.labels[k])) / 255.0;
    save_gray_png((root / "groundtruth" / name).string(), gtg);

    if (oracle_masks) {
      std::snprintf(name, sizeof(name), "bin%06zu.png", t + 1);
      std::vector<std::uint8_t> mask(gt.labels.size());
      for (size_t k = 0; k < gt.labels.size(); ++k)
        mask[k] = gt.labels[k] == GtLabel::kMoving ? 1 : 0;
      save_mask_png((root / "masks" / name).string(), gt.width, gt.height, mask);
    }
  }
  std::ofstream f(root / "temporalROI.txt");
  f << 1 << ' ' << scene.size() << '\n';
  if (!f) throw IoError("cannot write temporalROI.txt under " + out_dir);
}

ConfusionCounts score_frame(const std::vector<std::uint8_t>& mask, int width, int height,
                            const GtFrame& gt) {
  if (gt.width != width || gt.height != height ||
      mask.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("score_frame: dimension mismatch");
  ConfusionCounts c;
  for (size_t k = 0; k < mask.size(); ++k) {
    const GtLabel label = gt.labels[k];
    if (label == GtLabel::kNonRoi || label == GtLabel::kUnknown) continue;
    const bool positive = label == GtLabel::kMoving;
    const bool detected = mask[k] != 0;
    if (positive)
      detected ? ++c.tp : ++c.fn;
    else
      detected ? ++c.fp : ++c.tn;
  }
  return c;
}

MetricsReport compute_metrics(const ConfusionCounts& c, const std::string& method,
                              const std::string& category) {
  MetricsReport m;
  m.method = method;
  m.category = category;
  const long long pos = c.tp + c.fn;
  const long long neg = c.tn + c.fp;
  const long long total = c.total();
  if (pos > 0) {
    m.re = static_cast<double>(c.tp) / static_cast<double>(pos);
    m.fnr = 1.0 - m.re;
  } else {
    m.degenerate = true;
  }
  if (neg > 0) {
    m.sp = static_cast<double>(c.tn) / static_cast<double>(neg);
    m.fpr = 1.0 - m.sp;
  } else {
    m.degenerate = true;
  }
  if (total > 0) {
    m.wcr = static_cast<double>(c.fn + c.fp) / static_cast<double>(total);
    m.ccr = 1.0 - m.wcr;
  } else {
    m.degenerate = true;
  }
  if (c.tp + c.fp > 0) {
    m.pr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  } else {
    m.degenerate = true;
  }
  if (m.pr + m.re > 0) {
    m.f1 = 2.0 * m.pr * m.re / (m.pr + m.re);
  } else {
    m.degenerate = true;
  }
  return m;
}

namespace {

constexpr std::array<bool, 8> kDescending = {true, true, false, false, false, true, true, true};

double metric_value(const MetricsReport& m, int metric) {
  switch (metric) {
    case 0: return m.re;
    case 1: return m.sp;
    case 2: return m.fpr;
    case 3: return m.fnr;
    case 4: return m.wcr;
    case 5: return m.ccr;
    case 6: return m.pr;
    default: return m.f1;
  }
}

// Mean-rank assignment: equal values share the average of their positions.
std::map<std::string, double> mean_ranks(std::vector<std::pair<double, std::string>> scored,
                                         bool descending) {
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return descending ? a.first > b.first : a.first < b.first;
    return a.second < b.second;
  });
  std::map<std::string, double> ranks;
  size_t i = 0;
  while (i < scored.size()) {
    size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[scored[k].second] = shared;
    i = j;
  }
  return ranks;
}

}  // namespace

RankTable rank_methods(const std::vector<MetricsReport>& reports) {
  std::set<std::string> method_set, category_set;
  std::map<std::pair<std::string, std::string>, const MetricsReport*> index;
  for (const auto& r : reports) {
    method_set.insert(r.method);
    category_set.insert(r.category);
    if (!index.emplace(std::make_pair(r.method, r.category), &r).second)
      throw std::invalid_argument("rank_methods: duplicate report for " + r.method + "/" +
                                  r.category);
  }
  for (const auto& m : method_set)
    for (const auto& c : category_set)
      if (!index.count({m, c}))
        throw std::invalid_argument("rank_methods: method " + m + " misses category " + c);

  RankTable table;
  table.methods.assign(method_set.begin(), method_set.end());
  table.categories.assign(category_set.begin(), category_set.end());
  for (const auto& cat : table.categories) {
    auto& per_metric = table.ranks[cat];
    for (int metric = 0; metric < 8; ++metric) {
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& m : table.methods)
        scored.emplace_back(metric_value(*index.at({m, cat}), metric), m);
      per_metric[metric] = mean_ranks(std::move(scored), kDescending[metric]);
    }
    for (const auto& m : table.methods) {
      double sum = 0.0;
      for (int metric = 0; metric < 8; ++metric) sum += per_metric[metric].at(m);
      table.r[cat][m] = sum / 8.0;
    }
  }
  for (const auto& m : table.methods) {
    double sum = 0.0;
    for (const auto& cat : table.categories) sum += table.r.at(cat).at(m);
    table.arc[m] = sum / static_cast<double>(table.categories.size());
  }
  return table;
}

void emit_report(const RankTable& table, const std::vector<MetricsReport>& reports,
                 const BenchTiming& timing, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<const MetricsReport*> ordered;
  ordered.reserve(reports.size());
  for (const auto& r : reports) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const MetricsReport* a, const MetricsReport* b) {
    return std::tie(a->method, a->category) < std::tie(b->method, b->category);
  });

  const fs::path csv_path = fs::path(out_dir) / "metrics.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "method,category,re,sp,fpr,fnr,wcr,ccr,pr,f1,r\n";
  char buf[512];
  for (const MetricsReport* r : ordered) {
    const double rank = table.r.at(r->category).at(r->method);
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r->method.c_str(), r->category.c_str(), r->re, r->sp, r->fpr, r->fnr, r->wcr,
                  r->ccr, r->pr, r->f1, rank);
    csv << buf;
  }
  if (!csv) throw IoError("short write on " + csv_path.string());

  nlohmann::json j;
  j["arc"] = nlohmann::json::object();
  for (const auto& [method, arc] : table.arc) j["arc"][method] = arc;
  j["fps"] = nlohmann::json::object();
  for (const auto& [seq, fps] : timing.fps_per_sequence) j["fps"][seq] = fps;
  const fs::path json_path = fs::path(out_dir) / "summary.json";
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << j.dump(2) << '\n';
  if (!js) throw IoError("short write on " + json_path.string());
}

}  // namespace smd
