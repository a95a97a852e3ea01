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

#include "smd/mhsnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "smd/image_io.hpp"

namespace smd {

Topology topology_counts(int l, int w, int m_f, int f_l, int f_w) {
  if (l < 5 || w < 5) throw std::invalid_argument("topology_counts: image must be at least 5x5");
  if (m_f < 0 || f_l < 1 || f_w < 1)
    throw std::invalid_argument("topology_counts: invalid feature/filter counts");
  Topology t{l, w, m_f, f_l, f_w, 0, 0};
  const long long edge = static_cast<long long>(l - 2) * (w - 2);
  const long long map = static_cast<long long>(l - 4) * (w - 4);
  t.n_neurons = edge + 3LL * m_f * map + m_f;
  t.n_synapses = static_cast<long long>(f_l) * f_w * (edge + 3LL * m_f * map) + 4LL * m_f * map;
  return t;
}

const char* to_string(DirectionLabel label) {
  switch (label) {
    case DirectionLabel::kLeftwards: return "leftwards";
    case DirectionLabel::kRightwards: return "rightwards";
    case DirectionLabel::kUpwards: return "upwards";
    case DirectionLabel::kDownwards: return "downwards";
    case DirectionLabel::kNone: return "none";
  }
  return "none";
}

DirectionLabel direction_label_from_string(const std::string& name) {
  if (name == "leftwards") return DirectionLabel::kLeftwards;
  if (name == "rightwards") return DirectionLabel::kRightwards;
  if (name == "upwards") return DirectionLabel::kUpwards;
  if (name == "downwards") return DirectionLabel::kDownwards;
  if (name == "none") return DirectionLabel::kNone;
  throw std::invalid_argument("unknown direction label: " + name);
}

DirectionLabel mirror_horizontal(DirectionLabel label) {
  if (label == DirectionLabel::kLeftwards) return DirectionLabel::kRightwards;
  if (label == DirectionLabel::kRightwards) return DirectionLabel::kLeftwards;
  return label;
}

double resume_window(double s, SynapseKind kind, const ResumeParams& p) {
  if (s <= 0.0) return 0.0;
  const double a = kind == SynapseKind::kExcitatory ? p.a_d : -p.a_d;
  return a * std::exp(-s / p.tau_d);
}

void resume_step(std::span<double> weights,
                 std::span<const std::vector<double>> pre_spike_times, double now,
                 bool out_spike, bool teacher_spike, std::span<const SynapseKind> kinds,
                 const ResumeParams& p) {
  p.validate();
  if (weights.size() != pre_spike_times.size() || weights.size() != kinds.size())
    throw std::invalid_argument("resume_step: span lengths differ");
  for (size_t i = 0; i < weights.size(); ++i) {
    double sum_d = 0.0, sum_l = 0.0;
    for (double t_pre : pre_spike_times[i]) {
      if (t_pre > now) throw std::invalid_argument("resume_step: pre-spike after current time");
      const double s = now - t_pre;
      if (s <= 0.0) continue;
      const double sign = kinds[i] == SynapseKind::kExcitatory ? 1.0 : -1.0;
      sum_d += sign * p.a_d * std::exp(-s / p.tau_d);
      sum_l += sign * p.a_l * std::exp(-s / p.tau_l);
    }
    const double dw = p.lr * ((teacher_spike ? 1.0 : 0.0) * (p.a_bias + sum_d) -
                              (out_spike ? 1.0 : 0.0) * (p.a_bias + sum_l));
    weights[i] += dw;
  }
}

std::vector<std::uint8_t> encode_input(const GrayFrame& frame, double threshold) {
  std::vector<std::uint8_t> spikes(frame.size());
  for (size_t k = 0; k < frame.size(); ++k) spikes[k] = frame.data[k] >= threshold ? 1 : 0;
  return spikes;
}

namespace {

constexpr int kStencilIdx(int di, int dj) { return (di + 1) * 3 + (dj + 1); }

}  // namespace

MhsnnNetwork::MhsnnNetwork(const MhsnnParams& params) : params_(params) {
  params_.validate();
  build();
}

void MhsnnNetwork::build() {
  dog_ = dog_kernel(params_.filter_size, params_.dog_sigma_center, params_.dog_ratio);
  dir_kernels_[0] = directional_kernel(Direction::kLeft, params_.filter_size);
  dir_kernels_[1] = directional_kernel(Direction::kRight, params_.filter_size);
  dir_kernels_[2] = directional_kernel(Direction::kUp, params_.filter_size);
  dir_kernels_[3] = directional_kernel(Direction::kDown, params_.filter_size);

  // Layer-3 stencil: immediate excitation at the centre; delayed inhibition
  // on the centre plus the column (row) the preferred direction heads into.
  // A map translating against the preferred direction lands a delayed spike
  // on a veto tap, so only preferred-direction onsets survive.
  for (int d = 0; d < 4; ++d) {
    l3_exc_w_[d].fill(0.0);
    l3_inh_w_[d].fill(0.0);
    l3_exc_w_[d][kStencilIdx(0, 0)] = params_.l3_gain;
    l3_inh_w_[d][kStencilIdx(0, 0)] = params_.l3_gain;
    for (int k = -1; k <= 1; ++k) {
      switch (d) {
        case 0: l3_inh_w_[d][kStencilIdx(k, -1)] = params_.l3_gain; break;  // leftwards
        case 1: l3_inh_w_[d][kStencilIdx(k, +1)] = params_.l3_gain; break;  // rightwards
        case 2: l3_inh_w_[d][kStencilIdx(-1, k)] = params_.l3_gain; break;  // upwards
        case 3: l3_inh_w_[d][kStencilIdx(+1, k)] = params_.l3_gain; break;  // downwards
      }
    }
  }

  const size_t n1 = static_cast<size_t>(l1_height()) * l1_width();
  const size_t nm = map_size();
  l1_ = LifLayer(n1, params_.lif_feature);
  s1_.assign(n1, 0);
  in_spikes_.assign(static_cast<size_t>(params_.length) * params_.width, 0);
  for (int d = 0; d < params_.m_f; ++d) {
    l2_[d] = LifLayer(nm, params_.lif_feature);
    l3a_[d] = LifLayer(nm, params_.lif_feature);
    l3b_[d] = LifLayer(nm, params_.lif_feature);
    s2_[d].assign(nm, 0);
    s3a_[d].assign(nm, 0);
    s3b_[d].assign(nm, 0);
    s2_prev1_[d].assign(nm, 0);
    s2_prev2_[d].assign(nm, 0);
    for (int g = 0; g < 4; ++g) weights_[d][g].assign(nm, 1.0);
  }
  l4_ = LifLayer(static_cast<size_t>(params_.m_f), params_.lif_output);
  s4_.fill(0);
}

Topology MhsnnNetwork::topology() const {
  return topology_counts(params_.length, params_.width, params_.m_f, params_.filter_size,
                         params_.filter_size);
}

long long MhsnnNetwork::count_neurons() const {
  long long n = static_cast<long long>(l1_.size());
  for (int d = 0; d < params_.m_f; ++d)
    n += static_cast<long long>(l2_[d].size() + l3a_[d].size() + l3b_[d].size());
  n += static_cast<long long>(l4_.size());
  return n;
}

long long MhsnnNetwork::count_synapses() const {
  long long n = 0;
  const int f = params_.filter_size;
  // Input -> L1 and L1 -> L2 receptive fields: valid patches only, so every
  // neuron owns exactly f*f incoming connections.
  n += static_cast<long long>(l1_.size()) * f * f;
  for (int d = 0; d < params_.m_f; ++d) n += static_cast<long long>(l2_[d].size()) * f * f;
  // L2 -> L3 stencils: taps clamp at map borders, so each neuron in both
  // populations again owns f*f connections.
  for (int d = 0; d < params_.m_f; ++d)
    n += static_cast<long long>(l3a_[d].size() + l3b_[d].size()) * f * f;
  // L3 -> L4: every population A/B neuron of the own and the paired
  // direction connects to each cell.
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g) n += static_cast<long long>(weights_[d][g].size());
  return n;
}

void MhsnnNetwork::reset_state() {
  l1_.reset_to_rest();
  l1_.take_spike_counts();
  std::fill(s1_.begin(), s1_.end(), 0);
  std::fill(in_spikes_.begin(), in_spikes_.end(), 0);
  for (int d = 0; d < params_.m_f; ++d) {
    l2_[d].reset_to_rest();
    l3a_[d].reset_to_rest();
    l3b_[d].reset_to_rest();
    l2_[d].take_spike_counts();
    l3a_[d].take_spike_counts();
    l3b_[d].take_spike_counts();
    std::fill(s2_[d].begin(), s2_[d].end(), 0);
    std::fill(s3a_[d].begin(), s3a_[d].end(), 0);
    std::fill(s3b_[d].begin(), s3b_[d].end(), 0);
    std::fill(s2_prev1_[d].begin(), s2_prev1_[d].end(), 0);
    std::fill(s2_prev2_[d].begin(), s2_prev2_[d].end(), 0);
  }
  l4_.reset_to_rest();
  l4_.take_spike_counts();
  s4_.fill(0);
}

int MhsnnNetwork::paired_direction(int direction) const {
  const int paired = direction ^ 1;
  return paired < params_.m_f ? paired : direction;
}

std::span<double> MhsnnNetwork::l4_weights(int direction, int group) {
  return weights_.at(direction).at(group);
}

std::span<const double> MhsnnNetwork::l4_weights(int direction, int group) const {
  return weights_.at(direction).at(group);
}

void MhsnnNetwork::step_frame(const GrayFrame& frame) {
  if (frame.height != params_.length || frame.width != params_.width)
    throw std::invalid_argument("MhsnnNetwork::step_frame: frame size mismatch");
  const int in_w = params_.width;
  for (size_t k = 0; k < frame.size(); ++k)
    in_spikes_[k] = frame.data[k] >= params_.input_threshold ? 1 : 0;

  // Layer 1: edge detection over centre-excitatory/surround-inhibitory
  // receptive fields, stride 1 on valid patches.
  const int h1 = l1_height(), w1 = l1_width();
  scratch_.resize(l1_.size());
  for (int i = 0; i < h1; ++i) {
    for (int j = 0; j < w1; ++j) {
      double c = 0.0;
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
          c += dog_.at(u, v) * in_spikes_[static_cast<size_t>(i + u) * in_w + (j + v)];
      scratch_[static_cast<size_t>(i) * w1 + j] = params_.edge_gain * c;
    }
  }
  l1_.step(scratch_, params_.dt, s1_);

  // Layer 2: directional feature maps.
  const int h2 = map_height(), w2 = map_width();
  scratch_.resize(map_size());
  for (int d = 0; d < params_.m_f; ++d) {
    const Kernel2D& k = dir_kernels_[d];
    for (int i = 0; i < h2; ++i) {
      for (int j = 0; j < w2; ++j) {
        double c = 0.0;
        for (int u = 0; u < 3; ++u)
          for (int v = 0; v < 3; ++v)
            c += k.at(u, v) * s1_[static_cast<size_t>(i + u) * w1 + (j + v)];
        scratch_[static_cast<size_t>(i) * w2 + j] = params_.dir_gain * c;
      }
    }
    l2_[d].step(scratch_, params_.dt, s2_[d]);
  }

  // Layer 3: populations A and B integrate the stencil against the one- and
  // two-step delayed copies of their map.
  std::vector<double> cur_b(map_size());
  for (int d = 0; d < params_.m_f; ++d) {
    for (int i = 0; i < h2; ++i) {
      for (int j = 0; j < w2; ++j) {
        double ca = 0.0, cb = 0.0;
        for (int di = -1; di <= 1; ++di) {
          const int ii = std::clamp(i + di, 0, h2 - 1);
          for (int dj = -1; dj <= 1; ++dj) {
            const int jj = std::clamp(j + dj, 0, w2 - 1);
            const size_t q = static_cast<size_t>(ii) * w2 + jj;
            const int t = kStencilIdx(di, dj);
            const double exc = l3_exc_w_[d][t] * s2_[d][q];
            ca += exc - l3_inh_w_[d][t] * s2_prev1_[d][q];
            cb += exc - l3_inh_w_[d][t] * s2_prev2_[d][q];
          }
        }
        const size_t p = static_cast<size_t>(i) * w2 + j;
        scratch_[p] = ca;
        cur_b[p] = cb;
      }
    }
    l3a_[d].step(scratch_, params_.dt, s3a_[d]);
    l3b_[d].step(cur_b, params_.dt, s3b_[d]);
  }

  // Layer 4: own-direction populations excite, the paired direction inhibits,
  // through the trained weights.
  std::array<double, 4> cur4{};
  for (int d = 0; d < params_.m_f; ++d) {
    const int opp = paired_direction(d);
    double acc = 0.0;
    for (size_t p = 0; p < map_size(); ++p) acc += weights_[d][0][p] * s3a_[d][p];
    for (size_t p = 0; p < map_size(); ++p) acc += weights_[d][1][p] * s3b_[d][p];
    for (size_t p = 0; p < map_size(); ++p) acc -= weights_[d][2][p] * s3a_[opp][p];
    for (size_t p = 0; p < map_size(); ++p) acc -= weights_[d][3][p] * s3b_[opp][p];
    cur4[d] = acc;
  }
  std::array<std::uint8_t, 4> out4{};
  l4_.step(std::span<const double>(cur4.data(), params_.m_f), params_.dt,
           std::span<std::uint8_t>(out4.data(), params_.m_f));
  s4_ = out4;

  for (int d = 0; d < params_.m_f; ++d) {
    s2_prev2_[d] = s2_prev1_[d];
    s2_prev1_[d] = s2_[d];
  }
}

void MhsnnNetwork::save_weights(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write weights file: " + path);
  const char magic[4] = {'M', 'H', 'S', 'N'};
  const std::uint32_t version = 1;
  std::uint64_t n = 0;
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g) n += weights_[d][g].size();
  f.write(magic, 4);
  f.write(reinterpret_cast<const char*>(&version), sizeof(version));
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g)
      f.write(reinterpret_cast<const char*>(weights_[d][g].data()),
              static_cast<std::streamsize>(weights_[d][g].size() * sizeof(double)));
  if (!f) throw IoError("short write on weights file: " + path);
}

void MhsnnNetwork::load_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read weights file: " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), sizeof(version));
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!f || std::memcmp(magic, "MHSN", 4) != 0)
    throw IoError("not a weights file (bad magic): " + path);
  if (version != 1) throw IoError("unsupported weights file version: " + path);
  std::uint64_t expected = 0;
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g) expected += weights_[d][g].size();
  if (n != expected) throw IoError("weights count does not match network: " + path);
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g) {
      f.read(reinterpret_cast<char*>(weights_[d][g].data()),
             static_cast<std::streamsize>(weights_[d][g].size() * sizeof(double)));
    }
  if (!f) throw IoError("truncated weights file: " + path);
}

void MhsnnNetwork::export_weights_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write weights csv: " + path);
  f << "cell,group,index,weight\n";
  char buf[64];
  for (int d = 0; d < params_.m_f; ++d)
    for (int g = 0; g < 4; ++g)
      for (size_t p = 0; p < weights_[d][g].size(); ++p) {
        std::snprintf(buf, sizeof(buf), "%.17g", weights_[d][g][p]);
        f << d << ',' << g << ',' << p << ',' << buf << '\n';
      }
  if (!f) throw IoError("short write on weights csv: " + path);
}

ForwardTrace forward(MhsnnNetwork& net, const std::vector<GrayFrame>& frames) {
  ForwardTrace trace;
  net.reset_state();
  for (const GrayFrame& frame : frames) {
    net.step_frame(frame);
    trace.input.emplace_back(net.input_spikes().begin(), net.input_spikes().end());
    trace.l1.emplace_back(net.l1_spikes().begin(), net.l1_spikes().end());
    std::array<std::vector<std::uint8_t>, 4> l2, l3a, l3b;
    for (int d = 0; d < net.params().m_f; ++d) {
      l2[d].assign(net.l2_spikes(d).begin(), net.l2_spikes(d).end());
      l3a[d].assign(net.l3a_spikes(d).begin(), net.l3a_spikes(d).end());
      l3b[d].assign(net.l3b_spikes(d).begin(), net.l3b_spikes(d).end());
    }
    trace.l2.push_back(std::move(l2));
    trace.l3a.push_back(std::move(l3a));
    trace.l3b.push_back(std::move(l3b));
    trace.l4.push_back(net.l4_spikes());
  }
  return trace;
}

void train(MhsnnNetwork& net, const std::vector<LabelledSequence>& data, const ResumeParams& p,
           int iterations) {
  p.validate();
  if (iterations < 0) throw std::invalid_argument("train: negative iteration count");
  for (const auto& seq : data)
    if (seq.label == DirectionLabel::kNone)
      throw std::invalid_argument("train: sequence without a direction label");

  const int m_f = net.params().m_f;
  const size_t nm = net.map_size();
  for (int d = 0; d < m_f; ++d)
    for (int g = 0; g < 4; ++g) {
      auto w = net.l4_weights(d, g);
      std::fill(w.begin(), w.end(), 1.0);
    }
  if (iterations == 0 || data.empty()) return;

  const double decay_d = std::exp(-net.params().dt / p.tau_d);
  const double decay_l = std::exp(-net.params().dt / p.tau_l);
  // Raw pre-spike traces per population (A then B per direction): after the
  // decay at step t they hold sum over pre-spikes with s > 0 of exp(-s/tau).
  std::vector<std::vector<double>> trace_d(2 * m_f, std::vector<double>(nm, 0.0));
  std::vector<std::vector<double>> trace_l(2 * m_f, std::vector<double>(nm, 0.0));

  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (const LabelledSequence& seq : data) {
      const int label_d = static_cast<int>(seq.label);
      net.reset_state();
      for (auto& t : trace_d) std::fill(t.begin(), t.end(), 0.0);
      for (auto& t : trace_l) std::fill(t.begin(), t.end(), 0.0);

      for (size_t t = 0; t < seq.frames.size(); ++t) {
        net.step_frame(seq.frames[t]);
        for (auto& tr : trace_d)
          for (double& v : tr) v *= decay_d;
        for (auto& tr : trace_l)
          for (double& v : tr) v *= decay_l;

        for (int d = 0; d < m_f; ++d) {
          const bool teacher = d == label_d && t >= 1;
          const bool out = net.l4_spikes()[d] != 0;
          if (teacher == out) continue;
          changed = true;
          const int opp = net.paired_direction(d);
          const double t_term = teacher ? 1.0 : 0.0;
          const double o_term = out ? 1.0 : 0.0;
          for (int g = 0; g < 4; ++g) {
            const int pop = (g == 0) ? d : (g == 1) ? m_f + d : (g == 2) ? opp : m_f + opp;
            const double sign = g < 2 ? 1.0 : -1.0;
            auto w = net.l4_weights(d, g);
            const std::vector<double>& td = trace_d[pop];
            const std::vector<double>& tl = trace_l[pop];
            for (size_t q = 0; q < nm; ++q) {
              const double dw = p.lr * (t_term * (p.a_bias + sign * p.a_d * td[q]) -
                                        o_term * (p.a_bias + sign * p.a_l * tl[q]));
              // Weights are efficacies; the synapse type carries the sign.
              w[q] = std::max(0.0, w[q] + dw);
            }
          }
        }

        for (int d = 0; d < m_f; ++d) {
          auto sa = net.l3a_spikes(d);
          auto sb = net.l3b_spikes(d);
          for (size_t q = 0; q < nm; ++q) {
            trace_d[d][q] += sa[q];
            trace_l[d][q] += sa[q];
            trace_d[m_f + d][q] += sb[q];
            trace_l[m_f + d][q] += sb[q];
          }
        }
      }
    }
    if (!changed) break;  // converged: further passes are no-ops
  }
}

std::vector<DirectionLabel> classify(MhsnnNetwork& net, const std::vector<GrayFrame>& frames,
                                     int window) {
  if (window < 1) throw std::invalid_argument("classify: window must be >= 1");
  net.reset_state();
  std::vector<DirectionLabel> labels;
  std::array<std::uint64_t, 4> counts{};
  int in_window = 0;
  auto flush = [&]() {
    const int m_f = net.params().m_f;
    std::uint64_t best = 0;
    int best_d = -1;
    bool tie = false;
    for (int d = 0; d < m_f; ++d) {
      if (counts[d] > best) {
        best = counts[d];
        best_d = d;
        tie = false;
      } else if (counts[d] == best && best > 0) {
        tie = true;
      }
    }
    labels.push_back(best == 0 || tie || best_d < 0 ? DirectionLabel::kNone
                                                    : static_cast<DirectionLabel>(best_d));
    counts.fill(0);
    in_window = 0;
  };
  for (const GrayFrame& frame : frames) {
    net.step_frame(frame);
    for (int d = 0; d < net.params().m_f; ++d) counts[d] += net.l4_spikes()[d];
    if (++in_window == window) flush();
  }
  if (in_window > 0) flush();
  return labels;
}

}  // namespace smd
