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

#ifndef SMD_MHSNN_HPP_
#define SMD_MHSNN_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smd/frame.hpp"
#include "smd/imaging.hpp"
#include "smd/lif.hpp"

namespace smd {

/// Network size bookkeeping for an L x W input with m_f movement features
/// and f_l x f_w receptive fields.
struct Topology {
  int l = 0, w = 0, m_f = 0, f_l = 0, f_w = 0;
  long long n_neurons = 0;
  long long n_synapses = 0;
};

/// N_N = (L-2)(W-2) + 3*M_f*(L-4)(W-4) + M_f
/// N_S = F_L*F_W*[(L-2)(W-2) + 3*M_f*(L-4)(W-4)] + 4*M_f*(L-4)(W-4)
Topology topology_counts(int l, int w, int m_f, int f_l, int f_w);

enum class DirectionLabel { kLeftwards, kRightwards, kUpwards, kDownwards, kNone };

const char* to_string(DirectionLabel label);
DirectionLabel direction_label_from_string(const std::string& name);
/// Swaps leftwards/rightwards; other labels unchanged.
DirectionLabel mirror_horizontal(DirectionLabel label);

enum class SynapseKind { kExcitatory, kInhibitory };

/// Remote-supervision learning windows and update scale. The d-window pairs
/// with teacher spikes, the l-window with output spikes.
struct ResumeParams {
  double a_d = 0.01;
  double a_l = 0.01;
  double tau_d = 20.0;  // ms
  double tau_l = 20.0;  // ms
  double a_bias = 0.01;
  double lr = 1.0;

  void validate() const {
    if (!(tau_d > 0.0) || !(tau_l > 0.0))
      throw std::invalid_argument("ResumeParams: time constants must be positive");
  }
};

/// W(s) = A exp(-s/tau) for s > 0, else 0. A = +a_d for excitatory
/// synapses, -a_d for inhibitory ones (the teacher-side window; the
/// output-side window uses a_l/tau_l inside resume_step).
double resume_window(double s, SynapseKind kind, const ResumeParams& p);

/// One remote-supervision update over a synapse group:
///   dw = lr * [teacher*(a_bias + sum_pre W_d(now - t_pre))
///              - out*(a_bias + sum_pre W_l(now - t_pre))]
/// which reduces to lr*(teacher - out)*(a_bias + sum_pre W(now - t_pre))
/// when the two windows coincide. Spike times must not exceed `now`.
void resume_step(std::span<double> weights,
                 std::span<const std::vector<double>> pre_spike_times, double now,
                 bool out_spike, bool teacher_spike, std::span<const SynapseKind> kinds,
                 const ResumeParams& p);

/// Parameters of the four-layer direction-sensitive network.
struct MhsnnParams {
  int length = 40;  // input rows
  int width = 40;   // input columns
  int m_f = 4;      // movement features; 4 = left/right/up/down
  int filter_size = 3;
  double input_threshold = 0.85;
  double dog_sigma_center = 0.5;
  double dog_ratio = 1.6;
  // Feature-layer current scales. Large enough that any nonzero
  // receptive-field response refires a just-reset neuron within one step,
  // so sustained stimuli produce sustained (not oscillating) spike trains.
  double edge_gain = 1000.0;  // L1 receptive fields
  double dir_gain = 1000.0;   // L2 receptive fields
  double l3_gain = 1000.0;    // L3 stencils
  double dt = 1.0;          // ms; one step per frame
  LifParams lif_feature;    // layers 1-3
  LifParams lif_output;     // layer 4 direction cells
  ResumeParams resume;
  int train_iterations = 10000;

  MhsnnParams() {
    lif_feature.e_l = 0.0;
    lif_feature.v_reset = -1.0;
    lif_feature.v_min = -1.0;
    lif_feature.v_th = 1e-3;
    lif_feature.tau_m = 10.0;
    lif_feature.r_m = 1.0;
    lif_feature.t_ref = 0.0;
    lif_output = lif_feature;
    lif_output.v_th = 30.0;
  }

  void validate() const {
    if (length < 5 || width < 5)
      throw std::invalid_argument("MhsnnParams: input must be at least 5x5");
    if (m_f < 1 || m_f > 4) throw std::invalid_argument("MhsnnParams: m_f must be in [1,4]");
    if (filter_size != 3) throw std::invalid_argument("MhsnnParams: only 3x3 filters supported");
    lif_feature.validate();
    lif_output.validate();
    resume.validate();
  }
};

/// Spike where intensity >= threshold.
std::vector<std::uint8_t> encode_input(const GrayFrame& frame, double threshold = 0.85);

/// Per-frame spike rasters for every layer.
struct ForwardTrace {
  std::vector<std::vector<std::uint8_t>> input;  // [frame][pixel]
  std::vector<std::vector<std::uint8_t>> l1;
  std::vector<std::array<std::vector<std::uint8_t>, 4>> l2;
  std::vector<std::array<std::vector<std::uint8_t>, 4>> l3a;
  std::vector<std::array<std::vector<std::uint8_t>, 4>> l3b;
  std::vector<std::array<std::uint8_t, 4>> l4;
};

/// The direction-sensitive network. Layer 1 detects edges through
/// centre-excitatory/surround-inhibitory receptive fields; Layer 2 extracts
/// four directional feature maps; Layer 3 holds two populations whose
/// delayed inhibition (one and two steps) vetoes null-direction motion;
/// Layer 4 holds one trained cell per direction, excited by its own
/// populations and inhibited by the opposing ones.
class MhsnnNetwork {
 public:
  explicit MhsnnNetwork(const MhsnnParams& params);

  const MhsnnParams& params() const { return params_; }
  Topology topology() const;

  /// Brute-force enumeration of constructed neurons/synapses. Walks the same
  /// receptive-field iteration the forward pass uses.
  long long count_neurons() const;
  long long count_synapses() const;

  /// Clears membrane state, delay buffers and spike tallies. Keeps weights.
  void reset_state();

  /// Advances the network by one simulation step on one frame.
  void step_frame(const GrayFrame& frame);

  // Spike planes from the most recent step.
  std::span<const std::uint8_t> input_spikes() const { return in_spikes_; }
  std::span<const std::uint8_t> l1_spikes() const { return s1_; }
  std::span<const std::uint8_t> l2_spikes(int d) const { return s2_[d]; }
  std::span<const std::uint8_t> l3a_spikes(int d) const { return s3a_[d]; }
  std::span<const std::uint8_t> l3b_spikes(int d) const { return s3b_[d]; }
  const std::array<std::uint8_t, 4>& l4_spikes() const { return s4_; }

  int l1_height() const { return params_.length - 2; }
  int l1_width() const { return params_.width - 2; }
  int map_height() const { return params_.length - 4; }
  int map_width() const { return params_.width - 4; }
  size_t map_size() const { return static_cast<size_t>(map_height()) * map_width(); }

  // Trained Layer-4 weights. Groups: 0 = own population A, 1 = own B,
  // 2 = opposing A, 3 = opposing B. Opposing groups act through inhibitory
  // synapses.
  std::span<double> l4_weights(int direction, int group);
  std::span<const double> l4_weights(int direction, int group) const;
  int paired_direction(int direction) const;

  void save_weights(const std::string& path) const;
  void load_weights(const std::string& path);
  void export_weights_csv(const std::string& path) const;

 private:
  void build();

  MhsnnParams params_;
  Kernel2D dog_;
  std::array<Kernel2D, 4> dir_kernels_;
  // L3 stencil weight pairs over the 3x3 receptive field: an immediate
  // excitatory tap at the centre and delayed inhibitory taps on the centre
  // plus the column/row the preferred motion heads into.
  std::array<std::array<double, 9>, 4> l3_exc_w_;
  std::array<std::array<double, 9>, 4> l3_inh_w_;

  LifLayer l1_;
  std::array<LifLayer, 4> l2_, l3a_, l3b_;
  LifLayer l4_;

  std::vector<std::uint8_t> in_spikes_, s1_;
  std::array<std::vector<std::uint8_t>, 4> s2_, s3a_, s3b_;
  std::array<std::vector<std::uint8_t>, 4> s2_prev1_, s2_prev2_;
  std::array<std::uint8_t, 4> s4_{};

  // weights_[d][group] has map_size() entries.
  std::array<std::array<std::vector<double>, 4>, 4> weights_;

  std::vector<double> scratch_;
};

struct LabelledSequence {
  std::vector<GrayFrame> frames;
  DirectionLabel label = DirectionLabel::kNone;
};

/// Runs the network over a sequence and records every layer's spikes.
ForwardTrace forward(MhsnnNetwork& net, const std::vector<GrayFrame>& frames);

/// Remote-supervision training of the Layer-4 weights. Weights start at 1.0;
/// one iteration presents every labelled sequence once, in order. The
/// teacher of the matching direction cell fires on every step after the
/// first frame. Other layers stay frozen. Deterministic given data order;
/// stops early once a full pass no longer changes any weight.
void train(MhsnnNetwork& net, const std::vector<LabelledSequence>& data, const ResumeParams& p,
           int iterations);

/// Argmax of Layer-4 spike counts per window of `window` frames; ties and
/// all-silent windows resolve to none.
std::vector<DirectionLabel> classify(MhsnnNetwork& net, const std::vector<GrayFrame>& frames,
                                     int window);

}  // namespace smd

#endif  // SMD_MHSNN_HPP_
