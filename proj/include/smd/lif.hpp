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

#ifndef SMD_LIF_HPP_
#define SMD_LIF_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace smd {

/// Leaky integrate-and-fire parameters. Units are mV / ms / MOhm / nA, so
/// r_m * current is in mV directly. c_m is carried for configuration
/// completeness; the integrator is driven by tau_m.
struct LifParams {
  double c_m = 10.0;      // pF
  double r_m = 1.0;       // MOhm
  double e_l = -55.0;     // mV, resting potential
  double v_reset = -70.0; // mV
  double v_min = -70.0;   // mV, floor potential
  double v_th = -50.0;    // mV, threshold
  double tau_m = 10.0;    // ms
  double t_ref = 2.0;     // ms, refractory period

  void validate() const {
    if (!(tau_m > 0.0)) throw std::invalid_argument("LifParams: tau_m must be positive");
    if (!(r_m > 0.0)) throw std::invalid_argument("LifParams: r_m must be positive");
    if (!(c_m > 0.0)) throw std::invalid_argument("LifParams: c_m must be positive");
    if (!(t_ref >= 0.0)) throw std::invalid_argument("LifParams: t_ref must be non-negative");
    if (!(v_min <= v_reset && v_reset <= e_l && e_l < v_th))
      throw std::invalid_argument("LifParams: require v_min <= v_reset <= e_l < v_th");
  }
};

/// One forward-Euler update of a single neuron. Shared by the vectorised
/// layer step and the per-pixel sparse path so both produce identical bits.
/// Returns true when the neuron fires.
inline bool lif_step_neuron(const LifParams& p, double dt, double current, double& v,
                            double& refractory_left) {
  if (refractory_left > 0.0) {
    refractory_left = refractory_left > dt ? refractory_left - dt : 0.0;
    return false;
  }
  double u = v + (dt / p.tau_m) * ((p.e_l - v) + p.r_m * current);
  if (u < p.v_min) u = p.v_min;
  if (u >= p.v_th) {
    v = p.v_reset;
    refractory_left = p.t_ref;
    return true;
  }
  v = u;
  return false;
}

/// A homogeneous population of LIF neurons with per-neuron potential,
/// remaining refractory time and a spike tally. Mutating one layer from
/// several threads is not allowed; the per-neuron work inside step() is
/// partitioned internally and is partition-invariant.
class LifLayer {
 public:
  LifLayer() = default;
  LifLayer(size_t n, const LifParams& params);

  size_t size() const { return v_.size(); }
  const LifParams& params() const { return params_; }
  std::span<const double> potentials() const { return v_; }
  std::span<const double> refractory_left() const { return refractory_; }
  std::span<const std::uint32_t> spike_counts() const { return spike_count_; }

  /// OpenMP-parallel Euler step. Writes per-neuron spike flags to spikes_out.
  void step(std::span<const double> currents, double dt, std::span<std::uint8_t> spikes_out);

  /// Serial reference step, kept for equivalence testing against step().
  void step_serial(std::span<const double> currents, double dt,
                   std::span<std::uint8_t> spikes_out);

  /// Convenience wrapper returning freshly allocated flags.
  std::vector<std::uint8_t> step(std::span<const double> currents, double dt);

  /// Returns the tallies accumulated since the previous call and zeroes them.
  std::vector<std::uint32_t> take_spike_counts();

  /// Resets every neuron to rest: v = e_l, no refractory, tallies kept.
  void reset_to_rest();

  // Direct state access for the per-pixel sparse path.
  double* v_data() { return v_.data(); }
  double* refractory_data() { return refractory_.data(); }
  std::uint32_t* count_data() { return spike_count_.data(); }

 private:
  void check_step_args(std::span<const double> currents, double dt,
                       std::span<std::uint8_t> spikes_out) const;

  LifParams params_;
  std::vector<double> v_;
  std::vector<double> refractory_;
  std::vector<std::uint32_t> spike_count_;
};

}  // namespace smd

#endif  // SMD_LIF_HPP_
