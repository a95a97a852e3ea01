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

#include "smd/whiten.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace smd {

WhitenModel whiten_fit(const std::vector<GrayFrame>& frames, double epsilon) {
  if (frames.size() < 2) throw std::invalid_argument("whiten_fit: need at least 2 frames");
  if (epsilon <= 0.0) throw std::invalid_argument("whiten_fit: epsilon must be positive");
  const int w = frames[0].width;
  const int h = frames[0].height;
  for (const auto& f : frames)
    if (f.width != w || f.height != h)
      throw std::invalid_argument("whiten_fit: frame dimensions differ");

  const Eigen::Index n = static_cast<Eigen::Index>(w) * h;
  const Eigen::Index m = static_cast<Eigen::Index>(frames.size());
  Eigen::MatrixXd x(m, n);
  for (Eigen::Index r = 0; r < m; ++r)
    x.row(r) = Eigen::Map<const Eigen::VectorXd>(frames[r].data.data(), n);

  Eigen::VectorXd mu = x.colwise().mean();
  x.rowwise() -= mu.transpose();
  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(m - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd scale =
      (eig.eigenvalues().array().max(0.0) + epsilon).rsqrt().matrix();
  Eigen::MatrixXd t =
      eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();

  WhitenModel model;
  model.width = w;
  model.height = h;
  model.epsilon = epsilon;
  model.mean.assign(mu.data(), mu.data() + n);
  model.transform.assign(t.data(), t.data() + n * n);
  return model;
}

GrayFrame whiten_transform(const WhitenModel& model, const GrayFrame& frame) {
  if (frame.width != model.width || frame.height != model.height)
    throw std::invalid_argument("whiten_transform: frame does not match model dimensions");
  const Eigen::Index n = static_cast<Eigen::Index>(model.width) * model.height;
  Eigen::Map<const Eigen::MatrixXd> t(model.transform.data(), n, n);
  Eigen::Map<const Eigen::VectorXd> mu(model.mean.data(), n);
  Eigen::Map<const Eigen::VectorXd> v(frame.data.data(), n);
  Eigen::VectorXd y = t * (v - mu);
  GrayFrame out(model.width, model.height);
  std::copy(y.data(), y.data() + n, out.data.begin());
  return out;
}

GrayFrame whiten_apply(const WhitenModel& model, const GrayFrame& frame) {
  GrayFrame out = whiten_transform(model, frame);
  const auto [lo_it, hi_it] = std::minmax_element(out.data.begin(), out.data.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  // Treat numerically flat output (e.g. from a constant-only model) as
  // degenerate rather than stretching rounding dust across [0,1].
  if (range <= 1e-9) {
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  for (double& v : out.data) v = (v - lo) / range;
  return out;
}

}  // namespace smd
