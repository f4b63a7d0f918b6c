// Copyright 2026 The pairsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stable exponential-family primitives shared by the loss and gradient code.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pairsim::detail {

/// log(sum_k exp(t_k)) with max-shift. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> t) {
  if (t.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(t.begin(), t.end());
  double acc = 0.0;
  for (double v : t) acc += std::exp(v - top);
  return top + std::log(acc);
}

/// Normalised exp(t_k - LSE(t)).
inline std::vector<double> softmax(std::span<const double> t) {
  std::vector<double> w(t.size());
  if (t.empty()) return w;
  const double top = *std::max_element(t.begin(), t.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    w[k] = std::exp(t[k] - top);
    acc += w[k];
  }
  for (double& v : w) v /= acc;
  return w;
}

/// log(1 + exp(t)).
inline double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

/// 1 / (1 + exp(-t)) == 1 - exp(-softplus(t)).
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace pairsim::detail
