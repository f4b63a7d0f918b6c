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

#pragma once

#include <cstddef>
#include <vector>

#include "pairsim/losses.hpp"

namespace pairsim {

/// Loss value with its gradient over the similarity scores.
/// `z` is the attenuation prefactor 1 - exp(-value).
struct LossGrad {
  double value = 0.0;
  std::vector<double> d_sp;
  std::vector<double> d_sn;
  double z = 0.0;
};

/// Circle loss gradient with the self-paced weights treated as constants
/// during back-propagation:
///
///   dL/dsn_j = Z softmax_j(gamma (sn^2 - m^2)) gamma (sn_j + m)
///   dL/dsp_i = Z softmax_i(gamma ((sp - 1)^2 - m^2)) gamma (sp_i - 1 - m)
///
/// Entries whose weight is cut off contribute logit 0 to the softmax and get
/// a zero gradient. Only the reduced parameterization is accepted.
LossGrad circle_grad(const SimilarityGroup& group, const CircleParams& params);

/// Exact gradient of unified_loss. For K = L = 1, d_sp == -d_sn.
LossGrad unified_grad(const SimilarityGroup& group, const UnifiedParams& params);

/// Subgradient of triplet_hard_loss: +1 on the hardest negative, -1 on the
/// hardest positive while the hinge is active (first index wins ties), 0
/// otherwise.
LossGrad triplet_grad(const SimilarityGroup& group, double m);

/// Dispatches on cfg.id. am_softmax and unified evaluate the unified loss
/// (which is the AM-Softmax expression when K = 1); normface pins m = 0;
/// softmax pins gamma = 1, m = 0.
LossGrad loss_and_grad(const LossConfig& cfg, const SimilarityGroup& group);
double loss_value(const LossConfig& cfg, const SimilarityGroup& group);

enum class FdMode {
  frozen,  // circle weights held at their unperturbed values
  full,    // differentiate through the weights as well
};

struct FdReport {
  /// max_k |analytic_k - numeric_k| / max(|analytic|_inf, |numeric|_inf)
  /// over the compared entries.
  double max_rel_error = 0.0;
  std::size_t compared = 0;
  std::size_t excluded = 0;
};

/// Central finite differences of the scalar loss with respect to every
/// similarity entry, compared against loss_and_grad. Entries within `eps`
/// of a cut-off or hinge kink are excluded.
FdReport fd_check(const LossConfig& cfg, const SimilarityGroup& group, double eps = 1e-5,
                  FdMode mode = FdMode::frozen);

}  // namespace pairsim
