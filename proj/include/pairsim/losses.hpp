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

#include <optional>
#include <string_view>
#include <vector>

#include "pairsim/simcore.hpp"

namespace pairsim {

/// Scale factor and margin of the unified pair loss.
struct UnifiedParams {
  double gamma = 1.0;
  double m = 0.0;
};

enum class SimilarityKind { cosine, inner_product };

/// Circle loss hyper-parameters: scale, optima (Op, On) and margins (Dp, Dn).
///
/// The reduced form is built from (gamma, m) alone with Op = 1 + m,
/// On = -m, Dp = 1 - m and Dn = m. The general form takes all four
/// anchors explicitly and needs Op >= Dp and Dn >= On.
class CircleParams {
 public:
  static CircleParams reduced(double gamma, double m);
  static CircleParams general(double gamma, double optimum_p, double optimum_n,
                              double delta_p, double delta_n);

  double gamma() const noexcept { return gamma_; }
  /// Relaxation factor; only meaningful in reduced mode.
  double m() const noexcept { return m_; }
  double optimum_p() const noexcept { return optimum_p_; }
  double optimum_n() const noexcept { return optimum_n_; }
  double delta_p() const noexcept { return delta_p_; }
  double delta_n() const noexcept { return delta_n_; }
  bool is_reduced() const noexcept { return reduced_; }

 private:
  CircleParams() = default;

  double gamma_ = 0.0;
  double m_ = 0.0;
  double optimum_p_ = 0.0;
  double optimum_n_ = 0.0;
  double delta_p_ = 0.0;
  double delta_n_ = 0.0;
  bool reduced_ = true;
};

/// Self-paced weights alpha_p = [Op - sp]_+ and alpha_n = [sn - On]_+.
struct CircleWeights {
  std::vector<double> alpha_p;
  std::vector<double> alpha_n;
};

enum class LossId { circle, am_softmax, normface, softmax, triplet, unified };

std::string_view to_string(LossId id);
std::optional<LossId> parse_loss_id(std::string_view name);
/// Comma-separated list of every loss name, for usage messages.
std::string_view loss_id_names();

/// A loss selection plus its two scalar knobs. Losses that fix gamma or m
/// (normface, softmax, triplet) ignore the irrelevant fields.
struct LossConfig {
  LossId id = LossId::circle;
  double gamma = 256.0;
  double m = 0.25;
};

/// log(1 + sum_j exp(gamma (sn_j + m)) * sum_i exp(-gamma sp_i)).
double unified_loss(const SimilarityGroup& group, const UnifiedParams& params);

/// -log softmax of the margin-penalised target logit gamma (sp - m) against
/// the non-target logits gamma sn_j. With m = 0 this is NormFace; with
/// `kind == inner_product`, gamma = 1 and m = 0 it is plain softmax
/// cross-entropy.
double am_softmax_loss(double sp, std::span<const double> sn,
                       const UnifiedParams& params,
                       SimilarityKind kind = SimilarityKind::cosine);

/// max(0, max_j sn_j - min_i sp_i + m).
double triplet_hard_loss(const SimilarityGroup& group, double m);

CircleWeights circle_weights(const SimilarityGroup& group, const CircleParams& params);

double circle_loss(const SimilarityGroup& group, const CircleParams& params);

/// Circle loss with externally supplied weights, i.e. the weights are held
/// constant instead of being recomputed from the scores.
double circle_loss_frozen(const SimilarityGroup& group, const CircleParams& params,
                          const CircleWeights& weights);

/// |(1/gamma) log(1 + sum_ij exp(gamma (sn_j - sp_i + m))) - triplet_hard_loss|.
/// Bounded above by log(1 + K L) / gamma.
double unified_to_triplet_gap(const SimilarityGroup& group, double m, double gamma);

}  // namespace pairsim
