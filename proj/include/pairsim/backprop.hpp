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

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pairsim/grads.hpp"
#include "pairsim/model.hpp"

namespace pairsim {

enum class Paradigm {
  class_level,  // similarities against the class weight vectors
  pair_wise,    // similarities between samples of the batch
};

std::string_view to_string(Paradigm p);
std::optional<Paradigm> parse_paradigm(std::string_view name);

struct Batch {
  Eigen::MatrixXd features;  // B x Din
  std::vector<int> labels;
};

/// One anchor's similarity group and where each score came from. In the
/// class-level paradigm `positives`/`negatives` hold class indices, in the
/// pair-wise paradigm batch row indices.
struct AnchorGroup {
  int anchor = 0;
  std::vector<int> positives;
  std::vector<int> negatives;
  SimilarityGroup group;
};

using GroupLoss = std::function<LossGrad(const SimilarityGroup&)>;

struct BatchGrad {
  double loss = 0.0;     // mean over anchors
  double mean_sp = 0.0;  // mean over every within-class score of the batch
  double mean_sn = 0.0;  // mean over every between-class score of the batch
  std::size_t anchors = 0;
  ModelGrads grads;
};

/// Plain softmax is the only loss evaluated on raw inner products.
SimilarityKind similarity_kind_for(LossId id);

/// Forward pass only. Pair-wise anchors with no positive or no negative in
/// the batch are skipped.
std::vector<AnchorGroup> batch_groups(const EmbeddingModel& model, const Batch& batch,
                                      Paradigm paradigm, SimilarityKind kind);

/// Chains each anchor's LossGrad through the similarity map (cosine
/// Jacobian (u_other - s u_self) / |e_self| in the cosine regime) and the
/// dense layers. Gradients are averaged over anchors; the reduction order
/// is fixed.
BatchGrad backprop_to_params(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm,
                             SimilarityKind kind, const GroupLoss& loss);
BatchGrad backprop_to_params(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm,
                             const LossConfig& cfg);

}  // namespace pairsim
