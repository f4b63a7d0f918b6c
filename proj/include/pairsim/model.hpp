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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pairsim {

enum class Activation { none, relu, tanh };

std::string_view to_string(Activation act);
std::optional<Activation> parse_activation(std::string_view name);

/// One or two bias-free dense maps (input -> [hidden ->] embedding) and,
/// for the class-level paradigm, an N x D matrix of class weight vectors.
///
/// layers[l] has shape out x in. The nonlinearity is applied between the two
/// layers only.
struct EmbeddingModel {
  std::vector<Eigen::MatrixXd> layers;
  Activation activation = Activation::none;
  std::optional<Eigen::MatrixXd> class_weights;

  int input_dim() const;
  int embed_dim() const;
  std::optional<int> hidden_dim() const;
  std::optional<int> num_classes() const;

  /// Raw (unnormalized) embeddings, one row per input row.
  Eigen::MatrixXd embed(const Eigen::MatrixXd& features) const;
};

/// Same shapes as the model's parameters.
struct ModelGrads {
  std::vector<Eigen::MatrixXd> layers;
  std::optional<Eigen::MatrixXd> class_weights;

  static ModelGrads zeros_like(const EmbeddingModel& model);
  double squared_norm() const;
};

/// Parameters ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), deterministic per seed.
/// Class weights use fan_in = D.
EmbeddingModel init_model(std::uint64_t seed, int input_dim, int embed_dim,
                          std::optional<int> num_classes = std::nullopt,
                          std::optional<int> hidden_dim = std::nullopt,
                          Activation activation = Activation::tanh);

/// model -= lr * grads
void sgd_update(EmbeddingModel& model, const ModelGrads& grads, double lr);

/// Throws unless the model has 1 or 2 layers with chained shapes, finite
/// parameters and D >= 2.
void validate(const EmbeddingModel& model);

}  // namespace pairsim
