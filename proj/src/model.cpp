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

#include "pairsim/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pairsim/error.hpp"

namespace pairsim {
namespace {

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, int rows, int cols) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  // Fill row by row so the draw order does not depend on Eigen's storage.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "none") return Activation::none;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  return std::nullopt;
}

int EmbeddingModel::input_dim() const { return static_cast<int>(layers.front().cols()); }
int EmbeddingModel::embed_dim() const { return static_cast<int>(layers.back().rows()); }

std::optional<int> EmbeddingModel::hidden_dim() const {
  if (layers.size() < 2) return std::nullopt;
  return static_cast<int>(layers.front().rows());
}

std::optional<int> EmbeddingModel::num_classes() const {
  if (!class_weights) return std::nullopt;
  return static_cast<int>(class_weights->rows());
}

Eigen::MatrixXd EmbeddingModel::embed(const Eigen::MatrixXd& features) const {
  if (features.cols() != input_dim()) {
    throw Error(ErrorKind::invalid_argument,
                "feature dimension " + std::to_string(features.cols()) +
                    " does not match model input dimension " + std::to_string(input_dim()));
  }
  Eigen::MatrixXd h = features * layers.front().transpose();
  if (layers.size() == 2) {
    switch (activation) {
      case Activation::none: break;
      case Activation::relu: h = h.cwiseMax(0.0); break;
      case Activation::tanh: h = h.array().tanh().matrix(); break;
    }
    h = h * layers.back().transpose();
  }
  return h;
}

ModelGrads ModelGrads::zeros_like(const EmbeddingModel& model) {
  ModelGrads g;
  for (const auto& w : model.layers) g.layers.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  if (model.class_weights) {
    g.class_weights = Eigen::MatrixXd::Zero(model.class_weights->rows(), model.class_weights->cols());
  }
  return g;
}

double ModelGrads::squared_norm() const {
  double acc = 0.0;
  for (const auto& w : layers) acc += w.squaredNorm();
  if (class_weights) acc += class_weights->squaredNorm();
  return acc;
}

EmbeddingModel init_model(std::uint64_t seed, int input_dim, int embed_dim,
                          std::optional<int> num_classes, std::optional<int> hidden_dim,
                          Activation activation) {
  if (input_dim < 1 || embed_dim < 2 || (num_classes && *num_classes < 2) ||
      (hidden_dim && *hidden_dim < 1)) {
    throw Error(ErrorKind::invalid_argument, "invalid model dimensions");
  }
  std::mt19937_64 rng(seed);
  EmbeddingModel model;
  model.activation = hidden_dim ? activation : Activation::none;
  if (hidden_dim) {
    model.layers.push_back(uniform_matrix(rng, *hidden_dim, input_dim));
    model.layers.push_back(uniform_matrix(rng, embed_dim, *hidden_dim));
  } else {
    model.layers.push_back(uniform_matrix(rng, embed_dim, input_dim));
  }
  if (num_classes) model.class_weights = uniform_matrix(rng, *num_classes, embed_dim);
  return model;
}

void sgd_update(EmbeddingModel& model, const ModelGrads& grads, double lr) {
  if (grads.layers.size() != model.layers.size() ||
      grads.class_weights.has_value() != model.class_weights.has_value()) {
    throw Error(ErrorKind::invalid_argument, "gradient shapes do not match the model");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) model.layers[l] -= lr * grads.layers[l];
  if (model.class_weights) *model.class_weights -= lr * *grads.class_weights;
}

void validate(const EmbeddingModel& model) {
  if (model.layers.empty() || model.layers.size() > 2) {
    throw Error(ErrorKind::invalid_argument, "model needs one or two layers");
  }
  if (model.layers.size() == 2 && model.layers[1].cols() != model.layers[0].rows()) {
    throw Error(ErrorKind::invalid_argument, "layer shapes do not chain");
  }
  if (model.embed_dim() < 2) throw Error(ErrorKind::invalid_argument, "embedding dimension must be >= 2");
  for (const auto& w : model.layers) {
    if (!all_finite(w)) throw Error(ErrorKind::numeric, "non-finite model parameter");
  }
  if (model.class_weights) {
    if (model.class_weights->cols() != model.embed_dim() || model.class_weights->rows() < 2) {
      throw Error(ErrorKind::invalid_argument, "class weight shape mismatch");
    }
    if (!all_finite(*model.class_weights)) throw Error(ErrorKind::numeric, "non-finite model parameter");
  }
}

}  // namespace pairsim
