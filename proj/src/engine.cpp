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

#include "pairsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pairsim/error.hpp"

namespace pairsim {
namespace {

// Separate stream for batch sampling so it does not share draws with
// parameter initialisation.
constexpr std::uint64_t kSamplerSalt = 0x9E3779B97F4A7C15ULL;

std::vector<std::vector<int>> indices_by_class(const LabeledDataset& dataset) {
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(dataset.num_classes));
  for (std::size_t r = 0; r < dataset.labels.size(); ++r) {
    by_class[static_cast<std::size_t>(dataset.labels[r])].push_back(static_cast<int>(r));
  }
  return by_class;
}

// First `count` entries of a Fisher-Yates shuffle.
std::vector<int> draw_without_replacement(std::vector<int> pool, int count, std::mt19937_64& rng) {
  for (int k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

Batch gather(const LabeledDataset& dataset, const std::vector<int>& rows) {
  Batch b;
  b.features.resize(static_cast<Eigen::Index>(rows.size()), dataset.dim());
  b.labels.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    b.features.row(static_cast<Eigen::Index>(k)) = dataset.features.row(rows[k]);
    b.labels.push_back(dataset.labels[static_cast<std::size_t>(rows[k])]);
  }
  return b;
}

}  // namespace

std::vector<LrStep> default_lr_schedule() { return {{0.5, 0.1}, {0.7, 0.1}, {0.9, 0.1}}; }

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) fail("learning rate must be positive");
  if (c.iterations < 0) fail("iterations must be non-negative");
  if (!(c.loss.gamma > 0.0) || !std::isfinite(c.loss.gamma)) fail("gamma must be positive and finite");
  if (!std::isfinite(c.loss.m)) fail("m must be finite");
  if (c.loss.id == LossId::circle) (void)CircleParams::reduced(c.loss.gamma, c.loss.m);
  if (c.paradigm == Paradigm::pair_wise) {
    if (c.classes_per_batch < 2 || c.samples_per_class < 2) fail("pair-wise sampling needs P >= 2 and K >= 2");
    if (c.loss.id == LossId::softmax) fail("softmax (inner product) is class-level only");
  } else if (c.batch_size < 1) {
    fail("batch size must be positive");
  }
  if (c.embed_dim < 2) fail("embedding dimension must be >= 2");
  if (c.hidden_dim && *c.hidden_dim < 1) fail("hidden dimension must be positive");
  for (const auto& s : c.lr_schedule) {
    if (!(s.at_fraction >= 0.0 && s.at_fraction <= 1.0) || !(s.multiplier > 0.0)) {
      fail("learning-rate steps need fraction in [0, 1] and a positive multiplier");
    }
  }
}

double learning_rate_at(const TrainConfig& config, int iteration) {
  double lr = config.lr;
  if (config.iterations <= 0) return lr;
  const double progress = static_cast<double>(iteration) / static_cast<double>(config.iterations);
  for (const auto& s : config.lr_schedule) {
    if (progress >= s.at_fraction) lr *= s.multiplier;
  }
  return lr;
}

Batch pk_sample(const LabeledDataset& dataset, int classes, int per_class, std::mt19937_64& rng) {
  if (classes < 1 || per_class < 1) throw Error(ErrorKind::invalid_argument, "P and K must be positive");
  if (classes > dataset.num_classes) {
    throw Error(ErrorKind::invalid_argument, "insufficient classes: need " + std::to_string(classes) +
                                                 ", dataset has " + std::to_string(dataset.num_classes));
  }
  const auto by_class = indices_by_class(dataset);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (static_cast<int>(by_class[c].size()) < per_class) {
      throw Error(ErrorKind::invalid_argument, "insufficient samples: class " + std::to_string(c) + " has " +
                                                   std::to_string(by_class[c].size()) + " < K");
    }
  }
  std::vector<int> all_classes(static_cast<std::size_t>(dataset.num_classes));
  std::iota(all_classes.begin(), all_classes.end(), 0);
  const auto picked = draw_without_replacement(std::move(all_classes), classes, rng);
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(classes * per_class));
  for (int c : picked) {
    const auto members = draw_without_replacement(by_class[static_cast<std::size_t>(c)], per_class, rng);
    rows.insert(rows.end(), members.begin(), members.end());
  }
  return gather(dataset, rows);
}

Batch flat_sample(const LabeledDataset& dataset, int batch_size, std::mt19937_64& rng) {
  if (batch_size < 1 || batch_size > dataset.size()) {
    throw Error(ErrorKind::invalid_argument, "batch size must lie in [1, M]");
  }
  std::vector<int> all(static_cast<std::size_t>(dataset.size()));
  std::iota(all.begin(), all.end(), 0);
  return gather(dataset, draw_without_replacement(std::move(all), batch_size, rng));
}

StepStats train_step(EmbeddingModel& model, const Batch& batch, const TrainConfig& config, double lr,
                     const GroupLoss& loss) {
  const BatchGrad bg =
      backprop_to_params(model, batch, config.paradigm, similarity_kind_for(config.loss.id), loss);
  if (!std::isfinite(bg.loss)) throw Error(ErrorKind::numeric, "non-finite batch loss");
  sgd_update(model, bg.grads, lr);
  return {bg.loss, bg.mean_sp, bg.mean_sn, lr, bg.anchors};
}

StepStats train_step(EmbeddingModel& model, const Batch& batch, const TrainConfig& config, double lr) {
  const LossConfig cfg = config.loss;
  return train_step(model, batch, config, lr, [cfg](const SimilarityGroup& g) { return loss_and_grad(cfg, g); });
}

EmbeddingModel init_model_for(const LabeledDataset& dataset, const TrainConfig& config) {
  std::optional<int> classes;
  if (config.paradigm == Paradigm::class_level) classes = dataset.num_classes;
  return init_model(config.seed, static_cast<int>(dataset.dim()), config.embed_dim, classes, config.hidden_dim,
                    config.activation);
}

RunRecord train(const LabeledDataset& dataset, const TrainConfig& config, const GroupLoss& loss_override) {
  validate(dataset);
  validate(config);
  RunRecord record{{}, init_model_for(dataset, config)};
  record.rows.reserve(static_cast<std::size_t>(config.iterations));
  const LossConfig cfg = config.loss;
  const GroupLoss loss = loss_override ? loss_override
                                       : GroupLoss([cfg](const SimilarityGroup& g) { return loss_and_grad(cfg, g); });
  std::mt19937_64 sampler(config.seed ^ kSamplerSalt);
  for (int it = 0; it < config.iterations; ++it) {
    const Batch batch = config.paradigm == Paradigm::pair_wise
                            ? pk_sample(dataset, config.classes_per_batch, config.samples_per_class, sampler)
                            : flat_sample(dataset, config.batch_size, sampler);
    const double lr = learning_rate_at(config, it);
    StepStats stats;
    try {
      stats = train_step(record.model, batch, config, lr, loss);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric) throw;
      throw Error(ErrorKind::numeric, "iteration " + std::to_string(it) + ": " + e.what());
    }
    record.rows.push_back({it, stats.mean_sp, stats.mean_sn, stats.loss, lr});
  }
  return record;
}

}  // namespace pairsim
