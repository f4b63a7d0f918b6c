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
#include <random>
#include <vector>

#include "pairsim/backprop.hpp"
#include "pairsim/dataset.hpp"
#include "pairsim/model.hpp"

namespace pairsim {

/// Multiply the learning rate by `multiplier` once `at_fraction` of the
/// iterations have elapsed.
struct LrStep {
  double at_fraction = 0.0;
  double multiplier = 1.0;
};

/// x0.1 at 50%, 70% and 90% of the run.
std::vector<LrStep> default_lr_schedule();

struct TrainConfig {
  Paradigm paradigm = Paradigm::pair_wise;
  LossConfig loss;
  double lr = 0.1;
  std::vector<LrStep> lr_schedule = default_lr_schedule();
  int iterations = 2000;
  int batch_size = 64;         // class-level flat batch
  int classes_per_batch = 16;  // pair-wise P
  int samples_per_class = 5;   // pair-wise K
  std::uint64_t seed = 0;
  int embed_dim = 32;
  std::optional<int> hidden_dim = 128;
  Activation activation = Activation::tanh;
};

void validate(const TrainConfig& config);

double learning_rate_at(const TrainConfig& config, int iteration);

/// P distinct classes, then K distinct samples from each, both uniformly
/// without replacement. Rows are grouped by class in draw order.
Batch pk_sample(const LabeledDataset& dataset, int classes, int per_class, std::mt19937_64& rng);

/// B distinct samples uniformly without replacement.
Batch flat_sample(const LabeledDataset& dataset, int batch_size, std::mt19937_64& rng);

struct StepStats {
  double loss = 0.0;
  double mean_sp = 0.0;
  double mean_sn = 0.0;
  double lr = 0.0;
  std::size_t anchors = 0;
};

/// One forward/backward pass and a plain SGD update. Loss and similarity
/// statistics are measured before the update.
StepStats train_step(EmbeddingModel& model, const Batch& batch, const TrainConfig& config, double lr);
StepStats train_step(EmbeddingModel& model, const Batch& batch, const TrainConfig& config, double lr,
                     const GroupLoss& loss);

struct RunRow {
  int iteration = 0;
  double mean_sp = 0.0;
  double mean_sn = 0.0;
  double loss = 0.0;
  double lr = 0.0;
};

struct RunRecord {
  std::vector<RunRow> rows;
  EmbeddingModel model;  // final parameters
};

/// Fresh model shaped for `dataset` and `config` (class weights only in the
/// class-level paradigm).
EmbeddingModel init_model_for(const LabeledDataset& dataset, const TrainConfig& config);

/// Single-threaded and deterministic per (dataset, config). `loss_override`
/// replaces the configured loss; sampling and updates are unchanged.
RunRecord train(const LabeledDataset& dataset, const TrainConfig& config,
                const GroupLoss& loss_override = {});

}  // namespace pairsim
