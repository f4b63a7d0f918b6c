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
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <json.hpp>

#include "pairsim/backprop.hpp"
#include "pairsim/dataset.hpp"
#include "pairsim/engine.hpp"
#include "pairsim/model.hpp"

namespace pairsim {

/// Gaussian clusters around centers drawn uniformly on a sphere.
struct ClusterSpec {
  int n_classes = 16;
  int per_class = 20;
  int dim = 32;
  double center_scale = 1.0;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

void validate(const ClusterSpec& spec);

/// Rows are grouped by class (class 0 first). Deterministic per seed.
LabeledDataset gen_clusters(const ClusterSpec& spec);

/// CSV with header `label,f0,f1,...`; values use the shortest round-trip
/// decimal form.
void save_dataset(std::ostream& os, const LabeledDataset& dataset);
void save_dataset(const std::filesystem::path& path, const LabeledDataset& dataset);
LabeledDataset load_dataset(std::istream& is);
LabeledDataset load_dataset(const std::filesystem::path& path);

inline constexpr std::string_view kCheckpointFormat = "pairsim-ckpt-v1";

struct Checkpoint {
  EmbeddingModel model;
  Paradigm paradigm = Paradigm::pair_wise;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);
/// Loads parameters into `model`, which fixes the expected shapes.
void load_checkpoint(const std::filesystem::path& path, EmbeddingModel& model);

/// CSV `iter,mean_sp,mean_sn,loss,lr`, one row per iteration.
void save_record(std::ostream& os, const RunRecord& record);
void save_record(const std::filesystem::path& path, const RunRecord& record);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ClusterSpec& spec);

}  // namespace pairsim
