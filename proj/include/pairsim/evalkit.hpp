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

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pairsim/dataset.hpp"
#include "pairsim/engine.hpp"
#include "pairsim/geometry.hpp"
#include "pairsim/model.hpp"

namespace pairsim {

/// Fraction of queries whose k nearest neighbours (cosine, query excluded,
/// ties broken by lower index) contain a same-class item.
std::map<int, double> recall_at_k(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                                  std::span<const int> ks);

/// For each FAR target, the true-accept rate at the smallest threshold t
/// with #{impostor >= t} / |impostors| <= far. Acceptance is inclusive.
std::map<double, double> tar_at_far(std::span<const double> genuine, std::span<const double> impostor,
                                    std::span<const double> far_targets);

struct ScatterResult {
  std::vector<SimilarityPoint> points;  // (max sn, min sp) per anchor
  std::size_t skipped = 0;              // anchors without a positive
};

/// Hardest-pair view of every sample against the rest of the dataset. With
/// `all_pairs`, every (sn, sp) combination of each anchor is emitted.
ScatterResult similarity_scatter(const EmbeddingModel& model, const LabeledDataset& dataset,
                                 bool all_pairs = false);

struct Concentration {
  double mean_sn = 0.0;
  double mean_sp = 0.0;
  double variance = 0.0;  // var(sn) + var(sp), population form
};

Concentration concentration(std::span<const SimilarityPoint> points);

/// All same-class (genuine) and cross-class (impostor) cosine scores, i < j.
struct PairScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
};
PairScores pair_scores(const Eigen::MatrixXd& embeddings, std::span<const int> labels);

struct MetricsReport {
  std::map<int, double> recall_at_k;
  double rank1 = 0.0;
  std::map<double, double> tar_at_far;
  std::vector<SimilarityPoint> pair_scatter;
  Concentration concentration;
};

MetricsReport evaluate(const EmbeddingModel& model, const LabeledDataset& dataset, std::span<const int> ks,
                       std::span<const double> far_targets);

/// CSV `metric,key,value`.
void write_metrics_csv(std::ostream& os, const MetricsReport& report);
nlohmann::json to_json(const MetricsReport& report);
void write_scatter_csv(std::ostream& os, std::span<const SimilarityPoint> points);

enum class SweepAxis { gamma, m };

struct SweepRow {
  double value = 0.0;
  double recall_at_1 = 0.0;
};

/// One training run per value (same seed, only the swept knob changes),
/// each scored by R@1 on `eval_set`. Runs are independent and may execute
/// on up to `jobs` threads; the result order follows `values`.
std::vector<SweepRow> sweep(const LabeledDataset& train_set, const LabeledDataset& eval_set,
                            const TrainConfig& base_config, SweepAxis axis, std::span<const double> values,
                            int jobs = 1);

void write_sweep_csv(std::ostream& os, SweepAxis axis, std::span<const SweepRow> rows);

}  // namespace pairsim
