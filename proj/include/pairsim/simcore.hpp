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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pairsim {

/// Embedding coordinates of a single sample (or a class weight vector).
using FeatureVector = Eigen::VectorXd;

/// Within-class (sp) and between-class (sn) similarity scores attached to
/// one anchor.
struct SimilarityGroup {
  std::vector<double> sp;
  std::vector<double> sn;

  std::size_t k() const noexcept { return sp.size(); }
  std::size_t l() const noexcept { return sn.size(); }
};

/// Throws unless both sides are non-empty and every entry is finite.
void validate(const SimilarityGroup& group);

FeatureVector l2_normalize(const FeatureVector& v);

/// Cosine similarity clamped to [-1, 1].
double cosine(const FeatureVector& a, const FeatureVector& b);

/// Clamp a dot product of unit vectors into the cosine range.
double clamp_similarity(double s) noexcept;

/// Unit-normalizes every row. Throws on any zero row.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& rows);

/// Class-level paradigm: sp = cosine to the target row of `weights`,
/// sn = cosines to every other row in ascending row order.
SimilarityGroup class_similarities(const FeatureVector& x,
                                   const Eigen::MatrixXd& weights, int label);

/// Pair-wise paradigm. The caller excludes the anchor from both sets.
SimilarityGroup pairwise_similarities(const FeatureVector& anchor,
                                      std::span<const FeatureVector> positives,
                                      std::span<const FeatureVector> negatives);

}  // namespace pairsim
