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

#include "pairsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairsim/error.hpp"

namespace pairsim {

void validate(const SimilarityGroup& group) {
  if (group.sp.empty() || group.sn.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty similarity side");
  }
  auto finite = [](double s) { return std::isfinite(s); };
  if (!std::all_of(group.sp.begin(), group.sp.end(), finite) ||
      !std::all_of(group.sn.begin(), group.sn.end(), finite)) {
    throw Error(ErrorKind::numeric, "non-finite similarity");
  }
}

FeatureVector l2_normalize(const FeatureVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::degenerate, "degenerate feature");
  }
  return v / norm;
}

double clamp_similarity(double s) noexcept { return std::clamp(s, -1.0, 1.0); }

double cosine(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "dimension mismatch in cosine");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
    throw Error(ErrorKind::degenerate, "degenerate feature");
  }
  return clamp_similarity(a.dot(b) / (na * nb));
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double norm = rows.row(r).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::degenerate,
                  "degenerate feature (row " + std::to_string(r) + ")");
    }
    out.row(r) = rows.row(r) / norm;
  }
  return out;
}

SimilarityGroup class_similarities(const FeatureVector& x,
                                   const Eigen::MatrixXd& weights, int label) {
  const auto n = weights.rows();
  if (n < 2) {
    throw Error(ErrorKind::invalid_argument, "class-level similarities need N >= 2");
  }
  if (label < 0 || label >= n) {
    throw Error(ErrorKind::invalid_argument,
                "label " + std::to_string(label) + " out of range");
  }
  SimilarityGroup group;
  group.sp.push_back(cosine(x, weights.row(label).transpose()));
  group.sn.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == label) continue;
    group.sn.push_back(cosine(x, weights.row(j).transpose()));
  }
  return group;
}

SimilarityGroup pairwise_similarities(const FeatureVector& anchor,
                                      std::span<const FeatureVector> positives,
                                      std::span<const FeatureVector> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty similarity side");
  }
  SimilarityGroup group;
  group.sp.reserve(positives.size());
  group.sn.reserve(negatives.size());
  for (const auto& p : positives) group.sp.push_back(cosine(anchor, p));
  for (const auto& q : negatives) group.sn.push_back(cosine(anchor, q));
  return group;
}

}  // namespace pairsim
