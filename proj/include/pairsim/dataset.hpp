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

#include <vector>

#include <Eigen/Dense>

namespace pairsim {

/// M samples (rows of `features`) with class ids in [0, num_classes).
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int num_classes = 0;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dim() const noexcept { return features.cols(); }
};

/// Throws unless M >= N >= 2, labels match rows and every class occurs.
void validate(const LabeledDataset& dataset);

}  // namespace pairsim
