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
#include <vector>

#include "pairsim/losses.hpp"

namespace pairsim {

/// (sn - center_sn)^2 + (sp - center_sp)^2 = radius^2 in the (sn, sp) plane.
struct BoundaryCircle {
  double center_sn = 0.0;
  double center_sp = 0.0;
  double radius = 0.0;
};

/// Binary-case decision boundary alpha_n (sn - Dn) = alpha_p (sp - Dp).
/// Reduced parameters give center (0, 1) and radius sqrt(2) m. Throws
/// "degenerate boundary" when the radius is not positive, including any
/// reduced `m <= 0`.
BoundaryCircle decision_boundary(const CircleParams& params);

struct SimilarityPoint {
  double sn = 0.0;
  double sp = 0.0;
};

/// The boundary point with the smallest sp - sn gap: (m, 1 - m).
SimilarityPoint convergence_target(double m);

/// Single-pair weighted logit alpha_n (sn - Dn) - alpha_p (sp - Dp).
double boundary_logit(double sn, double sp, const CircleParams& params);

bool on_boundary(double sn, double sp, const CircleParams& params, double tol);

/// True on the loss-satisfied side (negative weighted logit).
bool inside_boundary(double sn, double sp, const CircleParams& params);

struct GridSpec {
  double sn_min = 0.0;
  double sn_max = 1.0;
  double sp_min = 0.0;
  double sp_max = 1.0;
  int resolution = 101;  // points per axis
};

struct FieldRow {
  double sn = 0.0;
  double sp = 0.0;
  double d_sn = 0.0;
  double d_sp = 0.0;
  double loss = 0.0;
};

/// Dense K = L = 1 evaluation of loss and gradient. Rows are sp-major
/// (sp outer, sn inner), both axes ascending.
std::vector<FieldRow> gradient_field(const LossConfig& cfg, const GridSpec& grid);

/// CSV with header `sn,sp,d_sn,d_sp,loss`, 6 significant digits.
void write_gradient_field_csv(std::ostream& os, const std::vector<FieldRow>& rows);

}  // namespace pairsim
