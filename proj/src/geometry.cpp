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

#include "pairsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "format.hpp"
#include "pairsim/error.hpp"
#include "pairsim/grads.hpp"

namespace pairsim {

BoundaryCircle decision_boundary(const CircleParams& params) {
  if (params.is_reduced() && !(params.m() > 0.0)) {
    throw Error(ErrorKind::degenerate, "degenerate boundary (reduced mode needs 0 < m < 1)");
  }
  const double on = params.optimum_n();
  const double op = params.optimum_p();
  const double dn = params.delta_n();
  const double dp = params.delta_p();
  const double c = ((on - dn) * (on - dn) + (op - dp) * (op - dp)) / 4.0;
  if (!(c > 0.0)) throw Error(ErrorKind::degenerate, "degenerate boundary");
  return {(on + dn) / 2.0, (op + dp) / 2.0, std::sqrt(c)};
}

SimilarityPoint convergence_target(double m) {
  if (!(m > 0.0 && m < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "convergence target needs 0 < m < 1");
  }
  return {m, 1.0 - m};
}

double boundary_logit(double sn, double sp, const CircleParams& params) {
  const double alpha_n = std::max(0.0, sn - params.optimum_n());
  const double alpha_p = std::max(0.0, params.optimum_p() - sp);
  return alpha_n * (sn - params.delta_n()) - alpha_p * (sp - params.delta_p());
}

bool on_boundary(double sn, double sp, const CircleParams& params, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  return std::abs(boundary_logit(sn, sp, params)) <= tol;
}

bool inside_boundary(double sn, double sp, const CircleParams& params) {
  return boundary_logit(sn, sp, params) < 0.0;
}

std::vector<FieldRow> gradient_field(const LossConfig& cfg, const GridSpec& grid) {
  if (grid.resolution < 2) throw Error(ErrorKind::invalid_argument, "empty grid (resolution must be >= 2)");
  if (!(grid.sn_min < grid.sn_max) || !(grid.sp_min < grid.sp_max) || grid.sn_min < -1.0 ||
      grid.sn_max > 1.0 || grid.sp_min < -1.0 || grid.sp_max > 1.0) {
    throw Error(ErrorKind::invalid_argument, "grid ranges must be increasing and inside [-1, 1]");
  }
  const int n = grid.resolution;
  auto axis = [n](double lo, double hi, int k) {
    return k == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  std::vector<FieldRow> rows;
  rows.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    const double sp = axis(grid.sp_min, grid.sp_max, r);
    for (int c = 0; c < n; ++c) {
      const double sn = axis(grid.sn_min, grid.sn_max, c);
      const SimilarityGroup g{{sp}, {sn}};
      const LossGrad lg = loss_and_grad(cfg, g);
      rows.push_back({sn, sp, lg.d_sn[0], lg.d_sp[0], lg.value});
    }
  }
  return rows;
}

void write_gradient_field_csv(std::ostream& os, const std::vector<FieldRow>& rows) {
  os << "sn,sp,d_sn,d_sp,loss\n";
  for (const auto& r : rows) {
    os << detail::format_sig(r.sn, 6) << ',' << detail::format_sig(r.sp, 6) << ','
       << detail::format_sig(r.d_sn, 6) << ',' << detail::format_sig(r.d_sp, 6) << ','
       << detail::format_sig(r.loss, 6) << '\n';
  }
}

}  // namespace pairsim
