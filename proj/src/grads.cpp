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

#include "pairsim/grads.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "numeric.hpp"
#include "pairsim/error.hpp"

namespace pairsim {
namespace {

UnifiedParams unified_params_for(const LossConfig& cfg) {
  switch (cfg.id) {
    case LossId::normface: return {cfg.gamma, 0.0};
    case LossId::softmax: return {1.0, 0.0};
    default: return {cfg.gamma, cfg.m};
  }
}

// Indices of entries tied (within tol) with the extreme value; such entries
// sit on a kink of the hard-mining max/min.
std::vector<bool> tied_extreme(const std::vector<double>& v, bool want_max, double tol) {
  const double top = want_max ? *std::max_element(v.begin(), v.end())
                              : *std::min_element(v.begin(), v.end());
  std::size_t near = 0;
  for (double s : v) near += std::abs(s - top) <= tol ? 1 : 0;
  std::vector<bool> out(v.size(), false);
  if (near > 1) {
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::abs(v[k] - top) <= tol;
  }
  return out;
}

}  // namespace

LossGrad circle_grad(const SimilarityGroup& group, const CircleParams& params) {
  if (!params.is_reduced()) {
    throw Error(ErrorKind::invalid_argument, "gradients defined for reduced mode");
  }
  const auto w = circle_weights(group, params);
  const double gamma = params.gamma();
  std::vector<double> neg(group.l());
  std::vector<double> pos(group.k());
  for (std::size_t j = 0; j < group.l(); ++j) {
    neg[j] = gamma * w.alpha_n[j] * (group.sn[j] - params.delta_n());
  }
  for (std::size_t i = 0; i < group.k(); ++i) {
    pos[i] = -gamma * w.alpha_p[i] * (group.sp[i] - params.delta_p());
  }
  const double t = detail::log_sum_exp(neg) + detail::log_sum_exp(pos);

  LossGrad out;
  out.value = detail::softplus(t);
  out.z = detail::sigmoid(t);
  const auto pn = detail::softmax(neg);
  const auto pp = detail::softmax(pos);
  out.d_sn.resize(group.l());
  out.d_sp.resize(group.k());
  for (std::size_t j = 0; j < group.l(); ++j) out.d_sn[j] = out.z * pn[j] * gamma * w.alpha_n[j];
  for (std::size_t i = 0; i < group.k(); ++i) out.d_sp[i] = -out.z * pp[i] * gamma * w.alpha_p[i];
  return out;
}

LossGrad unified_grad(const SimilarityGroup& group, const UnifiedParams& params) {
  validate(group);
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma) || !std::isfinite(params.m)) {
    throw Error(ErrorKind::invalid_argument, "invalid unified loss parameters");
  }
  std::vector<double> neg(group.l());
  std::vector<double> pos(group.k());
  for (std::size_t j = 0; j < group.l(); ++j) neg[j] = params.gamma * (group.sn[j] + params.m);
  for (std::size_t i = 0; i < group.k(); ++i) pos[i] = -params.gamma * group.sp[i];
  const double t = detail::log_sum_exp(neg) + detail::log_sum_exp(pos);

  LossGrad out;
  out.value = detail::softplus(t);
  out.z = detail::sigmoid(t);
  const auto pn = detail::softmax(neg);
  const auto pp = detail::softmax(pos);
  out.d_sn.resize(group.l());
  out.d_sp.resize(group.k());
  for (std::size_t j = 0; j < group.l(); ++j) out.d_sn[j] = out.z * pn[j] * params.gamma;
  for (std::size_t i = 0; i < group.k(); ++i) out.d_sp[i] = -out.z * pp[i] * params.gamma;
  return out;
}

LossGrad triplet_grad(const SimilarityGroup& group, double m) {
  LossGrad out;
  out.value = triplet_hard_loss(group, m);
  out.z = -std::expm1(-out.value);
  out.d_sn.assign(group.l(), 0.0);
  out.d_sp.assign(group.k(), 0.0);
  if (out.value > 0.0) {
    const auto jn = std::max_element(group.sn.begin(), group.sn.end()) - group.sn.begin();
    const auto ip = std::min_element(group.sp.begin(), group.sp.end()) - group.sp.begin();
    out.d_sn[static_cast<std::size_t>(jn)] = 1.0;
    out.d_sp[static_cast<std::size_t>(ip)] = -1.0;
  }
  return out;
}

LossGrad loss_and_grad(const LossConfig& cfg, const SimilarityGroup& group) {
  switch (cfg.id) {
    case LossId::circle: return circle_grad(group, CircleParams::reduced(cfg.gamma, cfg.m));
    case LossId::triplet: return triplet_grad(group, cfg.m);
    case LossId::am_softmax:
    case LossId::normface:
    case LossId::softmax:
    case LossId::unified: return unified_grad(group, unified_params_for(cfg));
  }
  throw Error(ErrorKind::invalid_argument, "unknown loss id");
}

double loss_value(const LossConfig& cfg, const SimilarityGroup& group) {
  switch (cfg.id) {
    case LossId::circle: return circle_loss(group, CircleParams::reduced(cfg.gamma, cfg.m));
    case LossId::triplet: return triplet_hard_loss(group, cfg.m);
    case LossId::am_softmax:
    case LossId::normface:
    case LossId::softmax:
    case LossId::unified: return unified_loss(group, unified_params_for(cfg));
  }
  throw Error(ErrorKind::invalid_argument, "unknown loss id");
}

FdReport fd_check(const LossConfig& cfg, const SimilarityGroup& group, double eps, FdMode mode) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw Error(ErrorKind::invalid_argument, "finite-difference eps must lie in [1e-7, 1e-3]");
  }
  const LossGrad analytic = loss_and_grad(cfg, group);

  std::function<double(const SimilarityGroup&)> eval;
  std::vector<bool> skip_p(group.k(), false);
  std::vector<bool> skip_n(group.l(), false);

  if (cfg.id == LossId::circle) {
    const auto params = CircleParams::reduced(cfg.gamma, cfg.m);
    if (mode == FdMode::frozen) {
      const auto frozen = circle_weights(group, params);
      eval = [params, frozen](const SimilarityGroup& g) { return circle_loss_frozen(g, params, frozen); };
    } else {
      eval = [params](const SimilarityGroup& g) { return circle_loss(g, params); };
    }
    for (std::size_t i = 0; i < group.k(); ++i) skip_p[i] = std::abs(group.sp[i] - params.optimum_p()) <= eps;
    for (std::size_t j = 0; j < group.l(); ++j) skip_n[j] = std::abs(group.sn[j] - params.optimum_n()) <= eps;
  } else {
    eval = [cfg](const SimilarityGroup& g) { return loss_value(cfg, g); };
    if (cfg.id == LossId::triplet) {
      const bool at_hinge = std::abs(analytic.value) <= 2.0 * eps &&
                            std::abs(*std::max_element(group.sn.begin(), group.sn.end()) -
                                     *std::min_element(group.sp.begin(), group.sp.end()) + cfg.m) <= 2.0 * eps;
      skip_p = tied_extreme(group.sp, false, 2.0 * eps);
      skip_n = tied_extreme(group.sn, true, 2.0 * eps);
      if (at_hinge) {
        skip_p.assign(group.k(), true);
        skip_n.assign(group.l(), true);
      }
    }
  }

  FdReport report;
  double worst = 0.0;
  double scale = 0.0;
  auto probe = [&](std::vector<double> SimilarityGroup::*side, std::size_t idx, double exact) {
    SimilarityGroup up = group;
    SimilarityGroup down = group;
    (up.*side)[idx] += eps;
    (down.*side)[idx] -= eps;
    const double numeric = (eval(up) - eval(down)) / (2.0 * eps);
    worst = std::max(worst, std::abs(numeric - exact));
    scale = std::max({scale, std::abs(numeric), std::abs(exact)});
    ++report.compared;
  };
  for (std::size_t i = 0; i < group.k(); ++i) {
    if (skip_p[i]) { ++report.excluded; continue; }
    probe(&SimilarityGroup::sp, i, analytic.d_sp[i]);
  }
  for (std::size_t j = 0; j < group.l(); ++j) {
    if (skip_n[j]) { ++report.excluded; continue; }
    probe(&SimilarityGroup::sn, j, analytic.d_sn[j]);
  }
  report.max_rel_error = scale > 0.0 ? worst / scale : 0.0;
  return report;
}

}  // namespace pairsim
