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

#include "pairsim/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "numeric.hpp"
#include "pairsim/error.hpp"

namespace pairsim {
namespace {

void check_scale(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::invalid_argument, "gamma must be positive and finite");
  }
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::invalid_argument, std::string(what) + " must be finite");
  }
}

void check_unified(const UnifiedParams& p) {
  check_scale(p.gamma);
  check_finite(p.m, "margin");
}

// Weighted logits of the negative and positive sides; the circle loss is
// softplus(LSE(neg) + LSE(pos)).
struct CircleLogits {
  std::vector<double> neg;
  std::vector<double> pos;
};

CircleLogits circle_logits(const SimilarityGroup& g, const CircleParams& p,
                           const CircleWeights& w) {
  CircleLogits out;
  out.neg.resize(g.l());
  out.pos.resize(g.k());
  for (std::size_t j = 0; j < g.l(); ++j) {
    out.neg[j] = p.gamma() * w.alpha_n[j] * (g.sn[j] - p.delta_n());
  }
  for (std::size_t i = 0; i < g.k(); ++i) {
    out.pos[i] = -p.gamma() * w.alpha_p[i] * (g.sp[i] - p.delta_p());
  }
  return out;
}

constexpr std::array<std::pair<LossId, std::string_view>, 6> kLossNames{{
    {LossId::circle, "circle"},
    {LossId::am_softmax, "am_softmax"},
    {LossId::normface, "normface"},
    {LossId::softmax, "softmax"},
    {LossId::triplet, "triplet"},
    {LossId::unified, "unified"},
}};

}  // namespace

CircleParams CircleParams::reduced(double gamma, double m) {
  check_scale(gamma);
  check_finite(m, "m");
  if (!(m > -1.0 && m < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "reduced circle mode needs -1 < m < 1");
  }
  CircleParams p;
  p.gamma_ = gamma;
  p.m_ = m;
  p.optimum_p_ = 1.0 + m;
  p.optimum_n_ = -m;
  p.delta_p_ = 1.0 - m;
  p.delta_n_ = m;
  p.reduced_ = true;
  return p;
}

CircleParams CircleParams::general(double gamma, double optimum_p, double optimum_n,
                                   double delta_p, double delta_n) {
  check_scale(gamma);
  check_finite(optimum_p, "Op");
  check_finite(optimum_n, "On");
  check_finite(delta_p, "Dp");
  check_finite(delta_n, "Dn");
  if (optimum_p < delta_p || delta_n < optimum_n) {
    throw Error(ErrorKind::invalid_argument, "general circle mode needs Op >= Dp and Dn >= On");
  }
  CircleParams p;
  p.gamma_ = gamma;
  p.m_ = 0.0;
  p.optimum_p_ = optimum_p;
  p.optimum_n_ = optimum_n;
  p.delta_p_ = delta_p;
  p.delta_n_ = delta_n;
  p.reduced_ = false;
  return p;
}

std::string_view to_string(LossId id) {
  for (const auto& [k, name] : kLossNames) {
    if (k == id) return name;
  }
  return "unknown";
}

std::optional<LossId> parse_loss_id(std::string_view name) {
  for (const auto& [k, n] : kLossNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view loss_id_names() {
  return "circle,am_softmax,normface,softmax,triplet,unified";
}

double unified_loss(const SimilarityGroup& group, const UnifiedParams& params) {
  validate(group);
  check_unified(params);
  std::vector<double> neg(group.l());
  std::vector<double> pos(group.k());
  for (std::size_t j = 0; j < group.l(); ++j) neg[j] = params.gamma * (group.sn[j] + params.m);
  for (std::size_t i = 0; i < group.k(); ++i) pos[i] = -params.gamma * group.sp[i];
  return detail::softplus(detail::log_sum_exp(neg) + detail::log_sum_exp(pos));
}

double am_softmax_loss(double sp, std::span<const double> sn, const UnifiedParams& params,
                       SimilarityKind kind) {
  if (sn.empty()) throw Error(ErrorKind::invalid_argument, "empty similarity side");
  if (!std::isfinite(sp) || !std::all_of(sn.begin(), sn.end(), [](double s) { return std::isfinite(s); })) {
    throw Error(ErrorKind::numeric, "non-finite similarity");
  }
  check_unified(params);
  if (kind == SimilarityKind::inner_product && (params.gamma != 1.0 || params.m != 0.0)) {
    throw Error(ErrorKind::invalid_argument, "inner-product similarity requires gamma = 1 and m = 0");
  }
  // -log(e^a / (e^a + sum_j e^b_j)) = log(1 + sum_j e^(b_j - a))
  const double target = params.gamma * (sp - params.m);
  std::vector<double> others(sn.size());
  for (std::size_t j = 0; j < sn.size(); ++j) others[j] = params.gamma * sn[j];
  return detail::softplus(detail::log_sum_exp(others) - target);
}

double triplet_hard_loss(const SimilarityGroup& group, double m) {
  validate(group);
  check_finite(m, "margin");
  const double hardest_n = *std::max_element(group.sn.begin(), group.sn.end());
  const double hardest_p = *std::min_element(group.sp.begin(), group.sp.end());
  const double hinge = hardest_n - hardest_p + m;
  // A hinge within rounding error of zero is the kink itself: loss and
  // subgradient are both 0 there.
  const double noise = 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(hardest_n) + std::abs(hardest_p) + std::abs(m));
  return hinge > noise ? hinge : 0.0;
}

CircleWeights circle_weights(const SimilarityGroup& group, const CircleParams& params) {
  validate(group);
  CircleWeights w;
  w.alpha_p.resize(group.k());
  w.alpha_n.resize(group.l());
  for (std::size_t i = 0; i < group.k(); ++i) {
    w.alpha_p[i] = std::max(0.0, params.optimum_p() - group.sp[i]);
  }
  for (std::size_t j = 0; j < group.l(); ++j) {
    w.alpha_n[j] = std::max(0.0, group.sn[j] - params.optimum_n());
  }
  return w;
}

double circle_loss_frozen(const SimilarityGroup& group, const CircleParams& params,
                          const CircleWeights& weights) {
  validate(group);
  if (weights.alpha_p.size() != group.k() || weights.alpha_n.size() != group.l()) {
    throw Error(ErrorKind::invalid_argument, "weight vector sizes do not match the group");
  }
  const auto logits = circle_logits(group, params, weights);
  return detail::softplus(detail::log_sum_exp(logits.neg) + detail::log_sum_exp(logits.pos));
}

double circle_loss(const SimilarityGroup& group, const CircleParams& params) {
  return circle_loss_frozen(group, params, circle_weights(group, params));
}

double unified_to_triplet_gap(const SimilarityGroup& group, double m, double gamma) {
  validate(group);
  check_scale(gamma);
  check_finite(m, "margin");
  std::vector<double> pairs;
  pairs.reserve(group.k() * group.l());
  for (double sp : group.sp) {
    for (double sn : group.sn) pairs.push_back(gamma * (sn - sp + m));
  }
  const double soft = detail::softplus(detail::log_sum_exp(pairs)) / gamma;
  return std::abs(soft - triplet_hard_loss(group, m));
}

}  // namespace pairsim
