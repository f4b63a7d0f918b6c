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

// High-precision reference evaluations of the loss formulas, written
// directly from their closed forms (no log-sum-exp rearrangement).

#pragma once

#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace pairsim::testing {

using Big = boost::multiprecision::cpp_bin_float_50;

inline Big big(double v) { return Big(v); }

inline double unified_oracle(const std::vector<double>& sp, const std::vector<double>& sn, double gamma,
                             double m) {
  Big neg = 0;
  Big pos = 0;
  for (double s : sn) neg += exp(big(gamma) * (big(s) + big(m)));
  for (double s : sp) pos += exp(-big(gamma) * big(s));
  return static_cast<double>(log1p(neg * pos));
}

inline double am_softmax_oracle(double sp, const std::vector<double>& sn, double gamma, double m) {
  const Big target = exp(big(gamma) * (big(sp) - big(m)));
  Big denom = target;
  for (double s : sn) denom += exp(big(gamma) * big(s));
  return static_cast<double>(-log(target / denom));
}

inline double circle_oracle(const std::vector<double>& sp, const std::vector<double>& sn, double gamma, double m) {
  const Big op = 1 + big(m);
  const Big on = -big(m);
  const Big dp = 1 - big(m);
  const Big dn = big(m);
  Big neg = 0;
  Big pos = 0;
  for (double s : sn) {
    Big alpha = big(s) - on;
    if (alpha < 0) alpha = 0;
    neg += exp(big(gamma) * alpha * (big(s) - dn));
  }
  for (double s : sp) {
    Big alpha = op - big(s);
    if (alpha < 0) alpha = 0;
    pos += exp(-big(gamma) * alpha * (big(s) - dp));
  }
  return static_cast<double>(log1p(neg * pos));
}

}  // namespace pairsim::testing
