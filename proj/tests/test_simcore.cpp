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

#include <random>

#include <gtest/gtest.h>

#include "pairsim/error.hpp"

namespace pairsim {
namespace {

FeatureVector vec(std::initializer_list<double> v) {
  FeatureVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

TEST(Normalize, ThreeFourFive) {
  const auto u = l2_normalize(vec({3, 4}));
  EXPECT_DOUBLE_EQ(u(0), 0.6);
  EXPECT_DOUBLE_EQ(u(1), 0.8);
  EXPECT_EQ(l2_normalize(vec({1, 0, 0})), vec({1, 0, 0}));
}

TEST(Normalize, ZeroVectorIsDegenerate) {
  try {
    l2_normalize(vec({0, 0}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    EXPECT_STREQ(e.what(), "degenerate feature");
  }
}

TEST(Normalize, UnitNormForRandomVectors) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 200; ++t) {
    FeatureVector v(1 + t % 17);
    for (auto& x : v) x = nd(rng);
    EXPECT_NEAR(l2_normalize(v).norm(), 1.0, 1e-9);
  }
}

TEST(Cosine, AxisCases) {
  EXPECT_DOUBLE_EQ(cosine(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(cosine(vec({1, 1}), vec({2, 2})), 1.0);
  EXPECT_DOUBLE_EQ(cosine(vec({1, 0}), vec({-1, 0})), -1.0);
  EXPECT_THROW(cosine(vec({0, 0}), vec({1, 0})), Error);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int t = 0; t < 500; ++t) {
    FeatureVector a(8), b(8);
    for (auto& x : a) x = nd(rng);
    for (auto& x : b) x = nd(rng);
    EXPECT_EQ(cosine(a, b), cosine(b, a));
    const double lambda = scale(rng);
    EXPECT_NEAR(cosine(lambda * a, b), cosine(a, b), 1e-12);
    const double c = cosine(a, b);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(Cosine, ClampsRoundingExcess) {
  FeatureVector a = vec({0.1, 0.2, 0.3});
  EXPECT_LE(cosine(a, a * 3.0), 1.0);
}

TEST(ClassSimilarities, AxisAligned) {
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 0, 1;
  auto g = class_similarities(vec({1, 0}), w, 0);
  EXPECT_EQ(g.sp, std::vector<double>{1.0});
  EXPECT_EQ(g.sn, std::vector<double>{0.0});

  Eigen::MatrixXd w3(3, 2);
  w3 << 1, 0, 0, 1, -1, 0;
  g = class_similarities(vec({1, 0}), w3, 0);
  EXPECT_EQ(g.sp, std::vector<double>{1.0});
  EXPECT_EQ(g.sn, (std::vector<double>{0.0, -1.0}));
}

TEST(ClassSimilarities, SelfMatchOnSecondClass) {
  Eigen::MatrixXd w(2, 3);
  w << 0.3, -0.2, 0.9, 1.0, 2.0, -1.0;
  const FeatureVector x = w.row(1).transpose();
  const auto g = class_similarities(x, w, 1);
  EXPECT_DOUBLE_EQ(g.sp[0], 1.0);
  ASSERT_EQ(g.l(), 1u);
  EXPECT_DOUBLE_EQ(g.sn[0], cosine(x, w.row(0).transpose()));
}

TEST(ClassSimilarities, ShapeAndErrors) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Random(7, 4);
  const auto g = class_similarities(FeatureVector::Ones(4), w, 3);
  EXPECT_EQ(g.k(), 1u);
  EXPECT_EQ(g.l(), 6u);
  EXPECT_THROW(class_similarities(FeatureVector::Ones(4), w, 7), Error);
  EXPECT_THROW(class_similarities(FeatureVector::Ones(4), w, -1), Error);
  Eigen::MatrixXd zero_row = w;
  zero_row.row(2).setZero();
  EXPECT_THROW(class_similarities(FeatureVector::Ones(4), zero_row, 0), Error);
}

TEST(PairwiseSimilarities, Basic) {
  const std::vector<FeatureVector> pos{vec({1, 0})};
  const std::vector<FeatureVector> neg{vec({0, 1})};
  const auto g = pairwise_similarities(vec({1, 0}), pos, neg);
  EXPECT_EQ(g.sp, std::vector<double>{1.0});
  EXPECT_EQ(g.sn, std::vector<double>{0.0});

  const std::vector<FeatureVector> twins{vec({2, 0}), vec({5, 0})};
  EXPECT_EQ(pairwise_similarities(vec({1, 0}), twins, neg).sp, (std::vector<double>{1.0, 1.0}));
}

TEST(PairwiseSimilarities, EmptySideIsAnError) {
  const std::vector<FeatureVector> pos{vec({1, 0})};
  const std::vector<FeatureVector> none;
  try {
    pairwise_similarities(vec({1, 0}), pos, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty similarity side");
  }
}

}  // namespace
}  // namespace pairsim
