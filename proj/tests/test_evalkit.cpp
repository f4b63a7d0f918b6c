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

#include "pairsim/evalkit.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pairsim/dataio.hpp"
#include "pairsim/error.hpp"

namespace pairsim {
namespace {

EmbeddingModel identity_model(int dim) {
  EmbeddingModel m;
  m.layers.push_back(Eigen::MatrixXd::Identity(dim, dim));
  return m;
}

// Zero-noise clusters on the coordinate axes.
LabeledDataset axis_clusters(int classes, int per_class) {
  LabeledDataset ds;
  ds.num_classes = classes;
  ds.features = Eigen::MatrixXd::Zero(classes * per_class, classes);
  for (int c = 0; c < classes; ++c) {
    for (int k = 0; k < per_class; ++k) {
      ds.features(c * per_class + k, c) = 1.0;
      ds.labels.push_back(c);
    }
  }
  return ds;
}

TEST(Recall, PerfectClusters) {
  const auto ds = axis_clusters(4, 3);
  const std::vector<int> ks{1, 5, 11};
  const auto r = recall_at_k(ds.features, ds.labels, ks);
  EXPECT_EQ(r.at(1), 1.0);
  EXPECT_EQ(r.at(11), 1.0);
}

TEST(Recall, TiesBrokenByIndex) {
  // Query 0 sees rows 1 (other class) and 2 (same class) at equal similarity.
  Eigen::MatrixXd e(3, 2);
  e << 1, 0, 1, 0, 1, 0;
  const std::vector<int> labels{0, 1, 0};
  const std::vector<int> ks{1};
  const auto r = recall_at_k(e, labels, ks);
  // Query 0 -> row 1 (miss), query 1 -> row 0 (miss), query 2 -> row 0 (hit).
  EXPECT_NEAR(r.at(1), 1.0 / 3.0, 1e-15);
}

TEST(Recall, RandomLabelsNearHalf) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  const int m = 2000;
  Eigen::MatrixXd e(m, 8);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = nd(rng);
  std::vector<int> labels(m);
  for (int i = 0; i < m; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
  std::shuffle(labels.begin(), labels.end(), rng);
  const std::vector<int> ks{1};
  EXPECT_NEAR(recall_at_k(e, labels, ks).at(1), 0.5, 0.04);
}

TEST(Recall, MonotoneInK) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd e(60, 4);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = nd(rng);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) labels[static_cast<std::size_t>(i)] = i % 6;
  std::vector<int> ks;
  for (int k = 1; k < 60; ++k) ks.push_back(k);
  const auto r = recall_at_k(e, labels, ks);
  for (int k = 2; k < 60; ++k) EXPECT_GE(r.at(k), r.at(k - 1));
  EXPECT_EQ(r.at(59), 1.0);
}

TEST(Recall, KMustBeBelowCorpusSize) {
  const auto ds = axis_clusters(2, 2);
  const std::vector<int> ks{4};
  EXPECT_THROW(recall_at_k(ds.features, ds.labels, ks), Error);
}

TEST(TarFar, SeparatedScores) {
  const std::vector<double> gen{0.9, 0.8, 0.95};
  const std::vector<double> imp{0.1, 0.2, 0.3, 0.0, -0.5, 0.05, 0.15, 0.25, 0.35, 0.4};
  const std::vector<double> fars{0.1, 0.5, 1.0};
  for (auto [far, tar] : tar_at_far(gen, imp, fars)) EXPECT_EQ(tar, 1.0) << far;
}

TEST(TarFar, ThresholdConvention) {
  const std::vector<double> imp{0.1, 0.2, 0.3, 0.4};
  // At FAR 0.25 one impostor (0.4) may pass; threshold sits just above 0.3.
  const std::vector<double> gen{0.3, 0.35, 0.4};
  const std::vector<double> fars{0.25};
  EXPECT_NEAR(tar_at_far(gen, imp, fars).at(0.25), 2.0 / 3.0, 1e-15);
}

TEST(TarFar, IdenticalDistributions) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u;
  std::vector<double> gen(20000), imp(20000);
  for (auto& v : gen) v = u(rng);
  for (auto& v : imp) v = u(rng);
  const std::vector<double> fars{0.01, 0.1, 0.3, 0.7};
  const auto r = tar_at_far(gen, imp, fars);
  double prev = 0.0;
  for (auto [far, tar] : r) {
    EXPECT_NEAR(tar, far, 0.02);
    EXPECT_GE(tar, prev);
    prev = tar;
  }
}

TEST(TarFar, Granularity) {
  const std::vector<double> gen{0.9};
  const std::vector<double> imp(10, 0.1);
  const std::vector<double> fars{1e-6};
  try {
    tar_at_far(gen, imp, fars);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "insufficient impostor pairs");
  }
}

TEST(Scatter, AxisClustersAtOptimum) {
  const auto ds = axis_clusters(3, 4);
  const auto s = similarity_scatter(identity_model(3), ds);
  ASSERT_EQ(s.points.size(), 12u);
  EXPECT_EQ(s.skipped, 0u);
  for (const auto& p : s.points) {
    EXPECT_EQ(p.sn, 0.0);
    EXPECT_EQ(p.sp, 1.0);
  }
  const auto c = concentration(s.points);
  EXPECT_EQ(c.variance, 0.0);
  EXPECT_EQ(similarity_scatter(identity_model(3), ds, true).points.size(), 12u * 3u * 8u);
}

TEST(Scatter, SingletonsSkipped) {
  auto ds = axis_clusters(3, 2);
  ds.features.conservativeResize(7, 3);
  ds.features.row(6) = Eigen::RowVector3d(1, 1, 1);
  ds.labels.push_back(3);
  ds.num_classes = 4;
  const auto s = similarity_scatter(identity_model(3), ds);
  EXPECT_EQ(s.points.size(), 6u);
  EXPECT_EQ(s.skipped, 1u);
}

TEST(Concentration, PopulationVariance) {
  const std::vector<SimilarityPoint> pts{{0.0, 1.0}, {0.2, 0.8}};
  const auto c = concentration(pts);
  EXPECT_NEAR(c.mean_sn, 0.1, 1e-15);
  EXPECT_NEAR(c.mean_sp, 0.9, 1e-15);
  EXPECT_NEAR(c.variance, 0.02, 1e-15);
}

TEST(Evaluate, ReportAndWriters) {
  const auto ds = axis_clusters(3, 4);
  const std::vector<int> ks{1, 2};
  const std::vector<double> fars{0.1};
  const auto r = evaluate(identity_model(3), ds, ks, fars);
  EXPECT_EQ(r.rank1, 1.0);
  EXPECT_EQ(r.tar_at_far.at(0.1), 1.0);
  std::ostringstream os;
  write_metrics_csv(os, r);
  EXPECT_EQ(os.str().substr(0, 16), "metric,key,value");
  EXPECT_NE(os.str().find("recall_at_k,2,1\n"), std::string::npos);
  EXPECT_NE(os.str().find("rank1,,1\n"), std::string::npos);
  const auto doc = to_json(r);
  EXPECT_EQ(doc.at("rank1"), 1.0);
  EXPECT_EQ(doc.at("scatter").at("count"), 12);
}

TEST(Sweep, RowsInInputOrderAndParallelMatchesSerial) {
  ClusterSpec spec;
  spec.n_classes = 5;
  spec.per_class = 6;
  spec.dim = 6;
  spec.seed = 2;
  const auto ds = gen_clusters(spec);
  TrainConfig base;
  base.iterations = 30;
  base.classes_per_batch = 4;
  base.samples_per_class = 3;
  base.embed_dim = 4;
  base.hidden_dim = 8;
  const std::vector<double> values{64.0, 32.0, 128.0};
  const auto serial = sweep(ds, ds, base, SweepAxis::gamma, values, 1);
  const auto parallel = sweep(ds, ds, base, SweepAxis::gamma, values, 3);
  ASSERT_EQ(serial.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(serial[k].value, values[k]);
    EXPECT_EQ(serial[k].recall_at_1, parallel[k].recall_at_1);
  }
  const std::vector<double> one{0.25};
  EXPECT_EQ(sweep(ds, ds, base, SweepAxis::m, one).size(), 1u);
  EXPECT_THROW(sweep(ds, ds, base, SweepAxis::m, std::span<const double>{}), Error);
  std::ostringstream os;
  write_sweep_csv(os, SweepAxis::gamma, serial);
  EXPECT_EQ(os.str().substr(0, 18), "gamma,recall_at_1\n");
}

}  // namespace
}  // namespace pairsim
