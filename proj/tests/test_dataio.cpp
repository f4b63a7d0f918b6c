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

#include "pairsim/dataio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pairsim/error.hpp"

namespace pairsim {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pairsim_dataio_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void expect_parse_error(const std::string& text, const std::string& needle) {
  std::istringstream is(text);
  try {
    load_dataset(is);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(GenClusters, Deterministic) {
  ClusterSpec spec;
  spec.seed = 9;
  const auto a = gen_clusters(spec);
  const auto b = gen_clusters(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.size(), 320);
  EXPECT_EQ(a.dim(), 32);
  EXPECT_EQ(a.num_classes, 16);
  spec.seed = 10;
  EXPECT_NE(gen_clusters(spec).features, a.features);
}

TEST(GenClusters, ZeroNoiseCollapsesClasses) {
  ClusterSpec spec;
  spec.n_classes = 4;
  spec.per_class = 5;
  spec.dim = 6;
  spec.noise_sigma = 0.0;
  spec.center_scale = 2.5;
  const auto ds = gen_clusters(spec);
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    const Eigen::Index first = (r / 5) * 5;
    EXPECT_EQ(ds.features.row(r), ds.features.row(first));
    EXPECT_NEAR(ds.features.row(r).norm(), 2.5, 1e-12);
  }
}

TEST(GenClusters, TwoClassesSeparable) {
  ClusterSpec spec;
  spec.n_classes = 2;
  spec.per_class = 100;
  spec.dim = 2;
  spec.noise_sigma = 0.01;
  spec.seed = 3;
  const auto ds = gen_clusters(spec);
  const Eigen::RowVector2d c0 = ds.features.topRows(100).colwise().mean();
  const Eigen::RowVector2d c1 = ds.features.bottomRows(100).colwise().mean();
  const Eigen::RowVector2d w = c0 - c1;
  const double mid = 0.5 * (c0 + c1).dot(w);
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    EXPECT_EQ(ds.features.row(r).dot(w) > mid, ds.labels[static_cast<std::size_t>(r)] == 0);
  }
}

TEST(GenClusters, RejectsBadSpec) {
  ClusterSpec spec;
  spec.n_classes = 1;
  EXPECT_THROW(gen_clusters(spec), Error);
  spec = {};
  spec.noise_sigma = -1.0;
  EXPECT_THROW(gen_clusters(spec), Error);
}

TEST(DatasetCsv, RoundTripIsExact) {
  ClusterSpec spec;
  spec.n_classes = 3;
  spec.per_class = 4;
  spec.dim = 5;
  spec.seed = 1;
  const auto ds = gen_clusters(spec);
  std::stringstream ss;
  save_dataset(ss, ds);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "label,f0,f1,f2,f3,f4");
  const auto back = load_dataset(ss);
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.num_classes, 3);
}

TEST(DatasetCsv, Errors) {
  expect_parse_error("", "no rows");
  expect_parse_error("label,f0\n", "no rows");
  expect_parse_error("label,f0,f1\n0,1,2\n1,3\n", "line 3");
  expect_parse_error("label,f0\n0,1\n1,x\n", "line 3");
  expect_parse_error("label,f0\n0,1\nq,2\n", "line 3: unknown label");
  expect_parse_error("label,f0\n0,1\n3,2\n", "line 3: unknown label");
  expect_parse_error("name,f0\n0,1\n", "line 1");
}

TEST_F(TempDir, CheckpointSaveLoadSaveIsByteIdentical) {
  Checkpoint ck;
  ck.model = init_model(4, 6, 3, 5, 7);
  ck.paradigm = Paradigm::class_level;
  ck.config = {{"lr", 0.1}, {"loss", "circle"}};
  save_checkpoint(dir_ / "a.json", ck);
  const Checkpoint back = read_checkpoint(dir_ / "a.json");
  save_checkpoint(dir_ / "b.json", back);
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json"));
  EXPECT_EQ(back.model.layers[0], ck.model.layers[0]);
  EXPECT_EQ(back.model.layers[1], ck.model.layers[1]);
  EXPECT_EQ(*back.model.class_weights, *ck.model.class_weights);
  EXPECT_EQ(back.paradigm, Paradigm::class_level);
  EXPECT_NE(slurp(dir_ / "a.json").find("pairsim-ckpt-v1"), std::string::npos);
}

TEST_F(TempDir, LoadCheckpointChecksDimensions) {
  Checkpoint ck;
  ck.model = init_model(4, 6, 3);
  save_checkpoint(dir_ / "ck.json", ck);
  EmbeddingModel same = init_model(0, 6, 3);
  EXPECT_NO_THROW(load_checkpoint(dir_ / "ck.json", same));
  EXPECT_EQ(same.layers[0], ck.model.layers[0]);
  EmbeddingModel wrong = init_model(0, 7, 3);
  EXPECT_THROW(load_checkpoint(dir_ / "ck.json", wrong), Error);
}

TEST_F(TempDir, CheckpointVersionMismatch) {
  Checkpoint ck;
  ck.model = init_model(4, 6, 3);
  auto doc = to_json(ck);
  doc["format"] = "pairsim-ckpt-v0";
  try {
    checkpoint_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::version);
  }
  EXPECT_THROW(read_checkpoint(dir_ / "missing.json"), Error);
}

TEST(Record, CsvRows) {
  RunRecord rec;
  rec.rows = {{0, 0.1, 0.2, 0.3, 0.1}, {1, 0.25, -0.5, 1.0 / 3.0, 0.01}};
  std::ostringstream os;
  save_record(os, rec);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "iter,mean_sp,mean_sn,loss,lr");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
  EXPECT_NE(os.str().find("0.3333333333333333"), std::string::npos);
}

TEST(ConfigJson, RoundTrip) {
  TrainConfig c;
  c.paradigm = Paradigm::class_level;
  c.loss = {LossId::am_softmax, 64.0, 0.35};
  c.lr = 0.05;
  c.iterations = 12;
  c.hidden_dim = std::nullopt;
  c.activation = Activation::relu;
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.lr_schedule = {{0.25, 0.5}};
  const auto back = train_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_FALSE(back.hidden_dim.has_value());
}

}  // namespace
}  // namespace pairsim
