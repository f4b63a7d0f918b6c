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

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "pairsim/dataio.hpp"

namespace pairsim {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pairsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pairsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string make_data(const std::string& name, const std::string& sigma = "0.1") {
    const auto r = run_cli({"gen", "--classes", "6", "--per-class", "5", "--dim", "8", "--sigma", sigma, "--seed",
                            "7", "-o", path(name), "--out-dir", path("runs")});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(Cli, GenWritesDatasetAndIsReproducible) {
  const auto r = run_cli({"gen", "--classes", "16", "--per-class", "20", "--dim", "32", "--sigma", "0.1", "--seed",
                          "7", "-o", path("data.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ds = load_dataset(fs::path(path("data.csv")));
  EXPECT_EQ(ds.size(), 320);
  const std::string first = slurp(path("data.csv"));
  ASSERT_EQ(run_cli({"gen", "--classes", "16", "--per-class", "20", "--dim", "32", "--sigma", "0.1", "--seed", "7",
                     "-o", path("data.csv")})
                .code,
            0);
  EXPECT_EQ(slurp(path("data.csv")), first);
  EXPECT_TRUE(fs::exists(path("data.csv.config.json")));
}

TEST_F(Cli, GenWithoutOutputIsUsageError) {
  const auto r = run_cli({"gen", "--classes", "4"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: usage:", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, TrainWritesRunDirectory) {
  const auto data = make_data("d.csv");
  const auto r = run_cli({"train", "--data", data, "--loss", "circle", "--gamma", "256", "--m", "0.25",
                          "--iterations", "15", "--P", "4", "--K", "3", "--embed-dim", "4", "--hidden", "8",
                          "--out-dir", path("runs"), "--tag", "t"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path run = first_line(r.out);
  EXPECT_EQ(run.parent_path(), fs::path(path("runs")));
  EXPECT_EQ(run.filename().string().rfind("t-", 0), 0u);
  EXPECT_TRUE(fs::exists(run / "checkpoint.json"));
  EXPECT_TRUE(fs::exists(run / "config.json"));
  const std::string record = slurp(run / "record.csv");
  EXPECT_EQ(first_line(record), "iter,mean_sp,mean_sn,loss,lr");
  EXPECT_EQ(std::count(record.begin(), record.end(), '\n'), 16);
  const auto cfg = nlohmann::json::parse(slurp(run / "config.json"));
  EXPECT_EQ(cfg.dump().find("\"gamma\":256") != std::string::npos, true) << cfg.dump();
}

TEST_F(Cli, TrainTwiceIsByteIdentical) {
  const auto data = make_data("d.csv");
  const std::vector<std::string> flags{"train", "--data", data, "--loss", "triplet", "--m", "0.3", "--iterations",
                                       "10", "--P", "3", "--K", "2", "--embed-dim", "4", "--hidden", "0",
                                       "--out-dir"};
  auto a_flags = flags;
  a_flags.push_back(path("a"));
  auto b_flags = flags;
  b_flags.push_back(path("b"));
  const auto a = run_cli(a_flags);
  const auto b = run_cli(b_flags);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const fs::path ra = first_line(a.out), rb = first_line(b.out);
  EXPECT_EQ(ra.filename(), rb.filename());
  for (const char* f : {"checkpoint.json", "record.csv", "config.json"}) EXPECT_EQ(slurp(ra / f), slurp(rb / f)) << f;
}

TEST_F(Cli, InvalidLossListsValidIds) {
  const auto r = run_cli({"train", "--data", "x.csv", "--loss", "arcface"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("circle,am_softmax,normface,softmax,triplet,unified"), std::string::npos) << r.err;
}

TEST_F(Cli, ConfigFileOverridesFlags) {
  const auto data = make_data("d.csv");
  std::ofstream(path("over.json")) << R"({"train": {"iterations": 3, "gamma": 32}})";
  const auto r = run_cli({"train", "--data", data, "--iterations", "20", "--P", "3", "--K", "2", "--embed-dim", "3",
                          "--hidden", "0", "--config", path("over.json"), "--out-dir", path("runs")});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path run = first_line(r.out);
  const std::string record = slurp(run / "record.csv");
  EXPECT_EQ(std::count(record.begin(), record.end(), '\n'), 4);
  const auto echoed = nlohmann::json::parse(slurp(run / "config.json"));
  EXPECT_EQ(echoed.at("train").at("gamma"), 32.0);
  EXPECT_EQ(echoed.at("train").at("iterations"), 3);
}

TEST_F(Cli, EvalZeroNoise) {
  const auto data = make_data("clean.csv", "0");
  const auto t = run_cli({"train", "--data", data, "--iterations", "2", "--P", "3", "--K", "2", "--embed-dim", "8",
                          "--hidden", "0", "--out-dir", path("runs")});
  ASSERT_EQ(t.code, 0) << t.err;
  const fs::path ck = fs::path(first_line(t.out)) / "checkpoint.json";
  const auto e = run_cli({"eval", "--checkpoint", ck.string(), "--data", data, "--scatter", "--ks", "1,2", "--far",
                          "0.1", "--out-dir", path("eval")});
  ASSERT_EQ(e.code, 0) << e.err;
  const fs::path run = first_line(e.out);
  EXPECT_NE(slurp(run / "metrics.csv").find("rank1,,1\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(run / "summary.json"));
  EXPECT_EQ(first_line(slurp(run / "scatter.csv")), "sn,sp");
}

TEST_F(Cli, EvalMissingCheckpoint) {
  const auto data = make_data("d.csv");
  const auto e = run_cli({"eval", "--checkpoint", path("nope.json"), "--data", data, "--out-dir", path("eval")});
  EXPECT_EQ(e.code, 1);
  EXPECT_EQ(e.err.rfind("error: io:", 0), 0u) << e.err;
}

TEST_F(Cli, GradfieldPanels) {
  auto r = run_cli({"gradfield", "--resolution", "5", "--out-dir", path("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  const std::string panel = slurp(first_line(r.out));
  EXPECT_EQ(first_line(panel), "sn,sp,d_sn,d_sp,loss");
  EXPECT_EQ(std::count(panel.begin(), panel.end(), '\n'), 26);

  r = run_cli({"gradfield", "--loss", "circle", "--m", "0.2,0.25,0.3", "--resolution", "4", "--out-dir", path("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_NE(r.out.find("gradfield_circle_g256_m0.3.csv"), std::string::npos) << r.out;

  r = run_cli({"gradfield", "--resolution", "1", "--out-dir", path("f")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, SweepRowsAndEmptyValues) {
  const auto data = make_data("d.csv");
  auto r = run_cli({"sweep", "--data", data, "--axis", "gamma", "--values", "32,64", "--iterations", "5", "--P", "3",
                    "--K", "2", "--embed-dim", "4", "--hidden", "0", "--out-dir", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(first_line(r.out));
  EXPECT_EQ(first_line(csv), "gamma,recall_at_1");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);

  r = run_cli({"sweep", "--data", data, "--values", "", "--out-dir", path("s")});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST_F(Cli, BinaryReportsUsageExitCode) {
  const std::string cmd = std::string(PAIRSIM_CLI_BINARY) + " gen > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

}  // namespace
}  // namespace pairsim
