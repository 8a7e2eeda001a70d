// Copyright 2026 The shiftcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shiftcert/io.h"

namespace shiftcert {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "shiftcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::TempDir() + "/cli_test";
    std::filesystem::create_directories(dir_);
    ASSERT_EQ(Invoke({"gen-data", "--n", "300", "--classes", "3", "--size", "4",
                   "--seed", "1", "--out", Path("data.scrt")})
                  .code,
              0);
    ASSERT_EQ(Invoke({"gen-data", "--n", "60", "--classes", "2", "--size", "4",
                   "--seed", "2", "--out", Path("binary.scrt")})
                  .code,
              0);
    ASSERT_EQ(Invoke({"train", "--data", Path("data.scrt"), "--epochs", "5",
                   "--smoothing", "gaussian-cs", "--scale", "0.5", "--out",
                   Path("model.json")})
                  .code,
              0);
    ASSERT_EQ(Invoke({"train", "--data", Path("binary.scrt"), "--epochs", "5",
                   "--out", Path("binary.json")})
                  .code,
              0);
  }

  static std::string Path(const std::string& name) { return dir_ + "/" + name; }

  static nlohmann::json Sidecar(const std::string& name) {
    return nlohmann::json::parse(ReadFile(Path(name) + ".json"));
  }

  static inline std::string dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(Invoke({"--version"}).code, kExitOk);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(Invoke({"certify", "--data", Path("data.scrt")}).code,
            kExitConfig);
}

TEST_F(CliTest, ConfigValidation) {
  const std::vector<std::string> base = {"certify", "--data", Path("data.scrt"),
                                         "--model", Path("model.json"),
                                         "--out", Path("bad.csv")};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return Invoke(args);
  };
  const Result alpha = with({"--alpha", "1.5"});
  EXPECT_EQ(alpha.code, kExitConfig);
  EXPECT_FALSE(alpha.err.empty());
  EXPECT_EQ(with({"--psi", "zero"}).code, kExitConfig);
  EXPECT_EQ(with({"--smoothing", "laplace"}).code, kExitConfig);
  EXPECT_EQ(with({"--scale", "-1"}).code, kExitConfig);
  EXPECT_FALSE(std::filesystem::exists(Path("bad.csv")));
}

TEST_F(CliTest, RuntimeFailureExitsTwo) {
  const Result r = Invoke({"certify", "--data", Path("missing.scrt"), "--model",
                        Path("model.json"), "--out", Path("x.csv")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(Path("x.csv")));
}

TEST_F(CliTest, CertifyIsReproducibleAcrossThreads) {
  auto run = [&](const std::string& threads) {
    EXPECT_EQ(Invoke({"certify", "--data", Path("data.scrt"), "--model",
                      Path("model.json"), "--smoothing", "gaussian-cs",
                      "--scale", "0.5", "--seed", "7", "--threads", threads,
                      "--out", Path("c.csv")})
                  .code,
              0);
    return std::make_pair(ReadFile(Path("c.csv")), ReadFile(Path("c.csv.json")));
  };
  const auto first = run("1");
  EXPECT_EQ(first, run("1"));
  EXPECT_EQ(first, run("4"));
  const auto meta = Sidecar("c.csv");
  EXPECT_EQ(meta["manifest"]["master_seed"], 7);
  EXPECT_EQ(meta["manifest"]["config"]["smoothing"], "gaussian-cs");
  EXPECT_FALSE(meta["manifest"]["config"].contains("threads"));
  EXPECT_EQ(first.first.rfind("epsilon,lower_bound\n", 0), 0u);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const std::string cfg = Path("run.toml");
  {
    std::ofstream f(cfg);
    f << "[certify]\nalpha = 0.01\ngrid-points = 8\nseed = 3\n";
  }
  ASSERT_EQ(Invoke({"certify", "--config", cfg, "--data", Path("data.scrt"),
                 "--model", Path("model.json"), "--seed", "5", "--out",
                 Path("cfg.csv")})
                .code,
            0);
  const auto meta = Sidecar("cfg.csv");
  EXPECT_EQ(meta["manifest"]["master_seed"], 5);
  EXPECT_EQ(meta["manifest"]["config"]["alpha"], "0.01");
  const std::string csv = ReadFile(Path("cfg.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST_F(CliTest, ConfigFileBeforeSubcommand) {
  const std::string cfg = Path("root.toml");
  {
    std::ofstream f(cfg);
    f << "[certify]\ngrid-points = 4\n";
  }
  ASSERT_EQ(Invoke({"--config", cfg, "certify", "--data", Path("data.scrt"),
                    "--model", Path("model.json"), "--out", Path("root.csv")})
                .code,
            0);
  const std::string csv = ReadFile(Path("root.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(CliTest, TvCheckPasses) {
  for (const std::string name : {"gaussian-cs", "uniform-sv", "uniform-hue"}) {
    const Result r = Invoke({"tv-check", "--smoothing", name, "--scale", "1",
                          "--trials", "20", "--samples", "2000", "--out",
                          Path("tv.csv")});
    EXPECT_EQ(r.code, kExitOk) << name << r.err;
  }
}

TEST_F(CliTest, PsiTableRow) {
  ASSERT_EQ(Invoke({"psi-table", "--smoothing", "gaussian-cs", "--scale", "0.5",
                 "--eps", "1.4142135623730951", "--samples", "1000", "--out",
                 Path("psi.csv")})
                .code,
            0);
  const std::string csv = ReadFile(Path("psi.csv"));
  EXPECT_EQ(csv.rfind("epsilon,psi,tv_exact,tv_mc,tv_mc_stderr\n", 0), 0u);
  EXPECT_NE(csv.find(",0.842700792949715"), std::string::npos);
}

TEST_F(CliTest, ShiftEvalAttackAndPoison) {
  EXPECT_EQ(Invoke({"shift-eval", "--data", Path("data.scrt"), "--model",
                 Path("model.json"), "--smoothing", "gaussian-cs", "--scale",
                 "0.5", "--out", Path("shift.csv")})
                .code,
            kExitOk);
  EXPECT_EQ(ReadFile(Path("shift.csv")).rfind("epsilon,wasserstein_bound,", 0),
            0u);

  ASSERT_EQ(Invoke({"attack", "--data", Path("binary.scrt"), "--model",
                 Path("binary.json"), "--kind", "strategic", "--smoothing",
                 "pixel-gaussian", "--scale", "0.5", "--gammas", "0,1",
                 "--out", Path("attack.csv")})
                .code,
            kExitOk);
  const std::string attack = ReadFile(Path("attack.csv"));
  EXPECT_EQ(attack.rfind("gamma,wasserstein_bound,accuracy,attacked_fraction\n", 0),
            0u);
  EXPECT_EQ(std::count(attack.begin(), attack.end(), '\n'), 3);

  EXPECT_EQ(Invoke({"attack", "--data", Path("binary.scrt"), "--model",
                 Path("binary.json"), "--kind", "sideways", "--out",
                 Path("attack2.csv")})
                .code,
            kExitConfig);

  ASSERT_EQ(Invoke({"poison", "--data", Path("data.scrt"), "--splits",
                 "60,60,60,60", "--eps", "0.5", "--smoothing", "pixel-gaussian",
                 "--scale", "0.5", "--victim-epochs", "3", "--out",
                 Path("poison.csv")})
                .code,
            kExitOk);
  const auto meta = Sidecar("poison.csv");
  EXPECT_TRUE(meta.contains("manifest"));
  EXPECT_EQ(Invoke({"poison", "--data", Path("data.scrt"), "--smoothing",
                 "gaussian-cs", "--out", Path("poison2.csv")})
                .code,
            kExitConfig);
}

}  // namespace
}  // namespace shiftcert
