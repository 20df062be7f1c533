// Copyright 2026 The ppcert Authors
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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string command =
      std::string(PPCERT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) {
    output.append(buf, n);
  }
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

std::string strip_timestamp(const std::string& text) {
  return std::regex_replace(text, std::regex("\"timestamp\": \"[^\"]*\""),
                            "\"timestamp\": \"X\"");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    rr_path_ = temp_path("rr.json");
    write_file(rr_path_, R"({
      "universe": [0, 1],
      "alphabet": [0, 1],
      "kernel": [[0.75, 0.25], [0.25, 0.75]]
    })");
    guarantee_path_ = temp_path("guarantee.json");
    write_file(guarantee_path_, R"({
      "scores": [{"rule": "neglogprob"}],
      "prior_class": {"class": "neighbor_two_point",
                      "neighbors": [["0", "1"]]},
      "kappa": 1.0986122886681098,
      "exp_kappa": [3, 1],
      "delta": 0.0
    })");
  }

  std::string rr_path_;
  std::string guarantee_path_;
};

TEST_F(CliTest, PdpOnRandomizedResponseExitsZero) {
  const RunResult result = run_cli("certify-pdp --mechanism " + rr_path_ +
                                   " --eps 1.0986122886681098");
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"attained_delta\": 0.0"), std::string::npos);
}

TEST_F(CliTest, PpMatchesPdpOnTheSameFixture) {
  const RunResult result = run_cli("certify-pp --mechanism " + rr_path_ +
                                   " --guarantee " + guarantee_path_);
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"verdict\": true"), std::string::npos);
}

TEST_F(CliTest, VerdictFalseExitsThree) {
  const RunResult result = run_cli("certify-pdp --mechanism " + rr_path_ +
                                   " --eps 1.0");
  EXPECT_EQ(result.exit_code, 3) << result.output;
}

TEST_F(CliTest, MalformedKernelRowExitsTwoAndNamesTheRow) {
  const std::string bad = temp_path("bad.json");
  write_file(bad, R"({
    "universe": [0, 1],
    "alphabet": [0, 1],
    "kernel": [[0.5, 0.5], [0.4, 0.5]]
  })");
  const RunResult result =
      run_cli("certify-pdp --mechanism " + bad + " --eps 1.0");
  EXPECT_EQ(result.exit_code, 2) << result.output;
  EXPECT_NE(result.output.find("row 1"), std::string::npos);
}

TEST_F(CliTest, StructuralErrorExitsFour) {
  // Post-processing kernel that depends on the data.
  const std::string kernel = temp_path("dependent.json");
  write_file(kernel, R"({
    "universe": [0, 1],
    "input_alphabet": [0, 1],
    "alphabet": ["u0", "u1"],
    "kernel": [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0], [0.5, 0.5]]
  })");
  const RunResult result =
      run_cli("postprocess --mechanism " + rr_path_ + " --kernel " + kernel +
              " --guarantee " + guarantee_path_);
  EXPECT_EQ(result.exit_code, 4) << result.output;
}

TEST_F(CliTest, ReportsAreByteIdenticalModuloTimestamp) {
  const std::string out1 = temp_path("report1.json");
  const std::string out2 = temp_path("report2.json");
  const std::string args = "certify-pp --mechanism " + rr_path_ +
                           " --guarantee " + guarantee_path_ + " --out ";
  EXPECT_EQ(run_cli(args + out1).exit_code, 0);
  EXPECT_EQ(run_cli(args + out2).exit_code, 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(strip_timestamp(sa.str()), strip_timestamp(sb.str()));
  EXPECT_NE(sa.str().find("\"tool\": \"ppcert\""), std::string::npos);
}

TEST_F(CliTest, CsvEmitsOneRowPerEvaluation) {
  const RunResult result = run_cli("certify-pp --mechanism " + rr_path_ +
                                   " --guarantee " + guarantee_path_ +
                                   " --format csv --grid 5");
  EXPECT_EQ(result.exit_code, 0);
  // Header plus (limit + 5 grid weights) rows per ordered pair.
  int lines = 0;
  for (char c : result.output) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 2 * 6);
  EXPECT_EQ(result.output.substr(0, 25), "score,dataset,prior,tail\n");
}

TEST_F(CliTest, CsvForPdpAndAverage) {
  const RunResult pdp = run_cli("certify-pdp --mechanism " + rr_path_ +
                                " --eps 1.0986122886681098 --format csv");
  EXPECT_EQ(pdp.exit_code, 0);
  EXPECT_EQ(pdp.output.substr(0, 25), "score,dataset,prior,tail\n");

  const std::string guarantee = temp_path("avg_csv.json");
  write_file(guarantee, R"({
    "scores": [{"rule": "dss", "i": 1}],
    "prior_class": {"class": "gaussian", "r1": 2.0, "r2": 2.0,
                    "x": [1.0, 1.0], "samples": 50},
    "kappa": 2.6931471805599454,
    "delta": 0.0
  })");
  const RunResult avg =
      run_cli("average --guarantee " + guarantee + " --seed 3 --format csv");
  EXPECT_EQ(avg.exit_code, 0);
  int lines = 0;
  for (char c : avg.output) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 50);  // header + one row per sampled prior
}

TEST_F(CliTest, EquivalenceCommand) {
  const RunResult result =
      run_cli("equivalence --mechanism " + rr_path_ +
              " --eps 1.0986122886681098 --exp-eps 3/1 --delta 0");
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"agree\": true"), std::string::npos);
}

TEST_F(CliTest, AverageCommand) {
  const std::string guarantee = temp_path("avg.json");
  write_file(guarantee, R"({
    "scores": [{"rule": "dss", "i": 1}, {"rule": "dss", "i": 2}],
    "prior_class": {"class": "gaussian", "r1": 2.0, "r2": 2.0,
                    "x": [1.0, 1.0], "samples": 200},
    "kappa": 2.6931471805599454,
    "delta": 0.0
  })");
  const RunResult result =
      run_cli("average --guarantee " + guarantee + " --seed 7");
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"pass\": true"), std::string::npos);
  EXPECT_NE(result.output.find("\"method\": \"monte-carlo\""),
            std::string::npos);
}

TEST_F(CliTest, ComposeCommand) {
  const RunResult result = run_cli(
      "compose --mechanism " + rr_path_ + " --mechanism2 " + rr_path_ +
      " --guarantee " + guarantee_path_ +
      " --kappa2 1.0986122886681098 --exp-kappa2 3/1 --delta2 0");
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"bound_holds\": true"), std::string::npos);
}

TEST_F(CliTest, SearchCommandFindsWitness) {
  const RunResult result = run_cli("search-ce --seed 2026 --samples 200000");
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("\"mk_attained_delta\""), std::string::npos);
}

TEST_F(CliTest, MissingInputFileIsAParseError) {
  const RunResult result =
      run_cli("certify-pdp --mechanism /no/such/file.json --eps 1.0");
  EXPECT_EQ(result.exit_code, 2);
}

}  // namespace
