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

#include "ppcert/json_io.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ppcert/errors.hpp"
#include "ppcert/generators.hpp"

namespace ppcert {
namespace {

TEST(JsonParse, MechanismRoundTrip) {
  const Json j = Json::parse(R"({
    "universe": [0, 1],
    "alphabet": [0, 1],
    "kernel": [[0.75, 0.25], [0.25, 0.75]]
  })");
  const FiniteMechanism mech = parse_mechanism(j);
  EXPECT_EQ(mech.n_datasets(), 2);
  EXPECT_DOUBLE_EQ(mech.prob(0, 0), 0.75);
  const Json back = to_json(mech);
  const FiniteMechanism again = parse_mechanism(back);
  EXPECT_TRUE(again.kernel().isApprox(mech.kernel(), 0.0));
  EXPECT_TRUE(again.universe() == mech.universe());
}

TEST(JsonParse, MalformedKernelRowNamesTheRow) {
  const Json j = Json::parse(R"({
    "universe": ["a", "b"],
    "alphabet": ["0", "1"],
    "kernel": [[0.5, 0.5], [0.4, 0.5]]
  })");
  try {
    parse_mechanism(j);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(JsonParse, BeliefKindsAndValidation) {
  const auto finite = parse_belief(Json::parse(
      R"({"kind":"finite","universe":["a","b"],"probs":[0.25,0.75]})"));
  EXPECT_TRUE(std::holds_alternative<FiniteBelief>(finite));
  const auto gaussian = parse_belief(Json::parse(
      R"({"kind":"gaussian","mean":[0,0],"cov":[[1,0],[0,1]]})"));
  EXPECT_TRUE(std::holds_alternative<GaussianBelief>(gaussian));
  EXPECT_THROW(parse_belief(Json::parse(
                   R"({"kind":"finite","universe":["a"],"probs":[0.5]})")),
               ParseError);
}

TEST(JsonParse, TupleUniverseAndNeighbors) {
  const Universe u = parse_universe(Json::parse(R"([[0,0],[0,1],[1,1]])"));
  EXPECT_EQ(u.size(), 3);
  EXPECT_EQ(u.point_dim(), 2);
  EXPECT_EQ(u.id(0), "(0,0)");
  const NeighborRelation nb =
      parse_neighbors(Json::parse(R"x([["(0,0)","(0,1)"]])x"));
  EXPECT_EQ(nb.pairs().size(), 1u);
  EXPECT_THROW(parse_neighbors(Json::parse(R"([["a"]])")), ParseError);
}

TEST(JsonParse, RulesAndGuarantee) {
  EXPECT_TRUE(std::holds_alternative<IntervalRule>(
      parse_rule(Json::parse(R"({"rule":"interval","s":2.0})"))));
  EXPECT_TRUE(std::holds_alternative<NegLogProbRule>(
      parse_rule(Json::parse(R"({"rule":"neglogprob"})"))));
  EXPECT_TRUE(std::holds_alternative<MarginalDssRule>(
      parse_rule(Json::parse(R"({"rule":"dss","i":2})"))));
  EXPECT_THROW(parse_rule(Json::parse(R"({"rule":"crps"})")), ParseError);

  const Json g = Json::parse(R"({
    "scores": [{"rule": "neglogprob"}],
    "prior_class": {"class": "neighbor_two_point",
                    "neighbors": [["0", "1"]],
                    "w_grid": {"points": 11}},
    "kappa": 1.0986122886681098,
    "exp_kappa": [3, 1],
    "delta": 0.0
  })");
  const GuaranteeSpec spec = parse_guarantee(g);
  EXPECT_EQ(spec.scores.size(), 1u);
  ASSERT_TRUE(spec.kappa.exp_exact().has_value());
  EXPECT_EQ(*spec.kappa.exp_exact(), Rational(3));
  const auto* cls = std::get_if<NeighborTwoPointClass>(&spec.prior_class);
  ASSERT_NE(cls, nullptr);
  EXPECT_EQ(cls->w_grid.points, 11);
}

TEST(JsonParse, GaussianPriorClass) {
  const Json g = Json::parse(R"({
    "scores": [{"rule": "dss", "i": 1}, {"rule": "dss", "i": 2}],
    "prior_class": {"class": "gaussian", "r1": 2.0, "r2": 2.0,
                    "x": [1.0, 1.0], "samples": 50},
    "kappa": 2.6931471805599454,
    "delta": 0.0
  })");
  const GuaranteeSpec spec = parse_guarantee(g);
  const auto* cls = std::get_if<GaussianPriorClass>(&spec.prior_class);
  ASSERT_NE(cls, nullptr);
  EXPECT_EQ(cls->samples, 50);
  EXPECT_DOUBLE_EQ(cls->spec.r1, 2.0);
}

TEST(JsonDump, SeventeenDigitDoublesRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double v = std::ldexp(unif(rng), i % 64 - 32);
    const Json j = Json{{"v", v}};
    const std::string text = dump_json_17(j);
    EXPECT_DOUBLE_EQ(Json::parse(text).at("v").get<double>(), v) << text;
  }
  // Integral doubles keep a decimal point so they re-parse as doubles.
  EXPECT_NE(dump_json_17(Json{{"v", 3.0}}).find("3.0"), std::string::npos);
  // Non-finite values serialize as null.
  EXPECT_NE(dump_json_17(Json{{"v", std::numeric_limits<double>::infinity()}})
                .find("null"),
            std::string::npos);
}

TEST(JsonDump, DeterministicKeyOrder) {
  Json a;
  a["zeta"] = 1;
  a["alpha"] = 2;
  Json b;
  b["alpha"] = 2;
  b["zeta"] = 1;
  EXPECT_EQ(dump_json_17(a), dump_json_17(b));
}

TEST(JsonDump, CsvEscapesCommas) {
  std::vector<EvalRow> rows = {{"neglogprob", "0", "twopoint(0>1,w=0.5)", 1.0}};
  const std::string csv = rows_to_csv(rows);
  EXPECT_NE(csv.find("\"twopoint(0>1,w=0.5)\""), std::string::npos);
  EXPECT_EQ(csv.substr(0, 25), "score,dataset,prior,tail\n");
}

TEST(JsonIo, LoadArgumentInlineOrFile) {
  const Json inline_json = load_json_argument(R"({"a": 1})");
  EXPECT_EQ(inline_json.at("a").get<int>(), 1);
  const std::string path = ::testing::TempDir() + "/ppcert_io_test.json";
  write_file_atomic(path, "[1, 2, 3]\n");
  const Json from_file = load_json_argument(path);
  EXPECT_EQ(from_file.size(), 3u);
  EXPECT_THROW(load_json_argument("{broken"), ParseError);
  EXPECT_THROW(load_json_argument("/nonexistent/path.json"), ParseError);
}

TEST(JsonIo, PrivacyFunctionRoundTripWithInfiniteEntries) {
  const Universe u = scalar_universe({0, 1});
  Eigen::MatrixXd table(2, 2);
  table << 0.0, 1.0, std::numeric_limits<double>::infinity(), 0.5;
  const PrivacyFunction rho({"d0", "d1"}, u, table);
  const PrivacyFunction back = parse_privacy_function(to_json(rho));
  EXPECT_EQ(back.decisions, rho.decisions);
  EXPECT_TRUE(std::isinf(back.rho(1, 0)));
  EXPECT_DOUBLE_EQ(back.rho(1, 1), 0.5);
}

TEST(JsonIo, BeliefSerializationRoundTrip) {
  std::mt19937_64 rng(12);
  const Universe u = scalar_universe({0, 1, 2});
  const FiniteBelief belief = random_belief(rng, u);
  const FiniteBelief back = parse_finite_belief(to_json(belief));
  EXPECT_TRUE((back.probs().array() == belief.probs().array()).all());

  const GaussianBelief g = random_gaussian(rng, 3);
  const GaussianBelief gback = parse_gaussian_belief(to_json(g));
  EXPECT_TRUE((gback.mean().array() == g.mean().array()).all());
  EXPECT_TRUE((gback.cov().array() == g.cov().array()).all());
}

}  // namespace
}  // namespace ppcert
