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
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ppcert/errors.hpp"

namespace ppcert {

namespace {

const Json& require_field(const Json& j, const char* key,
                          const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("missing field '" + std::string(key) + "'", where);
  }
  return j.at(key);
}

double require_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("expected a number", where);
  return j.get<double>();
}

Eigen::VectorXd parse_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("expected an array", where);
  Eigen::VectorXd out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out(i) = require_number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Eigen::MatrixXd parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("expected a non-empty array of rows", where);
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd out(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_where = where + " row " + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError("rows must be equal-length arrays", row_where);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = require_number(j[r][c],
                                 row_where + " col " + std::to_string(c));
    }
  }
  return out;
}

std::vector<std::string> parse_symbols(const Json& j,
                                       const std::string& where) {
  if (!j.is_array()) throw ParseError("expected an array of symbols", where);
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number()) {
      out.push_back(render_scalar_id(e.get<double>()));
    } else {
      throw ParseError("symbols must be strings or numbers",
                       where + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

void format_double(double v, std::string& out) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
  // Keep integral doubles recognizable as numbers that re-parse as doubles.
  if (out.find_first_of(".eE", out.size() - std::strlen(buf)) ==
      std::string::npos) {
    out += ".0";
  }
}

void dump_value(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
      out += j.dump();
      break;
    case Json::value_t::number_float:
      format_double(j.get<double>(), out);
      break;
    case Json::value_t::string:
      out += j.dump();  // escaped
      break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_value(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in + Json(it.key()).dump() + ": ";
        dump_value(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      break;
    }
    default:
      out += "null";
  }
}

Json universe_to_json(const Universe& u) {
  Json out = Json::array();
  for (int i = 0; i < u.size(); ++i) {
    if (u.has_points()) {
      if (u.point_dim() == 1) {
        out.push_back(u.point(i)(0));
      } else {
        Json tuple = Json::array();
        for (int c = 0; c < u.point_dim(); ++c) tuple.push_back(u.point(i)(c));
        out.push_back(tuple);
      }
    } else {
      out.push_back(u.id(i));
    }
  }
  return out;
}

Json rows_json(const std::vector<EvalRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back(Json{{"score", row.score},
                       {"dataset", row.dataset},
                       {"prior", row.prior},
                       {"tail", row.tail}});
  }
  return out;
}

}  // namespace

Universe parse_universe(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("universe must be a non-empty array", "universe");
  }
  const bool strings = j[0].is_string();
  if (strings) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_string()) {
        throw ParseError("mixed universe entry kinds",
                         "universe[" + std::to_string(i) + "]");
      }
      ids.push_back(j[i].get<std::string>());
    }
    try {
      return Universe(std::move(ids));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), "universe");
    }
  }
  if (j[0].is_number()) {
    std::vector<double> values;
    for (std::size_t i = 0; i < j.size(); ++i) {
      values.push_back(
          require_number(j[i], "universe[" + std::to_string(i) + "]"));
    }
    return scalar_universe(values);
  }
  if (j[0].is_array()) {
    std::vector<std::vector<double>> tuples;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string where = "universe[" + std::to_string(i) + "]";
      if (!j[i].is_array()) throw ParseError("expected a tuple", where);
      std::vector<double> t;
      for (std::size_t c = 0; c < j[i].size(); ++c) {
        t.push_back(require_number(j[i][c], where));
      }
      tuples.push_back(std::move(t));
    }
    try {
      return tuple_universe(tuples);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), "universe");
    }
  }
  throw ParseError("universe entries must be strings, numbers, or tuples",
                   "universe[0]");
}

FiniteBelief parse_finite_belief(const Json& j) {
  Universe universe = parse_universe(require_field(j, "universe", "belief"));
  Eigen::VectorXd probs =
      parse_vector(require_field(j, "probs", "belief"), "probs");
  try {
    return FiniteBelief(std::move(universe), std::move(probs));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "belief");
  }
}

GaussianBelief parse_gaussian_belief(const Json& j) {
  Eigen::VectorXd mean =
      parse_vector(require_field(j, "mean", "belief"), "mean");
  Eigen::MatrixXd cov = parse_matrix(require_field(j, "cov", "belief"), "cov");
  try {
    return GaussianBelief(std::move(mean), std::move(cov));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "belief");
  }
}

std::variant<FiniteBelief, GaussianBelief> parse_belief(const Json& j) {
  const std::string kind =
      j.is_object() && j.contains("kind") ? j.at("kind").get<std::string>()
      : j.is_object() && j.contains("mean") ? "gaussian"
                                            : "finite";
  if (kind == "finite") return parse_finite_belief(j);
  if (kind == "gaussian") return parse_gaussian_belief(j);
  throw ParseError("unknown belief kind '" + kind + "'", "belief.kind");
}

FiniteMechanism parse_mechanism(const Json& j) {
  Universe universe =
      parse_universe(require_field(j, "universe", "mechanism"));
  std::vector<std::string> alphabet =
      parse_symbols(require_field(j, "alphabet", "mechanism"), "alphabet");
  Eigen::MatrixXd kernel =
      parse_matrix(require_field(j, "kernel", "mechanism"), "kernel");
  // Validate rows here so malformed inputs fail as parse errors that name
  // the row.
  for (int r = 0; r < kernel.rows(); ++r) {
    double sum = 0.0;
    for (int c = 0; c < kernel.cols(); ++c) {
      if (!(kernel(r, c) >= 0.0)) {
        throw ParseError("negative kernel entry",
                         "kernel row " + std::to_string(r) + " col " +
                             std::to_string(c));
      }
      sum += kernel(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ParseError("kernel row sums to " + std::to_string(sum) +
                           ", expected 1",
                       "kernel row " + std::to_string(r));
    }
  }
  try {
    if (j.contains("input_alphabet")) {
      std::vector<std::string> input =
          parse_symbols(j.at("input_alphabet"), "input_alphabet");
      return FiniteMechanism(std::move(universe), std::move(input),
                             std::move(alphabet), std::move(kernel));
    }
    return FiniteMechanism(std::move(universe), std::move(alphabet),
                           std::move(kernel));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "mechanism");
  }
}

AnyMechanism parse_any_mechanism(const Json& j) {
  if (j.is_object() && j.contains("kind") &&
      j.at("kind").get<std::string>() == "average") {
    return AverageMechanism{};
  }
  return parse_mechanism(j);
}

NeighborRelation parse_neighbors(const Json& j) {
  const Json& pairs = j.is_object() ? require_field(j, "pairs", "neighbors") : j;
  if (!pairs.is_array()) {
    throw ParseError("neighbors must be an array of pairs", "neighbors");
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string where = "neighbors[" + std::to_string(i) + "]";
    if (!pairs[i].is_array() || pairs[i].size() != 2) {
      throw ParseError("each neighbor entry must be a pair", where);
    }
    const auto symbol = [&](const Json& e) -> std::string {
      if (e.is_string()) return e.get<std::string>();
      if (e.is_number()) return render_scalar_id(e.get<double>());
      throw ParseError("neighbor ids must be strings or numbers", where);
    };
    out.emplace_back(symbol(pairs[i][0]), symbol(pairs[i][1]));
  }
  try {
    return NeighborRelation(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "neighbors");
  }
}

ScoringRule parse_rule(const Json& j) {
  const std::string name =
      require_field(j, "rule", "scoring rule").get<std::string>();
  if (name == "interval") {
    const double s = require_number(require_field(j, "s", "scoring rule"),
                                    "rule.s");
    if (!(s > 0.0)) throw ParseError("window length must be positive", "rule.s");
    return IntervalRule{s};
  }
  if (name == "neglogprob") return NegLogProbRule{};
  if (name == "dss") {
    const Json& i = require_field(j, "i", "scoring rule");
    if (!i.is_number_integer() || i.get<int>() < 1) {
      throw ParseError("coordinate must be a positive integer", "rule.i");
    }
    return MarginalDssRule{i.get<int>()};
  }
  throw ParseError("unknown rule '" + name + "'", "rule");
}

PrivacyFunction parse_privacy_function(const Json& j) {
  Universe universe =
      parse_universe(require_field(j, "universe", "privacy function"));
  std::vector<std::string> decisions =
      parse_symbols(require_field(j, "decisions", "privacy function"),
                    "decisions");
  const Json& rho_json = require_field(j, "rho", "privacy function");
  if (!rho_json.is_array() || rho_json.size() != decisions.size()) {
    throw ParseError("rho needs one row per decision", "rho");
  }
  Eigen::MatrixXd rho(decisions.size(), universe.size());
  for (std::size_t d = 0; d < rho_json.size(); ++d) {
    const std::string where = "rho row " + std::to_string(d);
    if (!rho_json[d].is_array() ||
        rho_json[d].size() != static_cast<std::size_t>(universe.size())) {
      throw ParseError("row length must match the universe", where);
    }
    for (std::size_t x = 0; x < rho_json[d].size(); ++x) {
      const Json& e = rho_json[d][x];
      if (e.is_string() && e.get<std::string>() == "inf") {
        rho(d, x) = std::numeric_limits<double>::infinity();
      } else {
        rho(d, x) = require_number(e, where + " col " + std::to_string(x));
      }
    }
  }
  try {
    return PrivacyFunction(std::move(decisions), std::move(universe),
                           std::move(rho));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "privacy function");
  }
}

GuaranteeSpec parse_guarantee(const Json& j) {
  const Json& scores_json = require_field(j, "scores", "guarantee");
  if (!scores_json.is_array() || scores_json.empty()) {
    throw ParseError("scores must be a non-empty array", "guarantee.scores");
  }
  std::vector<ScoringRule> scores;
  for (const auto& s : scores_json) scores.push_back(parse_rule(s));

  const Json& cls = require_field(j, "prior_class", "guarantee");
  const std::string kind =
      require_field(cls, "class", "prior_class").get<std::string>();
  PriorClass prior_class = [&]() -> PriorClass {
    if (kind == "explicit") {
      ExplicitFinitePriors out;
      if (cls.contains("priors")) {
        const Json& priors = cls.at("priors");
        if (!priors.is_array()) {
          throw ParseError("priors must be an array", "prior_class.priors");
        }
        for (const auto& p : priors) {
          out.priors.push_back(parse_finite_belief(p));
        }
      }
      if (cls.contains("priors_by_dataset")) {
        const Json& by = cls.at("priors_by_dataset");
        if (!by.is_object()) {
          throw ParseError("priors_by_dataset must map dataset ids to arrays",
                           "prior_class.priors_by_dataset");
        }
        for (auto it = by.begin(); it != by.end(); ++it) {
          std::vector<FiniteBelief> list;
          for (const auto& p : it.value()) {
            list.push_back(parse_finite_belief(p));
          }
          out.by_dataset.emplace(it.key(), std::move(list));
        }
      }
      if (out.priors.empty() && out.by_dataset.empty()) {
        throw ParseError("explicit prior class needs priors",
                         "prior_class.priors");
      }
      return out;
    }
    if (kind == "neighbor_two_point") {
      NeighborTwoPointClass out;
      out.neighbors =
          parse_neighbors(require_field(cls, "neighbors", "prior_class"));
      if (cls.contains("w_grid")) {
        const Json& g = cls.at("w_grid");
        if (g.contains("points")) out.w_grid.points = g.at("points").get<int>();
        if (g.contains("w_min")) {
          out.w_grid.w_min = require_number(g.at("w_min"), "w_grid.w_min");
        }
      }
      if (cls.contains("include_zero_mass_priors")) {
        out.include_zero_mass_priors =
            cls.at("include_zero_mass_priors").get<bool>();
      }
      return out;
    }
    if (kind == "gaussian") {
      const double r1 = require_number(require_field(cls, "r1", "prior_class"),
                                       "prior_class.r1");
      const double r2 = require_number(require_field(cls, "r2", "prior_class"),
                                       "prior_class.r2");
      Eigen::VectorXd x = parse_vector(require_field(cls, "x", "prior_class"),
                                       "prior_class.x");
      GaussianPriorClass out{GaussianClassSpec(r1, r2, std::move(x)), 1000};
      if (cls.contains("samples")) out.samples = cls.at("samples").get<int>();
      return out;
    }
    throw ParseError("unknown prior class '" + kind + "'", "prior_class");
  }();

  LogThreshold kappa = [&]() -> LogThreshold {
    if (j.contains("exp_kappa")) {
      const Json& e = j.at("exp_kappa");
      if (!e.is_array() || e.size() != 2) {
        throw ParseError("exp_kappa must be [numerator, denominator]",
                         "guarantee.exp_kappa");
      }
      return LogThreshold::log_of_rational(e[0].get<std::int64_t>(),
                                           e[1].get<std::int64_t>());
    }
    return LogThreshold(require_number(
        require_field(j, "kappa", "guarantee"), "guarantee.kappa"));
  }();
  const double delta = require_number(
      require_field(j, "delta", "guarantee"), "guarantee.delta");
  try {
    return GuaranteeSpec(std::move(scores), std::move(prior_class), kappa,
                         delta);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), "guarantee");
  }
}

Json load_json_argument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  std::string text;
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    text = arg;
  } else {
    text = read_file(arg);
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), "json input");
  }
}

Json to_json(const FiniteBelief& belief) {
  return Json{{"kind", "finite"},
              {"universe", universe_to_json(belief.universe())},
              {"probs", std::vector<double>(belief.probs().data(),
                                            belief.probs().data() +
                                                belief.probs().size())}};
}

Json to_json(const GaussianBelief& belief) {
  Json cov = Json::array();
  for (int r = 0; r < belief.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < belief.dim(); ++c) row.push_back(belief.cov()(r, c));
    cov.push_back(row);
  }
  return Json{{"kind", "gaussian"},
              {"mean", std::vector<double>(belief.mean().data(),
                                           belief.mean().data() +
                                               belief.dim())},
              {"cov", cov}};
}

Json to_json(const PrivacyFunction& rho) {
  Json table = Json::array();
  for (int d = 0; d < rho.n_decisions(); ++d) {
    Json row = Json::array();
    for (int x = 0; x < rho.universe.size(); ++x) {
      if (std::isinf(rho.rho(d, x))) {
        row.push_back("inf");
      } else {
        row.push_back(rho.rho(d, x));
      }
    }
    table.push_back(row);
  }
  return Json{{"decisions", rho.decisions},
              {"universe", universe_to_json(rho.universe)},
              {"rho", table}};
}

Json to_json(const FiniteMechanism& mech) {
  Json kernel = Json::array();
  for (int r = 0; r < mech.kernel().rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < mech.kernel().cols(); ++c) {
      row.push_back(mech.kernel()(r, c));
    }
    kernel.push_back(row);
  }
  Json out{{"universe", universe_to_json(mech.universe())},
           {"alphabet", mech.alphabet()},
           {"kernel", kernel}};
  if (mech.is_second_stage()) out["input_alphabet"] = mech.input_alphabet();
  return out;
}

Json to_json(const NeighborRelation& neighbors) {
  Json pairs = Json::array();
  for (const auto& [a, b] : neighbors.pairs()) {
    pairs.push_back(Json::array({a, b}));
  }
  return pairs;
}

Json to_json(const ScoringRule& rule) {
  return std::visit(
      [](const auto& r) -> Json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRule>) {
          return Json{{"rule", "interval"}, {"s", r.s}};
        } else if constexpr (std::is_same_v<T, NegLogProbRule>) {
          return Json{{"rule", "neglogprob"}};
        } else {
          return Json{{"rule", "dss"}, {"i", r.coordinate}};
        }
      },
      rule);
}

Json to_json(const Witness& witness) {
  return Json{{"score", witness.score},
              {"dataset", witness.dataset},
              {"prior", witness.prior},
              {"violating_outputs", witness.violating_outputs}};
}

Json to_json(const CertificationReport& report) {
  Json out{{"verdict", report.verdict},
           {"attained", report.attained},
           {"method", method_name(report.method)},
           {"samples", report.samples},
           {"seed", report.seed},
           {"witness", report.witness ? to_json(*report.witness) : Json()},
           {"rows", rows_json(report.rows)}};
  if (report.wilson99) {
    out["wilson99"] = Json::array({report.wilson99->first,
                                   report.wilson99->second});
  }
  return out;
}

Json to_json(const PdpReport& report) {
  return Json{{"verdict", report.verdict},
              {"attained_delta", report.attained_delta},
              {"target_delta", report.target_delta},
              {"witness", report.witness ? to_json(*report.witness) : Json()},
              {"rows", rows_json(report.rows)}};
}

Json to_json(const EquivalenceReport& report) {
  return Json{{"agree", report.agree},
              {"pdp_verdict", report.pdp_verdict},
              {"pp_verdict", report.pp_verdict},
              {"pdp_attained_delta", report.pdp_attained_delta},
              {"pp_attained_tail", report.pp_attained_tail},
              {"grid_monotone", report.grid_monotone},
              {"detail", report.detail}};
}

Json to_json(const CompositionReport& report) {
  return Json{{"conjugate", report.conjugate},
              {"conjugacy_witness", report.conjugacy_witness},
              {"m1_pass", report.m1_pass},
              {"m2_pass", report.m2_pass},
              {"composed_pass", report.composed_pass},
              {"m1_attained", report.m1_attained},
              {"m2_attained", report.m2_attained},
              {"composed_attained", report.composed_attained},
              {"bound_holds", report.bound_holds}};
}

Json to_json(const RecPostReport& report) {
  return Json{{"multiset_equal", report.multiset_equal},
              {"max_mass_discrepancy", report.max_mass_discrepancy},
              {"verdicts_match", report.verdicts_match},
              {"pass", report.pass},
              {"detail", report.detail}};
}

Json to_json(const AverageBoundReport& report) {
  return Json{{"pass", report.pass},
              {"bound", report.bound},
              {"max_delta", report.max_delta},
              {"min_slack", report.min_slack},
              {"violations", report.violations},
              {"samples", report.samples},
              {"seed", report.seed},
              {"rows", rows_json(report.rows)}};
}

Json to_json(const SenderPostWitness& witness) {
  return Json{{"mechanism", to_json(witness.m)},
              {"kernel", to_json(witness.k)},
              {"chained", to_json(witness.chained)},
              {"eps", witness.eps.log_value()},
              {"delta", witness.delta},
              {"m_attained_delta", witness.m_attained},
              {"mk_attained_delta", witness.mk_attained},
              {"candidate_index", witness.candidate_index}};
}

std::string dump_json_17(const Json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  out += "\n";
  return out;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string rows_to_csv(const std::vector<EvalRow>& rows) {
  std::string out = "score,dataset,prior,tail\n";
  char buf[40];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.tail);
    out += csv_escape(row.score) + "," + csv_escape(row.dataset) + "," +
           csv_escape(row.prior) + "," + buf + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename to '" + path + "' failed");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace ppcert
