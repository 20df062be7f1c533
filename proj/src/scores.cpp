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

#include "ppcert/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppcert/errors.hpp"

namespace ppcert {

namespace {

constexpr double kProprietyTol = 1e-9;
constexpr double kWorstCaseTol = 1e-12;
// Beliefs closer than this in sup norm are treated as identical when
// checking strictness.
constexpr double kDistinctTol = 1e-9;

double marginal_mean(const FiniteBelief& belief, int coord) {
  double m = 0.0;
  for (int i = 0; i < belief.size(); ++i) {
    m += belief.prob(i) * belief.universe().point(i)(coord);
  }
  return m;
}

double marginal_var(const FiniteBelief& belief, int coord, double mean) {
  double v = 0.0;
  for (int i = 0; i < belief.size(); ++i) {
    const double d = belief.universe().point(i)(coord) - mean;
    v += belief.prob(i) * d * d;
  }
  return v;
}

ExtendedReal dss_value(double mean, double var, double x) {
  if (!(var > 0.0)) {
    throw UndefinedMomentsError(
        "moment score needs a strictly positive marginal variance");
  }
  const double d = x - mean;
  return ExtendedReal(std::log(var) + d * d / var);
}

int rule_coordinate(const MarginalDssRule& rule, int dim) {
  if (rule.coordinate < 1 || rule.coordinate > dim) {
    throw std::invalid_argument("score coordinate out of range");
  }
  return rule.coordinate - 1;
}

}  // namespace

std::string rule_name(const ScoringRule& rule) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRule>) {
          return "interval(s=" + std::to_string(r.s) + ")";
        } else if constexpr (std::is_same_v<T, NegLogProbRule>) {
          return "neglogprob";
        } else {
          return "dss(i=" + std::to_string(r.coordinate) + ")";
        }
      },
      rule);
}

bool is_neg_log_prob(const ScoringRule& rule) {
  return std::holds_alternative<NegLogProbRule>(rule);
}

PrivacyFunction::PrivacyFunction(std::vector<std::string> decisions_in,
                                 Universe universe_in, Eigen::MatrixXd rho_in)
    : decisions(std::move(decisions_in)),
      universe(std::move(universe_in)),
      rho(std::move(rho_in)) {
  if (decisions.empty()) {
    throw std::invalid_argument("decision space must be non-empty");
  }
  if (rho.rows() != static_cast<int>(decisions.size()) ||
      rho.cols() != universe.size()) {
    throw std::invalid_argument("privacy table shape mismatch");
  }
  for (int d = 0; d < rho.rows(); ++d) {
    for (int x = 0; x < rho.cols(); ++x) {
      if (std::isnan(rho(d, x)) ||
          rho(d, x) == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument(
            "privacy values must be finite or +inf");
      }
    }
  }
}

PrivacyFunction zero_one_privacy_function(const Universe& universe) {
  const int n = universe.size();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Ones(n, n);
  rho.diagonal().setZero();
  return PrivacyFunction(universe.ids(), universe, std::move(rho));
}

PrivacyFunction interval_privacy_function(const Universe& universe, double s,
                                          const std::vector<double>& centers) {
  if (!(s > 0.0)) throw std::invalid_argument("window length must be positive");
  Eigen::MatrixXd rho(centers.size(), universe.size());
  std::vector<std::string> decisions;
  decisions.reserve(centers.size());
  for (std::size_t d = 0; d < centers.size(); ++d) {
    decisions.push_back("[" + render_scalar_id(centers[d] - s / 2) + "," +
                        render_scalar_id(centers[d] + s / 2) + "]");
    for (int x = 0; x < universe.size(); ++x) {
      const double v = universe.scalar(x);
      const bool inside =
          v >= centers[d] - s / 2 && v <= centers[d] + s / 2;
      rho(d, x) = inside ? 0.0 : 1.0;
    }
  }
  return PrivacyFunction(std::move(decisions), universe, std::move(rho));
}

ExtendedReal expected_loss(const PrivacyFunction& rho, int decision,
                           const FiniteBelief& belief) {
  if (!(belief.universe() == rho.universe)) {
    throw IndexMismatchError("belief universe does not match the loss table");
  }
  double finite = 0.0;
  bool infinite = false;
  for (int x = 0; x < belief.size(); ++x) {
    const double p = belief.prob(x);
    if (p == 0.0) continue;  // inf * 0 = 0
    const double v = rho.rho(decision, x);
    if (v == std::numeric_limits<double>::infinity()) {
      infinite = true;
    } else {
      finite += p * v;
    }
  }
  return infinite ? ExtendedReal::infinity() : ExtendedReal(finite);
}

int bayes_act(const PrivacyFunction& rho, const FiniteBelief& belief) {
  int best = 0;
  ExtendedReal best_loss = expected_loss(rho, 0, belief);
  for (int d = 1; d < rho.n_decisions(); ++d) {
    const ExtendedReal loss = expected_loss(rho, d, belief);
    if (loss < best_loss) {
      best = d;
      best_loss = loss;
    }
  }
  return best;
}

LossInducedScore::LossInducedScore(PrivacyFunction rho)
    : rho_(std::move(rho)) {}

ExtendedReal LossInducedScore::operator()(const FiniteBelief& belief,
                                          int dataset) const {
  return ExtendedReal(rho_.rho(bayes_act(rho_, belief), dataset));
}

LossInducedScore score_from_loss(PrivacyFunction rho) {
  return LossInducedScore(std::move(rho));
}

PrivacyFunction loss_from_score(const ScoringRule& rule,
                                const std::vector<FiniteBelief>& family) {
  if (family.empty()) {
    throw std::invalid_argument("belief family must be non-empty");
  }
  const Universe& universe = family.front().universe();
  Eigen::MatrixXd rho(family.size(), universe.size());
  std::vector<std::string> decisions;
  decisions.reserve(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!(family[k].universe() == universe)) {
      throw IndexMismatchError("family members must share one universe");
    }
    decisions.push_back("belief-" + std::to_string(k));
    for (int x = 0; x < universe.size(); ++x) {
      rho(k, x) = evaluate(rule, family[k], x).value();
    }
  }
  return PrivacyFunction(std::move(decisions), universe, std::move(rho));
}

IntervalWindow best_window(const FiniteBelief& belief, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("window length must be positive");
  constexpr double kMassTieTol = 1e-12;
  const Universe& u = belief.universe();
  IntervalWindow best;
  bool have = false;
  // Every maximal-mass window can be slid left until its left edge sits on a
  // support point, so scanning support-anchored windows is exact. Among equal
  // masses the leftmost window wins.
  for (int i = 0; i < belief.size(); ++i) {
    if (belief.prob(i) == 0.0) continue;
    const double left = u.scalar(i);
    double mass = 0.0;
    for (int j = 0; j < belief.size(); ++j) {
      const double v = u.scalar(j);
      if (v >= left && v <= left + s) mass += belief.prob(j);
    }
    const bool better =
        !have || mass > best.mass + kMassTieTol ||
        (std::abs(mass - best.mass) <= kMassTieTol && left < best.left);
    if (better) {
      best.left = left;
      best.mass = mass;
      have = true;
    }
  }
  if (!have) {
    throw std::invalid_argument("belief has empty support");
  }
  return best;
}

ExtendedReal evaluate(const ScoringRule& rule, const FiniteBelief& belief,
                      int dataset) {
  if (dataset < 0 || dataset >= belief.size()) {
    throw std::invalid_argument("dataset index out of range");
  }
  return std::visit(
      [&](const auto& r) -> ExtendedReal {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalRule>) {
          const IntervalWindow w = best_window(belief, r.s);
          const double x = belief.universe().scalar(dataset);
          return ExtendedReal(x >= w.left && x <= w.left + r.s ? 0.0 : 1.0);
        } else if constexpr (std::is_same_v<T, NegLogProbRule>) {
          const double p = belief.prob(dataset);
          return p == 0.0 ? ExtendedReal::infinity()
                          : ExtendedReal(-std::log(p));
        } else {
          const int c = rule_coordinate(r, belief.universe().point_dim());
          const double mean = marginal_mean(belief, c);
          const double var = marginal_var(belief, c, mean);
          return dss_value(mean, var, belief.universe().point(dataset)(c));
        }
      },
      rule);
}

ExtendedReal evaluate(const ScoringRule& rule, const GaussianBelief& belief,
                      const Eigen::VectorXd& x) {
  if (!std::holds_alternative<MarginalDssRule>(rule)) {
    throw std::invalid_argument(
        "only the moment score evaluates Gaussian beliefs");
  }
  if (x.size() != belief.dim()) {
    throw std::invalid_argument("dataset dimension mismatch");
  }
  const auto& r = std::get<MarginalDssRule>(rule);
  const int c = rule_coordinate(r, belief.dim());
  return dss_value(belief.marginal_mean(c), belief.marginal_var(c), x(c));
}

ExtendedReal expected_score(const ScoringRule& rule,
                            const FiniteBelief& predict,
                            const FiniteBelief& truth) {
  if (!(predict.universe() == truth.universe())) {
    throw IndexMismatchError("beliefs must share one universe");
  }
  double finite = 0.0;
  bool infinite = false;
  for (int x = 0; x < truth.size(); ++x) {
    const double p = truth.prob(x);
    if (p == 0.0) continue;  // inf * 0 = 0
    const ExtendedReal s = evaluate(rule, predict, x);
    if (s.is_pos_infinity()) {
      infinite = true;
    } else {
      finite += p * s.value();
    }
  }
  return infinite ? ExtendedReal::infinity() : ExtendedReal(finite);
}

double expected_score(const MarginalDssRule& rule,
                      const GaussianBelief& predict,
                      const GaussianBelief& truth) {
  if (predict.dim() != truth.dim()) {
    throw std::invalid_argument("belief dimensions differ");
  }
  const int c = rule_coordinate(rule, predict.dim());
  const double vp = predict.marginal_var(c);
  if (!(vp > 0.0)) {
    throw UndefinedMomentsError(
        "moment score needs a strictly positive marginal variance");
  }
  const double dmu = truth.marginal_mean(c) - predict.marginal_mean(c);
  return std::log(vp) + (truth.marginal_var(c) + dmu * dmu) / vp;
}

namespace {

bool distinct_beliefs(const FiniteBelief& a, const FiniteBelief& b) {
  return (a.probs() - b.probs()).cwiseAbs().maxCoeff() > kDistinctTol;
}

}  // namespace

ProprietyReport propriety_check(const ScoreFn& score,
                                const std::vector<FiniteBelief>& family,
                                bool require_strict) {
  ProprietyReport report;
  report.strict_required = require_strict;
  for (std::size_t q = 0; q < family.size(); ++q) {
    // S(Q, Q) as an expectation of the score function under Q.
    double own = 0.0;
    bool own_inf = false;
    for (int x = 0; x < family[q].size(); ++x) {
      const double p = family[q].prob(x);
      if (p == 0.0) continue;
      const ExtendedReal s = score(family[q], x);
      if (s.is_pos_infinity()) {
        own_inf = true;
      } else {
        own += p * s.value();
      }
    }
    for (std::size_t pidx = 0; pidx < family.size(); ++pidx) {
      if (pidx == q) continue;
      double other = 0.0;
      bool other_inf = false;
      for (int x = 0; x < family[q].size(); ++x) {
        const double p = family[q].prob(x);
        if (p == 0.0) continue;
        const ExtendedReal s = score(family[pidx], x);
        if (s.is_pos_infinity()) {
          other_inf = true;
        } else {
          other += p * s.value();
        }
      }
      const double gap = other_inf ? std::numeric_limits<double>::infinity()
                                   : (own_inf ? -std::numeric_limits<
                                                    double>::infinity()
                                              : other - own);
      bool violated = gap < -kProprietyTol;
      if (!violated && require_strict &&
          distinct_beliefs(family[pidx], family[q]) && !other_inf &&
          gap <= 0.0) {
        violated = true;
      }
      if (violated) {
        report.pass = false;
        if (!report.witness || gap < report.worst_gap) {
          report.witness = {static_cast<int>(pidx), static_cast<int>(q)};
          report.worst_gap = gap;
          report.detail = "S(P,Q) - S(Q,Q) = " + std::to_string(gap);
        }
      }
    }
  }
  return report;
}

ProprietyReport propriety_check(const ScoringRule& rule,
                                const std::vector<FiniteBelief>& family) {
  return propriety_check(
      [&rule](const FiniteBelief& b, int x) { return evaluate(rule, b, x); },
      family, is_neg_log_prob(rule));
}

ProprietyReport propriety_check(const MarginalDssRule& rule,
                                const std::vector<GaussianBelief>& family) {
  ProprietyReport report;
  for (std::size_t q = 0; q < family.size(); ++q) {
    const double own = expected_score(rule, family[q], family[q]);
    for (std::size_t p = 0; p < family.size(); ++p) {
      if (p == q) continue;
      const double gap = expected_score(rule, family[p], family[q]) - own;
      if (gap < -kProprietyTol) {
        report.pass = false;
        if (!report.witness || gap < report.worst_gap) {
          report.witness = {static_cast<int>(p), static_cast<int>(q)};
          report.worst_gap = gap;
          report.detail = "S(P,Q) - S(Q,Q) = " + std::to_string(gap);
        }
      }
    }
  }
  return report;
}

WorstCaseLossReport worst_case_loss_check(
    const PrivacyFunction& rho, const std::vector<PrivacyFunction>& alt_losses,
    const std::vector<FiniteBelief>& beliefs) {
  WorstCaseLossReport report;
  for (std::size_t b = 0; b < beliefs.size(); ++b) {
    const int own_act = bayes_act(rho, beliefs[b]);
    const ExtendedReal own = expected_loss(rho, own_act, beliefs[b]);
    for (std::size_t l = 0; l < alt_losses.size(); ++l) {
      if (alt_losses[l].n_decisions() != rho.n_decisions()) {
        throw IndexMismatchError(
            "alternative losses must share the decision space");
      }
      const int alt_act = bayes_act(alt_losses[l], beliefs[b]);
      const ExtendedReal alt = expected_loss(rho, alt_act, beliefs[b]);
      const double gap = score_diff(alt, own).value();
      if (gap < -kWorstCaseTol) {
        report.pass = false;
        if (!report.witness || gap < report.worst_gap) {
          report.witness = {static_cast<int>(b), static_cast<int>(l)};
          report.worst_gap = gap;
        }
      }
    }
  }
  return report;
}

}  // namespace ppcert
