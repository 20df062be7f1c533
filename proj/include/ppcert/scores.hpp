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

#ifndef PPCERT_SCORES_HPP_
#define PPCERT_SCORES_HPP_

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ppcert/beliefs.hpp"
#include "ppcert/extended_real.hpp"
#include "ppcert/universe.hpp"

namespace ppcert {

// --- Scoring rules ---
//
// All rules are negatively orientated: lower scores mean the belief predicts
// the truth better, i.e. less privacy for the data holder.

// 0/1 score of the best belief window of length s: scores 0 iff the truth
// lies in the length-s interval carrying maximal belief mass.
struct IntervalRule {
  double s;  // > 0
};

// -log of the belief's mass on the truth; +inf on mass zero.
struct NegLogProbRule {};

// log sigma_i^2 + (x_i - mu_i)^2 / sigma_i^2 from the belief's marginal
// moments in coordinate i (1-based).
struct MarginalDssRule {
  int coordinate;  // 1-based, <= belief dimension
};

using ScoringRule = std::variant<IntervalRule, NegLogProbRule, MarginalDssRule>;

std::string rule_name(const ScoringRule& rule);
bool is_neg_log_prob(const ScoringRule& rule);

// --- Privacy functions ---

// Finite loss/privacy table rho(d, x) over explicit decisions and a dataset
// universe. Positively orientated for the data holder: a higher value means
// the adversarial decision d is less harmful under true data x. Entries may
// be +inf where a log-type loss allows it.
struct PrivacyFunction {
  std::vector<std::string> decisions;
  Universe universe;
  Eigen::MatrixXd rho;  // decisions x universe members

  PrivacyFunction(std::vector<std::string> decisions, Universe universe,
                  Eigen::MatrixXd rho);
  int n_decisions() const { return static_cast<int>(decisions.size()); }
};

// rho(d, x) = 1{x != d}, decisions identified with the universe members.
PrivacyFunction zero_one_privacy_function(const Universe& universe);
// Discretized interval loss: decision k is the window
// [centers[k]-s/2, centers[k]+s/2], scoring 0 when the truth falls inside.
PrivacyFunction interval_privacy_function(const Universe& universe, double s,
                                          const std::vector<double>& centers);

// E_{X~P}[rho(d, X)], with inf * 0 = 0 on zero-mass members.
ExtendedReal expected_loss(const PrivacyFunction& rho, int decision,
                           const FiniteBelief& belief);

// The decision minimizing expected loss under `belief`; ties break toward the
// lowest decision index.
int bayes_act(const PrivacyFunction& rho, const FiniteBelief& belief);

// Score generated by a loss table through best responses:
// S(P, x) = rho(d^P, x) with d^P the Bayes act of P.
class LossInducedScore {
 public:
  explicit LossInducedScore(PrivacyFunction rho);
  ExtendedReal operator()(const FiniteBelief& belief, int dataset) const;
  const PrivacyFunction& loss() const { return rho_; }

 private:
  PrivacyFunction rho_;
};

LossInducedScore score_from_loss(PrivacyFunction rho);

// Loss table whose decision space is a finite belief family:
// rho(k, x) = S(family[k], x). Feeding the result back through
// score_from_loss reproduces S on the family whenever S is proper on it.
PrivacyFunction loss_from_score(const ScoringRule& rule,
                                const std::vector<FiniteBelief>& family);

// --- Evaluation ---

// Score of a finite belief against universe member `dataset`.
// IntervalRule and MarginalDssRule require universe points.
ExtendedReal evaluate(const ScoringRule& rule, const FiniteBelief& belief,
                      int dataset);
// Score of a Gaussian belief against a real dataset vector (MarginalDssRule
// only). Throws UndefinedMomentsError on a zero-variance marginal.
ExtendedReal evaluate(const ScoringRule& rule, const GaussianBelief& belief,
                      const Eigen::VectorXd& x);

// E_{X~truth}[S(predict, X)] over a finite truth; inf * 0 = 0.
ExtendedReal expected_score(const ScoringRule& rule,
                            const FiniteBelief& predict,
                            const FiniteBelief& truth);
// Closed-form expected marginal moment score between Gaussians:
// log s2(P) + (s2(Q) + (mu_Q - mu_P)^2) / s2(P) in the rule's coordinate.
double expected_score(const MarginalDssRule& rule, const GaussianBelief& predict,
                      const GaussianBelief& truth);

// Leftmost length-s window over the belief's support achieving maximal mass.
// Exact for finite supports: every maximal window can be slid left until its
// left edge hits a support point. Requires 1-d universe points.
struct IntervalWindow {
  double left = 0.0;
  double mass = 0.0;
};
IntervalWindow best_window(const FiniteBelief& belief, double s);

// --- Property checks ---

struct ProprietyReport {
  bool pass = true;
  bool strict_required = false;
  // Witness pair (predict index, truth index) of the worst violation.
  std::optional<std::pair<int, int>> witness;
  double worst_gap = 0.0;  // most negative S(P,Q) - S(Q,Q) observed
  std::string detail;
};

using ScoreFn = std::function<ExtendedReal(const FiniteBelief&, int)>;

// Checks S(Q,Q) <= S(P,Q) + 1e-9 over all ordered pairs of the family; with
// `require_strict`, additionally flags S(P,Q) <= S(Q,Q) for distinct P, Q.
ProprietyReport propriety_check(const ScoreFn& score,
                                const std::vector<FiniteBelief>& family,
                                bool require_strict);
ProprietyReport propriety_check(const ScoringRule& rule,
                                const std::vector<FiniteBelief>& family);
// Moment-score propriety over a Gaussian family via the closed-form expected
// score.
ProprietyReport propriety_check(const MarginalDssRule& rule,
                                const std::vector<GaussianBelief>& family);

struct WorstCaseLossReport {
  bool pass = true;
  // Witness (belief index, alternative-loss index).
  std::optional<std::pair<int, int>> witness;
  double worst_gap = 0.0;
};

// Verifies that an adversary best-responding to rho itself is the worst case
// for the data holder: for every belief P and alternative loss l,
// E_P[rho(d^P_rho)] <= E_P[rho(d^P_l)] + 1e-12. Alternative losses must share
// rho's decision space.
WorstCaseLossReport worst_case_loss_check(
    const PrivacyFunction& rho, const std::vector<PrivacyFunction>& alt_losses,
    const std::vector<FiniteBelief>& beliefs);

}  // namespace ppcert

#endif  // PPCERT_SCORES_HPP_
