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

#ifndef PPCERT_CERTIFY_HPP_
#define PPCERT_CERTIFY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ppcert/beliefs.hpp"
#include "ppcert/exact.hpp"
#include "ppcert/extended_real.hpp"
#include "ppcert/mechanisms.hpp"
#include "ppcert/scores.hpp"

namespace ppcert {

// --- Guarantee specification ---

// Grid of prior weights w used for the two-point prior class: geometric from
// w_min to 0.5 plus a point near 1. The infimum of the tail criterion sits in
// the w -> 0 limit, which the certifier always adds as an analytic event; the
// grid exists to exhibit monotonicity toward that limit.
struct WGridSpec {
  int points = 25;
  double w_min = 1e-6;

  std::vector<double> values() const;
};

// Explicit finite prior class: a shared list applied at every dataset,
// optionally overridden per dataset id (prior classes may depend on the
// true dataset).
struct ExplicitFinitePriors {
  std::vector<FiniteBelief> priors;
  std::map<std::string, std::vector<FiniteBelief>> by_dataset;

  // Priors in force at the given dataset.
  const std::vector<FiniteBelief>& at(const std::string& dataset_id) const;
};

// Two-point priors supported on neighboring dataset pairs with weights from
// the grid, augmented with the analytic w -> 0 limit event. Only meaningful
// for the discrete negative log-probability score. When
// include_zero_mass_priors is set, priors with no mass on the evaluated
// dataset are enumerated too (they contribute tail probability 1 by the
// equal-infinities convention and never change the verdict).
struct NeighborTwoPointClass {
  NeighborRelation neighbors;
  WGridSpec w_grid;
  bool include_zero_mass_priors = false;
};

// Gaussian prior class, evaluated by Monte Carlo over the class sampler.
struct GaussianPriorClass {
  GaussianClassSpec spec;
  int samples = 1000;
};

using PriorClass =
    std::variant<ExplicitFinitePriors, NeighborTwoPointClass, GaussianPriorClass>;

struct GuaranteeSpec {
  std::vector<ScoringRule> scores;  // non-empty
  PriorClass prior_class;
  LogThreshold kappa;  // >= 0
  double delta;        // in [0, 1)

  GuaranteeSpec(std::vector<ScoringRule> scores, PriorClass prior_class,
                LogThreshold kappa, double delta);
};

// --- Reports ---

enum class Method { exact, grid, monte_carlo };
std::string method_name(Method m);

struct Witness {
  std::string score;
  std::string dataset;
  std::string prior;
  std::vector<std::string> violating_outputs;
};

// One evaluated (score, dataset, prior) triple; emitted for plotting.
struct EvalRow {
  std::string score;
  std::string dataset;
  std::string prior;
  double tail = 0.0;
};

struct CertificationReport {
  bool verdict = false;
  double attained = 0.0;  // worst-case tail probability
  std::optional<Witness> witness;  // present iff verdict is false
  Method method = Method::exact;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> wilson99;  // Monte Carlo only
  std::vector<EvalRow> rows;
};

// --- Core evaluations ---

// Relative privacy score of observing `output` from `mech` under `prior`
// when the true dataset is `dataset`: S(prior, x) - S(posterior, x), with
// equal infinities cancelling to zero. For the negative log-probability
// score, a prior with zero mass on the truth yields exactly 0 without
// forming the posterior. ZeroEvidenceError propagates otherwise.
ExtendedReal relative_score(const ScoringRule& rule, const FiniteBelief& prior,
                            const FiniteMechanism& mech, int output,
                            int dataset);

// One reachable output with its relative score and release probability.
struct RelativeScoreSample {
  std::string output;
  ExtendedReal delta;
  double prob = 0.0;
};

// The full distribution of the relative score under m(dataset, .): one entry
// per positive-probability output; probabilities sum to 1.
std::vector<RelativeScoreSample> relative_score_distribution(
    const ScoringRule& rule, const FiniteBelief& prior,
    const FiniteMechanism& mech, int dataset);

// Exact tail probability P_x[Delta <= kappa]: total mass of outputs
// reachable from `dataset` whose relative score does not exceed kappa.
double tail_probability(const ScoringRule& rule, const FiniteBelief& prior,
                        const FiniteMechanism& mech, int dataset,
                        const LogThreshold& kappa);

struct McTail {
  double estimate = 0.0;
  double lo = 0.0;  // Wilson 99% interval
  double hi = 1.0;
  std::int64_t samples = 0;
};

// Monte Carlo estimate of the tail probability with a Wilson 99% interval.
McTail tail_probability_mc(const ScoringRule& rule, const FiniteBelief& prior,
                           const FiniteMechanism& mech, int dataset,
                           const LogThreshold& kappa, std::int64_t samples,
                           std::uint64_t seed);

std::pair<double, double> wilson99(std::int64_t successes, std::int64_t trials);

// --- Certification ---

// Decides the worst-case tail criterion
//   inf over scores, datasets, priors of P_x[Delta <= kappa] >= 1 - delta.
// Exact for finite prior classes; for the two-point neighbor class the w
// grid is augmented with the analytic limit event
//   { m(T|x) <= e^kappa m(T|x') },
// where the infimum over w is attained, so the verdict is exact. The
// Gaussian class is sampled (method monte_carlo: the verdict is "supported",
// never proved). `seed` is used by sampled modes only.
CertificationReport certify_pp(const FiniteMechanism& mech,
                               const GuaranteeSpec& spec,
                               std::uint64_t seed = 0);
// Entry point accepting the noiseless-average mechanism; requires the
// Gaussian prior class and moment scores.
using AnyMechanism = std::variant<FiniteMechanism, AverageMechanism>;
CertificationReport certify_pp(const AnyMechanism& mech,
                               const GuaranteeSpec& spec,
                               std::uint64_t seed = 0);

struct PdpReport {
  double attained_delta = 0.0;  // sup over ordered neighbor pairs
  bool verdict = false;         // attained <= target delta
  double target_delta = 0.0;
  std::optional<Witness> witness;
  std::vector<EvalRow> rows;  // tail per ordered pair
};

// Exact likelihood-ratio tail certification: for each ordered neighbor pair
// (x, x'), the mass under m(x, .) of outputs with m(T|x) > e^eps m(T|x').
PdpReport certify_pdp(const FiniteMechanism& mech,
                      const NeighborRelation& neighbors,
                      const LogThreshold& eps, double target_delta = 0.0);

// Fully rational recomputation of the likelihood-ratio tail; exp_eps is the
// exact value of e^eps. Used to re-verify searched counterexamples.
Rational certify_pdp_exact(const FiniteMechanism& mech,
                           const NeighborRelation& neighbors,
                           const Rational& exp_eps);

struct EquivalenceReport {
  bool agree = false;
  bool pdp_verdict = false;
  bool pp_verdict = false;
  double pdp_attained_delta = 0.0;
  double pp_attained_tail = 0.0;
  // Grid tails never undercut the limit tail and shrink toward it as w -> 0.
  bool grid_monotone = false;
  std::string detail;
};

// Checks that the likelihood-ratio certifier and the relative-score certifier
// (negative log-probability score, two-point neighbor priors with limit
// augmentation) reach the same verdict at (eps, delta).
EquivalenceReport check_pdp_pp_equivalence(const FiniteMechanism& mech,
                                           const NeighborRelation& neighbors,
                                           const LogThreshold& eps, double delta,
                                           const WGridSpec& w_grid = {});

struct CompositionReport {
  bool conjugate = false;
  std::string conjugacy_witness;  // empty when conjugate
  bool m1_pass = false;
  bool m2_pass = false;  // every slice of m2
  bool composed_pass = false;
  double m1_attained = 0.0;
  double m2_attained = 0.0;  // worst slice
  double composed_attained = 0.0;
  // (m1_pass and m2_pass) implies composed_pass; vacuously true otherwise.
  bool bound_holds = false;
};

// Verifies the additive-budget composition bound: if m1 passes at
// (kappa1, delta1) and every slice m2((., t), .) passes at (kappa2, delta2)
// under a prior class conjugate to both, then tensor(m1, m2) must pass at
// (kappa1 + kappa2, delta1 + delta2). Conjugacy is established by exhaustive
// enumeration for explicit finite classes (posteriors on every
// positive-marginal output must stay in the class within 1e-9) and holds
// structurally for the two-point neighbor class. A conjugacy failure is
// reported, not asserted against the bound.
CompositionReport check_composition(const FiniteMechanism& m1,
                                    const FiniteMechanism& m2,
                                    const std::vector<ScoringRule>& scores,
                                    const PriorClass& prior_class,
                                    const LogThreshold& kappa1, double delta1,
                                    const LogThreshold& kappa2, double delta2);

struct RecPostReport {
  bool multiset_equal = false;
  double max_mass_discrepancy = 0.0;
  bool verdicts_match = false;
  bool pass = false;
  std::string detail;
};

// Verifies that augmenting a release with a data-independent kernel K over
// its outputs changes nothing: the (relative score, probability) multiset of
// tensor(m, k) matches m's exactly (masses within 1e-12 after grouping equal
// scores) and the certification verdicts coincide. Throws
// StructuralViolationError when k depends on the data.
RecPostReport check_receiver_postprocessing(const FiniteMechanism& m,
                                            const FiniteMechanism& k,
                                            const GuaranteeSpec& spec);

struct SearchBounds {
  int max_universe = 3;
  int max_m_alphabet = 4;
  int max_k_alphabet = 4;
};

struct SenderPostWitness {
  FiniteMechanism m;
  FiniteMechanism k;       // data-independent, chained after m
  FiniteMechanism chained; // chain_independent(m, k)
  LogThreshold eps;
  double delta;        // level m attains (and chain(m,k) exceeds)
  double m_attained;
  double mk_attained;
  std::int64_t candidate_index;
};

// Random search for a guarantee that chaining breaks: a mechanism m passing
// the likelihood-ratio criterion at (eps, delta) together with a
// data-independent k such that chain(m, k) fails it. Every reported witness
// is re-verified in exact rational arithmetic. Returns nullopt if the budget
// is exhausted.
std::optional<SenderPostWitness> search_sender_postprocessing_counterexample(
    const SearchBounds& bounds, std::uint64_t seed, std::int64_t budget);

struct AverageBoundReport {
  bool pass = false;
  double bound = 0.0;      // r1 + log r2
  double max_delta = 0.0;  // worst relative score over samples x coordinates
  double min_slack = 0.0;  // bound - max_delta
  std::int64_t violations = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  // Per-sample worst-coordinate slack, for histograms.
  std::vector<double> slacks;
  std::vector<EvalRow> rows;  // per (sample, coordinate) relative scores
};

// Samples priors from the Gaussian class and checks that releasing the exact
// average keeps every coordinate's relative moment score within the class
// bound r1 + log r2 (+ 1e-8 numerical headroom). Relative scores are
// computed from the closed-form conditioned Gaussian.
AverageBoundReport certify_average_gaussian(const GaussianClassSpec& spec,
                                            int count, std::uint64_t seed,
                                            bool collect_rows = false);

}  // namespace ppcert

#endif  // PPCERT_CERTIFY_HPP_
