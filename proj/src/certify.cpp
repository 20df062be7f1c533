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

#include "ppcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ppcert/errors.hpp"
#include "ppcert/generators.hpp"
#include "ppcert/parallel.hpp"

namespace ppcert {

namespace {

constexpr double kMassTol = 1e-12;

// attained >= 1 - delta, resolving banded ties toward equality.
bool tail_meets(double attained, double delta) {
  const double target = 1.0 - delta;
  if (within_boundary_band(attained, target)) return true;
  return attained > target;
}

// attained <= delta, resolving banded ties toward equality.
bool delta_meets(double attained, double delta) {
  if (within_boundary_band(attained, delta)) return true;
  return attained < delta;
}

// Limit of the two-point relative score as the prior weight on the truth
// vanishes: Delta -> log m(T|x) - log m(T|x'). Decided in log space, with the
// exact linear comparison resolving banded boundary ties.
bool limit_event_leq(double m_x, double m_xp, const LogThreshold& kappa) {
  if (m_xp == 0.0) return false;  // Delta = +inf
  const double delta = std::log(m_x) - std::log(m_xp);
  if (!within_boundary_band(delta, kappa.log_value())) {
    return delta < kappa.log_value();
  }
  if (kappa.exp_exact()) {
    return to_rational(m_x) <= *kappa.exp_exact() * to_rational(m_xp);
  }
  return true;
}

std::string two_point_name(const std::string& x, const std::string& xp,
                           const std::string& w) {
  return "twopoint(" + x + ">" + xp + ",w=" + w + ")";
}

// Per ordered neighbor pair: the limit tail and the tail at each grid weight.
struct PairTails {
  double limit = 0.0;
  std::vector<double> grid;
  std::vector<std::string> limit_violations;
};

PairTails two_point_pair_tails(const FiniteMechanism& mech, int x, int xp,
                               const LogThreshold& kappa,
                               const std::vector<double>& w_values) {
  PairTails tails;
  tails.grid.assign(w_values.size(), 0.0);
  for (int t = 0; t < mech.n_outputs(); ++t) {
    const double m_x = mech.prob(x, t);
    if (m_x == 0.0) continue;
    const double m_xp = mech.prob(xp, t);
    if (limit_event_leq(m_x, m_xp, kappa)) {
      tails.limit += m_x;
    } else {
      tails.limit_violations.push_back(mech.alphabet()[t]);
    }
    for (std::size_t wi = 0; wi < w_values.size(); ++wi) {
      if (two_point_ratio_leq(m_x, m_xp, w_values[wi], kappa)) {
        tails.grid[wi] += m_x;
      }
    }
  }
  return tails;
}

}  // namespace

std::vector<double> WGridSpec::values() const {
  if (points < 2 || !(w_min > 0.0 && w_min < 0.5)) {
    throw std::invalid_argument("w grid needs >= 2 points and w_min in (0, 0.5)");
  }
  std::vector<double> out;
  out.reserve(points);
  const int geometric = points - 1;
  for (int i = 0; i < geometric; ++i) {
    const double f =
        geometric == 1 ? 0.0 : static_cast<double>(i) / (geometric - 1);
    out.push_back(w_min * std::pow(0.5 / w_min, f));
  }
  out.push_back(1.0 - 1e-6);
  return out;
}

GuaranteeSpec::GuaranteeSpec(std::vector<ScoringRule> scores_in,
                             PriorClass prior_class_in, LogThreshold kappa_in,
                             double delta_in)
    : scores(std::move(scores_in)),
      prior_class(std::move(prior_class_in)),
      kappa(kappa_in),
      delta(delta_in) {
  if (scores.empty()) {
    throw std::invalid_argument("guarantee needs at least one score");
  }
  if (!(kappa.log_value() >= 0.0)) {
    throw std::invalid_argument("kappa must be nonnegative");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
}

std::string method_name(Method m) {
  switch (m) {
    case Method::exact:
      return "exact";
    case Method::grid:
      return "grid";
    case Method::monte_carlo:
      return "monte-carlo";
  }
  return "unknown";
}

ExtendedReal relative_score(const ScoringRule& rule, const FiniteBelief& prior,
                            const FiniteMechanism& mech, int output,
                            int dataset) {
  // A prior with no mass on the truth scores +inf before and after any
  // update under the log score; the difference is zero by convention and no
  // posterior is needed (the posterior may not even exist).
  if (is_neg_log_prob(rule) && prior.prob(dataset) == 0.0) {
    return ExtendedReal(0.0);
  }
  const ExtendedReal before = evaluate(rule, prior, dataset);
  const FiniteBelief posterior = posterior_update(prior, mech, output);
  const ExtendedReal after = evaluate(rule, posterior, dataset);
  return score_diff(before, after);
}

std::vector<RelativeScoreSample> relative_score_distribution(
    const ScoringRule& rule, const FiniteBelief& prior,
    const FiniteMechanism& mech, int dataset) {
  std::vector<RelativeScoreSample> out;
  for (int t = 0; t < mech.n_outputs(); ++t) {
    const double p = mech.prob(dataset, t);
    if (p == 0.0) continue;
    out.push_back({mech.alphabet()[t],
                   relative_score(rule, prior, mech, t, dataset), p});
  }
  return out;
}

double tail_probability(const ScoringRule& rule, const FiniteBelief& prior,
                        const FiniteMechanism& mech, int dataset,
                        const LogThreshold& kappa) {
  double tail = 0.0;
  for (const auto& sample :
       relative_score_distribution(rule, prior, mech, dataset)) {
    if (log_leq(sample.delta.value(), kappa)) tail += sample.prob;
  }
  return tail;
}

std::pair<double, double> wilson99(std::int64_t successes,
                                   std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 2.5758293035489004;  // 99.5th normal percentile
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

McTail tail_probability_mc(const ScoringRule& rule, const FiniteBelief& prior,
                           const FiniteMechanism& mech, int dataset,
                           const LogThreshold& kappa, std::int64_t samples,
                           std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  // The relative score of an output never changes; decide each output once.
  std::vector<int> verdict(mech.n_outputs(), -1);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const int t = mech.sample_output(dataset, rng);
    if (verdict[t] < 0) {
      const ExtendedReal delta = relative_score(rule, prior, mech, t, dataset);
      verdict[t] = log_leq(delta.value(), kappa) ? 1 : 0;
    }
    hits += verdict[t];
  }
  McTail out;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  std::tie(out.lo, out.hi) = wilson99(hits, samples);
  out.samples = samples;
  return out;
}

const std::vector<FiniteBelief>& ExplicitFinitePriors::at(
    const std::string& dataset_id) const {
  const auto it = by_dataset.find(dataset_id);
  return it == by_dataset.end() ? priors : it->second;
}

namespace {

CertificationReport certify_explicit(const FiniteMechanism& mech,
                                     const GuaranteeSpec& spec,
                                     const ExplicitFinitePriors& priors) {
  struct Task {
    int score;
    int dataset;
    int prior;
  };
  std::vector<Task> tasks;
  for (int s = 0; s < static_cast<int>(spec.scores.size()); ++s) {
    for (int x = 0; x < mech.n_datasets(); ++x) {
      const auto& list = priors.at(mech.universe().id(x));
      if (list.empty()) {
        throw std::invalid_argument(
            "explicit prior class must be non-empty at every dataset");
      }
      for (int q = 0; q < static_cast<int>(list.size()); ++q) {
        if (!(list[q].universe() == mech.universe())) {
          throw IndexMismatchError(
              "prior universe does not match the mechanism");
        }
        tasks.push_back({s, x, q});
      }
    }
  }

  std::vector<double> tails(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const auto& [s, x, q] = tasks[i];
    tails[i] = tail_probability(spec.scores[s],
                                priors.at(mech.universe().id(x))[q], mech, x,
                                spec.kappa);
  });

  CertificationReport report;
  report.method = Method::exact;
  report.attained = 1.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& [s, x, q] = tasks[i];
    report.rows.push_back({rule_name(spec.scores[s]), mech.universe().id(x),
                           "prior[" + std::to_string(q) + "]", tails[i]});
    report.attained = std::min(report.attained, tails[i]);
    if (!report.witness && !tail_meets(tails[i], spec.delta)) {
      Witness w;
      w.score = rule_name(spec.scores[s]);
      w.dataset = mech.universe().id(x);
      w.prior = "prior[" + std::to_string(q) + "]";
      const auto& prior = priors.at(mech.universe().id(x))[q];
      for (int t = 0; t < mech.n_outputs(); ++t) {
        if (mech.prob(x, t) == 0.0) continue;
        const ExtendedReal d =
            relative_score(spec.scores[s], prior, mech, t, x);
        if (!log_leq(d.value(), spec.kappa)) {
          w.violating_outputs.push_back(mech.alphabet()[t]);
        }
      }
      report.witness = std::move(w);
    }
  }
  report.verdict = tail_meets(report.attained, spec.delta);
  if (report.verdict) report.witness.reset();
  return report;
}

CertificationReport certify_two_point(const FiniteMechanism& mech,
                                      const GuaranteeSpec& spec,
                                      const NeighborTwoPointClass& cls) {
  for (const auto& rule : spec.scores) {
    if (!is_neg_log_prob(rule)) {
      throw UnsupportedPriorClassError(
          "the two-point neighbor class supports only the discrete negative "
          "log-probability score");
    }
  }
  const std::vector<std::pair<int, int>> pairs =
      cls.neighbors.ordered_pairs(mech.universe());
  if (pairs.empty()) {
    throw std::invalid_argument("neighbor relation is empty");
  }
  const std::vector<double> w_values = cls.w_grid.values();

  std::vector<PairTails> tails(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    tails[i] = two_point_pair_tails(mech, pairs[i].first, pairs[i].second,
                                    spec.kappa, w_values);
  });

  CertificationReport report;
  report.method = Method::exact;
  report.attained = 1.0;
  const Universe& u = mech.universe();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string& x = u.id(pairs[i].first);
    const std::string& xp = u.id(pairs[i].second);
    report.rows.push_back(
        {"neglogprob", x, two_point_name(x, xp, "->0"), tails[i].limit});
    for (std::size_t wi = 0; wi < w_values.size(); ++wi) {
      report.rows.push_back({"neglogprob", x,
                             two_point_name(x, xp,
                                            render_scalar_id(w_values[wi])),
                             tails[i].grid[wi]});
    }
    double pair_min = tails[i].limit;
    for (double g : tails[i].grid) pair_min = std::min(pair_min, g);
    report.attained = std::min(report.attained, pair_min);
    if (!report.witness && !tail_meets(pair_min, spec.delta)) {
      Witness w;
      w.score = "neglogprob";
      w.dataset = x;
      w.prior = two_point_name(x, xp, "->0");
      w.violating_outputs = tails[i].limit_violations;
      report.witness = std::move(w);
    }
  }
  if (cls.include_zero_mass_priors) {
    // Priors with no mass on the evaluated dataset: the relative score is
    // identically zero by the equal-infinities convention, so each tail is 1.
    for (const auto& [xi, xpi] : pairs) {
      TwoPointPrior prior(u.id(xi), u.id(xpi), 0.5);
      const FiniteBelief belief = prior.to_belief(u);
      for (int z = 0; z < u.size(); ++z) {
        if (z == xi || z == xpi) continue;
        const double tail = tail_probability(spec.scores.front(), belief, mech,
                                             z, spec.kappa);
        report.rows.push_back({"neglogprob", u.id(z),
                               two_point_name(u.id(xi), u.id(xpi), "0.5"),
                               tail});
        report.attained = std::min(report.attained, tail);
      }
    }
  }
  report.verdict = tail_meets(report.attained, spec.delta);
  if (report.verdict) report.witness.reset();
  return report;
}

CertificationReport certify_average(const GuaranteeSpec& spec,
                                    const GaussianPriorClass& cls,
                                    std::uint64_t seed) {
  for (const auto& rule : spec.scores) {
    if (!std::holds_alternative<MarginalDssRule>(rule)) {
      throw UnsupportedPriorClassError(
          "the Gaussian prior class supports only marginal moment scores");
    }
  }
  const GaussianClassSpec& class_spec = cls.spec;
  const double xbar = class_spec.xbar();
  const std::vector<GaussianBelief> priors =
      sample_gaussian_class(class_spec, seed, cls.samples);

  const std::size_t tasks = priors.size();
  std::vector<double> tails(tasks * spec.scores.size());
  parallel_for(tasks, [&](std::size_t q) {
    const GaussianBelief posterior =
        gaussian_condition_on_average(priors[q], xbar);
    for (std::size_t s = 0; s < spec.scores.size(); ++s) {
      const ExtendedReal before =
          evaluate(spec.scores[s], priors[q], class_spec.x);
      const ExtendedReal after =
          evaluate(spec.scores[s], posterior, class_spec.x);
      const double delta = score_diff(before, after).value();
      tails[q * spec.scores.size() + s] =
          log_leq(delta, spec.kappa) ? 1.0 : 0.0;
    }
  });

  CertificationReport report;
  report.method = Method::monte_carlo;
  report.samples = static_cast<std::int64_t>(priors.size());
  report.seed = seed;
  report.attained = 1.0;
  std::int64_t passing_samples = 0;
  for (std::size_t q = 0; q < tasks; ++q) {
    bool sample_pass = true;
    for (std::size_t s = 0; s < spec.scores.size(); ++s) {
      const double tail = tails[q * spec.scores.size() + s];
      report.rows.push_back({rule_name(spec.scores[s]), "x",
                             "sample[" + std::to_string(q) + "]", tail});
      report.attained = std::min(report.attained, tail);
      sample_pass = sample_pass && tail > 0.5;
      if (!report.witness && tail < 0.5) {
        report.witness = Witness{rule_name(spec.scores[s]), "x",
                                 "sample[" + std::to_string(q) + "]",
                                 {"xbar"}};
      }
    }
    passing_samples += sample_pass ? 1 : 0;
  }
  // Interval over sampled priors (a prior passes when every score does).
  report.wilson99 =
      wilson99(passing_samples, static_cast<std::int64_t>(tasks));
  report.verdict = tail_meets(report.attained, spec.delta);
  if (report.verdict) report.witness.reset();
  return report;
}

}  // namespace

CertificationReport certify_pp(const FiniteMechanism& mech,
                               const GuaranteeSpec& spec, std::uint64_t seed) {
  (void)seed;
  if (const auto* explicit_priors =
          std::get_if<ExplicitFinitePriors>(&spec.prior_class)) {
    return certify_explicit(mech, spec, *explicit_priors);
  }
  if (const auto* two_point =
          std::get_if<NeighborTwoPointClass>(&spec.prior_class)) {
    return certify_two_point(mech, spec, *two_point);
  }
  throw UnsupportedPriorClassError(
      "the Gaussian prior class certifies the average mechanism, not finite "
      "kernels");
}

CertificationReport certify_pp(const AnyMechanism& mech,
                               const GuaranteeSpec& spec, std::uint64_t seed) {
  if (const auto* finite = std::get_if<FiniteMechanism>(&mech)) {
    return certify_pp(*finite, spec, seed);
  }
  const auto* gaussian = std::get_if<GaussianPriorClass>(&spec.prior_class);
  if (!gaussian) {
    throw UnsupportedPriorClassError(
        "the average mechanism certifies against the Gaussian prior class");
  }
  return certify_average(spec, *gaussian, seed);
}

PdpReport certify_pdp(const FiniteMechanism& mech,
                      const NeighborRelation& neighbors,
                      const LogThreshold& eps, double target_delta) {
  const std::vector<std::pair<int, int>> pairs =
      neighbors.ordered_pairs(mech.universe());
  if (pairs.empty()) {
    throw std::invalid_argument("neighbor relation is empty");
  }
  std::vector<double> violations(pairs.size());
  std::vector<std::vector<std::string>> violating(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [x, xp] = pairs[i];
    double viol = 0.0;
    for (int t = 0; t < mech.n_outputs(); ++t) {
      const double m_x = mech.prob(x, t);
      if (m_x == 0.0) continue;
      if (!ratio_leq(m_x, mech.prob(xp, t), eps)) {
        viol += m_x;
        violating[i].push_back(mech.alphabet()[t]);
      }
    }
    violations[i] = viol;
  });

  PdpReport report;
  report.target_delta = target_delta;
  report.attained_delta = 0.0;
  const Universe& u = mech.universe();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    report.rows.push_back({"likelihood-ratio", u.id(pairs[i].first),
                           "neighbor " + u.id(pairs[i].second),
                           1.0 - violations[i]});
    if (violations[i] > report.attained_delta) {
      report.attained_delta = violations[i];
    }
    if (!report.witness && !delta_meets(violations[i], target_delta)) {
      report.witness =
          Witness{"likelihood-ratio", u.id(pairs[i].first),
                  "neighbor " + u.id(pairs[i].second), violating[i]};
    }
  }
  report.verdict = delta_meets(report.attained_delta, target_delta);
  if (report.verdict) report.witness.reset();
  return report;
}

Rational certify_pdp_exact(const FiniteMechanism& mech,
                           const NeighborRelation& neighbors,
                           const Rational& exp_eps) {
  Rational attained(0);
  for (const auto& [x, xp] : neighbors.ordered_pairs(mech.universe())) {
    Rational viol(0);
    for (int t = 0; t < mech.n_outputs(); ++t) {
      const Rational m_x = to_rational(mech.prob(x, t));
      if (m_x == 0) continue;
      if (m_x > exp_eps * to_rational(mech.prob(xp, t))) viol += m_x;
    }
    if (viol > attained) attained = viol;
  }
  return attained;
}

EquivalenceReport check_pdp_pp_equivalence(const FiniteMechanism& mech,
                                           const NeighborRelation& neighbors,
                                           const LogThreshold& eps,
                                           double delta,
                                           const WGridSpec& w_grid) {
  EquivalenceReport report;
  const PdpReport pdp = certify_pdp(mech, neighbors, eps, delta);
  GuaranteeSpec spec({NegLogProbRule{}},
                     NeighborTwoPointClass{neighbors, w_grid}, eps, delta);
  const CertificationReport pp = certify_pp(mech, spec);
  report.pdp_verdict = pdp.verdict;
  report.pp_verdict = pp.verdict;
  report.pdp_attained_delta = pdp.attained_delta;
  report.pp_attained_tail = pp.attained;

  // Tails at finite prior weights never undercut the limit tail, and shrink
  // monotonically as the weight decreases toward it.
  report.grid_monotone = true;
  const std::vector<double> w_values = w_grid.values();
  for (const auto& [x, xp] : neighbors.ordered_pairs(mech.universe())) {
    const PairTails tails =
        two_point_pair_tails(mech, x, xp, eps, w_values);
    double prev = tails.limit;
    for (std::size_t wi = 0; wi < w_values.size(); ++wi) {
      if (tails.grid[wi] < prev - kMassTol) {
        report.grid_monotone = false;
        report.detail = "tail at w=" + render_scalar_id(w_values[wi]) +
                        " undercuts the smaller-weight tail for pair (" +
                        mech.universe().id(x) + "," + mech.universe().id(xp) +
                        ")";
      }
      prev = std::max(prev, tails.grid[wi]);
    }
  }

  report.agree = report.pdp_verdict == report.pp_verdict;
  if (!report.agree && report.detail.empty()) {
    std::ostringstream os;
    os << "pdp verdict " << report.pdp_verdict << " (attained delta "
       << report.pdp_attained_delta << ") vs pp verdict " << report.pp_verdict
       << " (attained tail " << report.pp_attained_tail << ")";
    report.detail = os.str();
  }
  return report;
}

namespace {

// Smallest sup-norm distance from `belief` to a class member.
double class_distance(const FiniteBelief& belief,
                      const std::vector<FiniteBelief>& members) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& member : members) {
    best = std::min(best,
                    (belief.probs() - member.probs()).cwiseAbs().maxCoeff());
  }
  return best;
}

constexpr double kConjugacyTol = 1e-9;

// Posteriors on every positive-marginal output must stay inside the class.
// Null outputs are skipped: no posterior exists there and none is consumed.
std::string conjugacy_violation(const std::vector<FiniteBelief>& members,
                                const FiniteMechanism& mech,
                                const std::string& label) {
  for (std::size_t q = 0; q < members.size(); ++q) {
    for (int t = 0; t < mech.n_outputs(); ++t) {
      double marginal = 0.0;
      for (int z = 0; z < members[q].size(); ++z) {
        marginal += members[q].prob(z) * mech.prob(z, t);
      }
      if (marginal <= 0.0) continue;
      const FiniteBelief posterior = posterior_update(members[q], mech, t);
      if (class_distance(posterior, members) > kConjugacyTol) {
        return "posterior of prior[" + std::to_string(q) + "] under " + label +
               " output '" + mech.alphabet()[t] + "' leaves the class";
      }
    }
  }
  return "";
}

}  // namespace

CompositionReport check_composition(const FiniteMechanism& m1,
                                    const FiniteMechanism& m2,
                                    const std::vector<ScoringRule>& scores,
                                    const PriorClass& prior_class,
                                    const LogThreshold& kappa1, double delta1,
                                    const LogThreshold& kappa2, double delta2) {
  CompositionReport report;

  std::vector<FiniteMechanism> slices;
  if (m2.is_second_stage()) {
    for (int t = 0; t < m2.n_inputs(); ++t) slices.push_back(m2.slice(t));
  } else {
    slices.push_back(m2);
  }

  if (const auto* explicit_priors =
          std::get_if<ExplicitFinitePriors>(&prior_class)) {
    // Each dataset's family must be closed under updating on its own.
    std::vector<const std::vector<FiniteBelief>*> families;
    if (!explicit_priors->priors.empty()) {
      families.push_back(&explicit_priors->priors);
    }
    for (const auto& [id, list] : explicit_priors->by_dataset) {
      (void)id;
      families.push_back(&list);
    }
    for (const auto* family : families) {
      if (!report.conjugacy_witness.empty()) break;
      report.conjugacy_witness = conjugacy_violation(*family, m1, "m1");
      for (std::size_t s = 0;
           s < slices.size() && report.conjugacy_witness.empty(); ++s) {
        report.conjugacy_witness = conjugacy_violation(
            *family, slices[s], "m2 slice " + std::to_string(s));
      }
    }
    report.conjugate = report.conjugacy_witness.empty();
  } else if (std::holds_alternative<NeighborTwoPointClass>(prior_class)) {
    // Updating a two-point prior rescales its two weights; the support never
    // grows, so the class of all two-point priors on neighbor pairs is closed
    // under every mechanism.
    report.conjugate = true;
  } else {
    throw UnsupportedPriorClassError(
        "composition checks need a finite prior class");
  }

  const GuaranteeSpec spec1(scores, prior_class, kappa1, delta1);
  const GuaranteeSpec spec2(scores, prior_class, kappa2, delta2);

  const CertificationReport r1 = certify_pp(m1, spec1);
  report.m1_pass = r1.verdict;
  report.m1_attained = r1.attained;

  report.m2_pass = true;
  report.m2_attained = 1.0;
  for (const auto& slice : slices) {
    const CertificationReport rs = certify_pp(slice, spec2);
    report.m2_pass = report.m2_pass && rs.verdict;
    report.m2_attained = std::min(report.m2_attained, rs.attained);
  }

  // The summed failure budget may reach 1, where the composed guarantee is
  // vacuous; probe at delta = 0 for the attained tail and decide directly.
  const GuaranteeSpec composed_probe(scores, prior_class, kappa1 + kappa2,
                                     0.0);
  const CertificationReport rc = certify_pp(tensor(m1, m2), composed_probe);
  report.composed_attained = rc.attained;
  const double budget = delta1 + delta2;
  report.composed_pass = budget >= 1.0 || tail_meets(rc.attained, budget);

  report.bound_holds = !(report.conjugate && report.m1_pass && report.m2_pass) ||
                       report.composed_pass;
  return report;
}

namespace {

// Groups a list of (value, mass) pairs by value (within kMassTol) after
// sorting; infinities group among themselves.
std::vector<std::pair<double, double>> grouped_multiset(
    std::vector<std::pair<double, double>> items) {
  std::sort(items.begin(), items.end());
  std::vector<std::pair<double, double>> grouped;
  for (const auto& [value, mass] : items) {
    if (!grouped.empty() &&
        ((std::isinf(value) && grouped.back().first == value) ||
         (!std::isinf(value) &&
          std::abs(value - grouped.back().first) <= kMassTol))) {
      grouped.back().second += mass;
    } else {
      grouped.emplace_back(value, mass);
    }
  }
  return grouped;
}

std::vector<std::pair<double, double>> delta_multiset(
    const ScoringRule& rule, const FiniteBelief& prior,
    const FiniteMechanism& mech, int dataset) {
  std::vector<std::pair<double, double>> items;
  for (const auto& sample :
       relative_score_distribution(rule, prior, mech, dataset)) {
    items.emplace_back(sample.delta.value(), sample.prob);
  }
  return grouped_multiset(std::move(items));
}

double multiset_discrepancy(
    const std::vector<std::pair<double, double>>& a,
    const std::vector<std::pair<double, double>>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool same_value =
        (std::isinf(a[i].first) && a[i].first == b[i].first) ||
        (!std::isinf(a[i].first) && !std::isinf(b[i].first) &&
         std::abs(a[i].first - b[i].first) <= kMassTol);
    if (!same_value) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(a[i].second - b[i].second));
  }
  return worst;
}

}  // namespace

RecPostReport check_receiver_postprocessing(const FiniteMechanism& m,
                                            const FiniteMechanism& k,
                                            const GuaranteeSpec& spec) {
  FiniteMechanism joint = [&] {
    if (!k.is_second_stage() && k.universe().ids() == m.alphabet()) {
      return tensor_independent(m, k);
    }
    if (!k.data_independent()) {
      throw StructuralViolationError(
          "post-processing kernel depends on the data");
    }
    return tensor(m, k);
  }();

  RecPostReport report;
  report.multiset_equal = true;
  report.max_mass_discrepancy = 0.0;

  // Priors in force at each dataset.
  std::vector<std::vector<std::pair<FiniteBelief, std::string>>> priors_at(
      m.n_datasets());
  if (const auto* explicit_priors =
          std::get_if<ExplicitFinitePriors>(&spec.prior_class)) {
    for (int x = 0; x < m.n_datasets(); ++x) {
      const auto& list = explicit_priors->at(m.universe().id(x));
      for (std::size_t q = 0; q < list.size(); ++q) {
        priors_at[x].emplace_back(list[q], "prior[" + std::to_string(q) + "]");
      }
    }
  } else if (const auto* two_point =
                 std::get_if<NeighborTwoPointClass>(&spec.prior_class)) {
    std::vector<std::pair<FiniteBelief, std::string>> shared;
    for (const auto& [x, xp] :
         two_point->neighbors.ordered_pairs(m.universe())) {
      for (double w : two_point->w_grid.values()) {
        TwoPointPrior prior(m.universe().id(x), m.universe().id(xp), w);
        shared.emplace_back(prior.to_belief(m.universe()),
                            two_point_name(m.universe().id(x),
                                           m.universe().id(xp),
                                           render_scalar_id(w)));
      }
    }
    for (int x = 0; x < m.n_datasets(); ++x) priors_at[x] = shared;
  } else {
    throw UnsupportedPriorClassError(
        "post-processing checks need a finite prior class");
  }

  for (const auto& rule : spec.scores) {
    for (int x = 0; x < m.n_datasets(); ++x) {
      for (const auto& [prior, name] : priors_at[x]) {
        const auto before = delta_multiset(rule, prior, m, x);
        const auto after = delta_multiset(rule, prior, joint, x);
        const double disc = multiset_discrepancy(before, after);
        report.max_mass_discrepancy =
            std::max(report.max_mass_discrepancy, disc);
        if (disc > kMassTol) {
          report.multiset_equal = false;
          if (report.detail.empty()) {
            report.detail = "relative-score distribution changed for " +
                            rule_name(rule) + ", dataset " +
                            m.universe().id(x) + ", " + name;
          }
        }
      }
    }
  }

  const CertificationReport rm = certify_pp(m, spec);
  const CertificationReport rj = certify_pp(joint, spec);
  report.verdicts_match = rm.verdict == rj.verdict &&
                          std::abs(rm.attained - rj.attained) <= kMassTol;
  if (!report.verdicts_match && report.detail.empty()) {
    report.detail = "certification verdicts differ after post-processing";
  }
  report.pass = report.multiset_equal && report.verdicts_match;
  return report;
}

std::optional<SenderPostWitness> search_sender_postprocessing_counterexample(
    const SearchBounds& bounds, std::uint64_t seed, std::int64_t budget) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<LogThreshold> levels = {
      LogThreshold::log_of_rational(3, 2), LogThreshold::log_of_rational(2, 1),
      LogThreshold::log_of_rational(3, 1)};

  for (std::int64_t cand = 0; cand < budget; ++cand) {
    const int n = 2 + static_cast<int>(unif(rng) * (bounds.max_universe - 1));
    const int km = 2 + static_cast<int>(unif(rng) * (bounds.max_m_alphabet - 1));
    const int kk = 2 + static_cast<int>(unif(rng) * (bounds.max_k_alphabet - 1));

    std::vector<double> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;
    Universe universe = scalar_universe(data);

    Eigen::MatrixXd mk(n, km);
    for (int x = 0; x < n; ++x) {
      mk.row(x) = random_dyadic_distribution(rng, km, 16, 0.35).transpose();
    }
    FiniteMechanism m(universe, [&] {
      std::vector<std::string> a;
      for (int t = 0; t < km; ++t) a.push_back("t" + std::to_string(t));
      return a;
    }(), std::move(mk));

    Eigen::MatrixXd kk_kernel(km, kk);
    for (int t = 0; t < km; ++t) {
      kk_kernel.row(t) = random_dyadic_distribution(rng, kk, 16, 0.35).transpose();
    }
    FiniteMechanism k(Universe(m.alphabet()), [&] {
      std::vector<std::string> a;
      for (int t = 0; t < kk; ++t) a.push_back("u" + std::to_string(t));
      return a;
    }(), std::move(kk_kernel));

    const LogThreshold& eps = levels[cand % levels.size()];
    const NeighborRelation neighbors = complete_neighbors(universe);

    const PdpReport before = certify_pdp(m, neighbors, eps);
    if (before.attained_delta >= 1.0 - 1e-9) continue;  // nothing to preserve
    const FiniteMechanism chained = chain_independent(m, k);
    const PdpReport after = certify_pdp(chained, neighbors, eps);
    if (after.attained_delta <= before.attained_delta + 1e-9) continue;

    // Exact re-verification: all kernels are dyadic and e^eps is rational.
    const Rational exp_eps = *eps.exp_exact();
    const Rational exact_before = certify_pdp_exact(m, neighbors, exp_eps);
    const Rational exact_after = certify_pdp_exact(chained, neighbors, exp_eps);
    if (!(exact_before < exact_after) || exact_before >= 1) continue;

    SenderPostWitness witness{std::move(m),
                              std::move(k),
                              chained,
                              eps,
                              before.attained_delta,
                              before.attained_delta,
                              after.attained_delta,
                              cand};
    return witness;
  }
  return std::nullopt;
}

AverageBoundReport certify_average_gaussian(const GaussianClassSpec& spec,
                                            int count, std::uint64_t seed,
                                            bool collect_rows) {
  constexpr double kBoundSlack = 1e-8;
  AverageBoundReport report;
  report.bound = spec.r1 + std::log(spec.r2);
  report.seed = seed;

  const std::vector<GaussianBelief> priors =
      sample_gaussian_class(spec, seed, count);
  report.samples = static_cast<std::int64_t>(priors.size());
  const double xbar = spec.xbar();
  const int n = spec.dim();

  std::vector<double> max_delta(priors.size());
  parallel_for(priors.size(), [&](std::size_t q) {
    const GaussianBelief posterior =
        gaussian_condition_on_average(priors[q], xbar);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
      const ScoringRule rule = MarginalDssRule{i};
      const double delta =
          score_diff(evaluate(rule, priors[q], spec.x),
                     evaluate(rule, posterior, spec.x))
              .value();
      worst = std::max(worst, delta);
    }
    max_delta[q] = worst;
  });

  report.max_delta = -std::numeric_limits<double>::infinity();
  report.min_slack = std::numeric_limits<double>::infinity();
  report.slacks.reserve(priors.size());
  for (std::size_t q = 0; q < priors.size(); ++q) {
    report.max_delta = std::max(report.max_delta, max_delta[q]);
    const double slack = report.bound - max_delta[q];
    report.slacks.push_back(slack);
    report.min_slack = std::min(report.min_slack, slack);
    if (max_delta[q] > report.bound + kBoundSlack) ++report.violations;
    if (collect_rows) {
      report.rows.push_back({"dss(worst-coordinate)", "x",
                             "sample[" + std::to_string(q) + "]",
                             max_delta[q]});
    }
  }
  report.pass = report.violations == 0;
  return report;
}

}  // namespace ppcert
