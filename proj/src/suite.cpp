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

#include "ppcert/suite.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ppcert/errors.hpp"
#include "ppcert/generators.hpp"

namespace ppcert {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::vector<LogThreshold> rational_eps_levels() {
  return {LogThreshold::log_of_rational(1, 1),
          LogThreshold::log_of_rational(5, 4),
          LogThreshold::log_of_rational(3, 2),
          LogThreshold::log_of_rational(2, 1),
          LogThreshold::log_of_rational(3, 1)};
}

std::vector<double> dyadic_delta_levels() {
  return {0.0, 1.0 / 64, 1.0 / 16, 0.25, 0.5};
}

}  // namespace

CheckResult check_propriety_battery(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  CheckResult result{"propriety", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  const Universe universe = scalar_universe({0, 1, 2, 3, 4, 5});

  // Discrete negative log-probability: strictly proper; include partial
  // supports to exercise infinite scores.
  std::vector<FiniteBelief> family;
  family.reserve(instances);
  for (int i = 0; i < instances; ++i) {
    family.push_back(random_belief(rng, universe, 256, i % 3 == 0 ? 0.3 : 0.0));
  }
  const ProprietyReport nlp = propriety_check(ScoringRule(NegLogProbRule{}),
                                              family);
  if (!nlp.pass) {
    result.pass = false;
    result.worst = "neglogprob: " + nlp.detail;
  }

  // Interval score over the same family.
  const ProprietyReport interval =
      propriety_check(ScoringRule(IntervalRule{2.0}), family);
  if (interval.pass == false && result.pass) {
    result.pass = false;
    result.worst = "interval: " + interval.detail;
  }

  // Marginal moment score over random Gaussians, via the closed form.
  std::vector<GaussianBelief> gaussians;
  gaussians.reserve(instances);
  for (int i = 0; i < instances; ++i) {
    gaussians.push_back(random_gaussian(rng, 2));
  }
  for (int coord = 1; coord <= 2 && result.pass; ++coord) {
    const ProprietyReport dss =
        propriety_check(MarginalDssRule{coord}, gaussians);
    if (!dss.pass) {
      result.pass = false;
      result.worst = "dss: " + dss.detail;
    }
  }

  result.instances = 3 * static_cast<std::int64_t>(instances);
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_score_generation_battery(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  CheckResult result{"score-generation", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 6);

  for (int i = 0; i < instances && result.pass; ++i) {
    // Best-response scores from random loss tables are proper.
    std::vector<double> values(size(rng));
    for (std::size_t v = 0; v < values.size(); ++v) values[v] = v;
    const Universe universe = scalar_universe(values);
    const PrivacyFunction rho =
        random_privacy_function(rng, size(rng), universe);
    const LossInducedScore score = score_from_loss(rho);
    std::vector<FiniteBelief> family;
    for (int b = 0; b < 12; ++b) family.push_back(random_belief(rng, universe));
    const ProprietyReport generated = propriety_check(
        [&score](const FiniteBelief& b, int x) { return score(b, x); }, family,
        /*require_strict=*/false);
    if (!generated.pass) {
      result.pass = false;
      result.worst =
          "generated score improper at instance " + std::to_string(i);
      break;
    }

    // Score -> loss -> score is the identity on the family wherever the
    // best response is unique (non-strict rules may tie).
    const ScoringRule rule =
        i % 2 == 0 ? ScoringRule(NegLogProbRule{}) : ScoringRule(IntervalRule{2.0});
    std::vector<FiniteBelief> round_family;
    for (int b = 0; b < 5; ++b) {
      round_family.push_back(
          random_belief(rng, universe, 256, i % 4 == 0 ? 0.25 : 0.0));
    }
    const PrivacyFunction bridged = loss_from_score(rule, round_family);
    const LossInducedScore rebuilt = score_from_loss(bridged);
    for (std::size_t q = 0; q < round_family.size(); ++q) {
      // Unique-minimizer guard: with ties the selected decision is the
      // lowest index and the rebuilt score may legitimately differ.
      ExtendedReal best = ExtendedReal::infinity();
      int ties = 0;
      for (int d = 0; d < bridged.n_decisions(); ++d) {
        const ExtendedReal loss = expected_loss(bridged, d, round_family[q]);
        if (score_diff(loss, best).value() < -1e-12) {
          best = loss;
          ties = 1;
        } else if (std::abs(score_diff(loss, best).value()) <= 1e-12) {
          ++ties;
        }
      }
      if (ties > 1) continue;
      for (int x = 0; x < universe.size(); ++x) {
        const ExtendedReal original = evaluate(rule, round_family[q], x);
        const ExtendedReal back = rebuilt(round_family[q], x);
        if (std::abs(score_diff(back, original).value()) > 1e-9) {
          result.pass = false;
          result.worst = "round trip drifted at instance " + std::to_string(i);
          break;
        }
      }
      if (!result.pass) break;
    }
  }
  result.instances = instances;
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_worst_case_loss_battery(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  CheckResult result{"worst-case-loss", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 6);

  for (int i = 0; i < instances && result.pass; ++i) {
    std::vector<double> values(size(rng));
    for (std::size_t v = 0; v < values.size(); ++v) values[v] = v;
    const Universe universe = scalar_universe(values);
    const int decisions = size(rng);
    const PrivacyFunction rho =
        random_privacy_function(rng, decisions, universe);

    std::vector<PrivacyFunction> alts;
    alts.push_back(rho);  // equality case
    alts.push_back(PrivacyFunction(rho.decisions, rho.universe, -rho.rho));
    alts.push_back(random_privacy_function(rng, decisions, universe));

    std::vector<FiniteBelief> beliefs;
    for (int b = 0; b < 10; ++b) beliefs.push_back(random_belief(rng, universe));

    const WorstCaseLossReport report =
        worst_case_loss_check(rho, alts, beliefs);
    if (!report.pass) {
      result.pass = false;
      result.worst = "best response not worst case at instance " +
                     std::to_string(i) + ", gap " +
                     std::to_string(report.worst_gap);
    }
  }
  result.instances = instances;
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_equivalence_battery(std::uint64_t seed, int instances,
                                      int structural_zero_instances) {
  const auto start = Clock::now();
  CheckResult result{"pdp-pp-equivalence", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  const std::vector<LogThreshold> eps_levels = rational_eps_levels();
  const std::vector<double> delta_levels = dyadic_delta_levels();

  for (int i = 0; i < instances && result.pass; ++i) {
    MechanismGenOptions opt;
    opt.zero_prob = i < structural_zero_instances ? 0.4 : 0.0;
    FiniteMechanism mech = random_mechanism(rng, opt);
    if (i < structural_zero_instances && mech.kernel().minCoeff() > 0.0) {
      // Force at least one structural zero to exercise the zero-density
      // branch of the equivalence.
      Eigen::MatrixXd kernel = mech.kernel();
      kernel(0, 1) += kernel(0, 0);
      kernel(0, 0) = 0.0;
      mech = FiniteMechanism(mech.universe(), mech.alphabet(),
                             std::move(kernel));
    }
    const NeighborRelation neighbors = complete_neighbors(mech.universe());
    for (const auto& eps : eps_levels) {
      for (double delta : delta_levels) {
        const EquivalenceReport report =
            check_pdp_pp_equivalence(mech, neighbors, eps, delta);
        if (!report.agree || !report.grid_monotone) {
          result.pass = false;
          result.worst = "instance " + std::to_string(i) + ": " +
                         report.detail;
          break;
        }
      }
      if (!result.pass) break;
    }
  }
  result.instances =
      static_cast<std::int64_t>(instances) *
      static_cast<std::int64_t>(eps_levels.size() * delta_levels.size());
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_composition_battery(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  CheckResult result{"composition", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  const std::vector<LogThreshold> eps_levels = rational_eps_levels();
  std::uniform_int_distribution<int> pick_eps(
      0, static_cast<int>(eps_levels.size()) - 1);
  const std::vector<ScoringRule> scores = {NegLogProbRule{}};

  int checked = 0;
  for (int i = 0; i < instances * 4 && checked < instances; ++i) {
    MechanismGenOptions opt;
    opt.max_universe = 3;
    opt.max_alphabet = 4;
    opt.zero_prob = i % 3 == 0 ? 0.25 : 0.0;
    const FiniteMechanism m1 = random_mechanism(rng, opt);

    const FiniteMechanism m2 = [&]() -> FiniteMechanism {
      if (i % 10 == 0) {
        // Constant second stage: the composed guarantee equals m1's.
        return constant_mechanism(
            m1.universe(), {"c0", "c1"},
            random_dyadic_distribution(rng, 2, 64, 0.0));
      }
      if (i % 2 == 0) {
        return random_second_stage(rng, m1.universe(), m1.alphabet(), 4, 64,
                                   opt.zero_prob);
      }
      // First-stage second mechanism on the same universe (independent of
      // the first release, broadcast over its outputs).
      const int k = 2 + (i % 3);
      Eigen::MatrixXd kernel(m1.universe().size(), k);
      for (int x = 0; x < m1.universe().size(); ++x) {
        kernel.row(x) =
            random_dyadic_distribution(rng, k, 64, opt.zero_prob).transpose();
      }
      std::vector<std::string> alphabet;
      for (int t = 0; t < k; ++t) alphabet.push_back("c" + std::to_string(t));
      return FiniteMechanism(m1.universe(), std::move(alphabet),
                             std::move(kernel));
    }();

    PriorClass prior_class =
        i % 5 == 0
            ? PriorClass(ExplicitFinitePriors{[&] {
                std::vector<FiniteBelief> priors;
                for (int z = 0; z < m1.universe().size(); ++z) {
                  priors.push_back(
                      FiniteBelief::point_mass(m1.universe(), z));
                }
                return priors;
              }()})
            : PriorClass(NeighborTwoPointClass{
                  complete_neighbors(m1.universe()), WGridSpec{}, false});

    const LogThreshold kappa1 = eps_levels[pick_eps(rng)];
    const LogThreshold kappa2 = eps_levels[pick_eps(rng)];

    // Use each stage's attained level so the preconditions hold exactly.
    const GuaranteeSpec probe1(scores, prior_class, kappa1, 0.0);
    const double tau1 = certify_pp(m1, probe1).attained;
    if (tau1 <= 0.0) continue;
    const double delta1 = 1.0 - tau1;

    double tau2 = 1.0;
    const GuaranteeSpec probe2(scores, prior_class, kappa2, 0.0);
    if (m2.is_second_stage()) {
      for (int t = 0; t < m2.n_inputs(); ++t) {
        tau2 = std::min(tau2, certify_pp(m2.slice(t), probe2).attained);
      }
    } else {
      tau2 = certify_pp(m2, probe2).attained;
    }
    if (tau2 <= 0.0) continue;
    const double delta2 = 1.0 - tau2;

    const CompositionReport report = check_composition(
        m1, m2, scores, prior_class, kappa1, delta1, kappa2, delta2);
    ++checked;
    if (!report.conjugate) {
      result.pass = false;
      result.worst = "conjugacy unexpectedly failed: " +
                     report.conjugacy_witness;
    } else if (!report.m1_pass || !report.m2_pass) {
      result.pass = false;
      result.worst = "stage certification failed at its own attained level";
    } else if (!report.bound_holds) {
      result.pass = false;
      result.worst =
          "composition bound violated: composed attained " +
          std::to_string(report.composed_attained) + " vs budget delta " +
          std::to_string(delta1 + delta2);
    }
    if (!result.pass) break;
  }
  result.instances = checked;
  result.runtime_ms = ms_since(start);
  if (checked < instances && result.pass) {
    result.pass = false;
    result.worst = "generator produced too few usable instances";
  }
  return result;
}

CheckResult check_receiver_postprocessing_battery(std::uint64_t seed,
                                                  int instances) {
  const auto start = Clock::now();
  CheckResult result{"receiver-postprocessing", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  const std::vector<LogThreshold> eps_levels = rational_eps_levels();
  std::uniform_int_distribution<int> pick_eps(
      0, static_cast<int>(eps_levels.size()) - 1);
  std::uniform_int_distribution<int> pick_delta(0, 4);

  for (int i = 0; i < instances && result.pass; ++i) {
    MechanismGenOptions opt;
    opt.max_universe = 3;
    opt.max_alphabet = 4;
    opt.zero_prob = i % 4 == 0 ? 0.25 : 0.0;
    const FiniteMechanism m = random_mechanism(rng, opt);

    FiniteMechanism k = [&]() -> FiniteMechanism {
      if (i % 7 == 0) {
        // Deterministic relabeling / merge.
        std::vector<int> map(m.n_outputs());
        std::uniform_int_distribution<int> to(0, 1);
        for (auto& v : map) v = to(rng);
        return deterministic_mechanism(Universe(m.alphabet()), {"u0", "u1"},
                                       map);
      }
      return random_postprocessing_kernel(rng, m.alphabet(), 4, 64,
                                          i % 4 == 0 ? 0.25 : 0.0);
    }();

    const GuaranteeSpec spec(
        {NegLogProbRule{}},
        NeighborTwoPointClass{complete_neighbors(m.universe()), WGridSpec{},
                              false},
        eps_levels[pick_eps(rng)], dyadic_delta_levels()[pick_delta(rng)]);

    const RecPostReport report = check_receiver_postprocessing(m, k, spec);
    if (!report.pass) {
      result.pass = false;
      result.worst = "instance " + std::to_string(i) + ": " + report.detail;
    }
  }
  result.instances = instances;
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_sender_counterexample(std::uint64_t seed,
                                        std::int64_t budget) {
  const auto start = Clock::now();
  CheckResult result{"sender-postprocessing-counterexample", false, budget,
                     0.0, ""};
  const auto witness =
      search_sender_postprocessing_counterexample(SearchBounds{}, seed, budget);
  if (witness) {
    result.pass = true;
    result.instances = witness->candidate_index + 1;
    std::ostringstream os;
    os << "witness at candidate " << witness->candidate_index
       << ": attained delta " << witness->m_attained << " -> "
       << witness->mk_attained << " after chaining (eps = "
       << witness->eps.log_value() << ")";
    result.worst = os.str();
  } else {
    result.worst = "budget exhausted without a verified witness";
  }
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_average_bound_battery(std::uint64_t seed,
                                        int samples_per_config,
                                        bool full_grid) {
  const auto start = Clock::now();
  CheckResult result{"average-bound", true, 0, 0.0, ""};
  const std::vector<int> ns =
      full_grid ? std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9, 10}
                : std::vector<int>{2, 3, 5};
  const std::vector<double> r1s = {0.5, 1.0, 2.0};
  const std::vector<double> r2s = {2.0, 5.0, 10.0};

  std::uint64_t config_seed = seed;
  for (int n : ns) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 0.5 * i - 1.0;
    for (double r1 : r1s) {
      for (double r2 : r2s) {
        const GaussianClassSpec spec(r1, r2, x);
        const AverageBoundReport report =
            certify_average_gaussian(spec, samples_per_config, ++config_seed);
        result.instances += report.samples;
        if (!report.pass && result.pass) {
          result.pass = false;
          std::ostringstream os;
          os << "bound violated at n=" << n << " r1=" << r1 << " r2=" << r2
             << ": max delta " << report.max_delta << " vs bound "
             << report.bound;
          result.worst = os.str();
        }
      }
    }
  }
  result.runtime_ms = ms_since(start);
  return result;
}

CheckResult check_gaussian_inequalities(std::uint64_t seed, int instances) {
  const auto start = Clock::now();
  CheckResult result{"covariance-inequalities", true, 0, 0.0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dims(2, 8);

  for (int i = 0; i < instances && result.pass; ++i) {
    const GaussianBelief g = random_gaussian(rng, dims(rng));
    CorrelationDecomposition dec;
    try {
      dec = correlation_decompose(g.cov());
    } catch (const SingularCorrelationError&) {
      continue;
    }
    const int n = g.dim();
    Eigen::VectorXd vi(n);
    for (int a = 0; a < n; ++a) {
      double s = 0.0;
      for (int b = 0; b < n; ++b) s += dec.phi(a, b) * dec.sigma(b);
      vi(a) = s / n;
    }
    double v = 0.0;
    for (int a = 0; a < n; ++a) v += dec.sigma(a) * vi(a);
    v /= n;
    const double total = dec.sigma.squaredNorm();
    for (int a = 0; a < n; ++a) {
      if (v < vi(a) * vi(a) - 1e-12 * std::max(1.0, v)) {
        result.pass = false;
        result.worst = "v >= v_i^2 failed at instance " + std::to_string(i);
        break;
      }
      const double lhs = 1.0 - vi(a) * vi(a) / v;
      const double rhs = (dec.lambda_min / dec.lambda_max) *
                         (1.0 - dec.sigma(a) * dec.sigma(a) / total);
      if (lhs < rhs - 1e-9) {
        result.pass = false;
        result.worst =
            "posterior-variance lower bound failed at instance " +
            std::to_string(i);
        break;
      }
    }
  }
  result.instances = instances;
  result.runtime_ms = ms_since(start);
  return result;
}

SuiteResult run_suite(const SuiteConfig& config) {
  SuiteResult result;
  result.checks.push_back(check_propriety_battery(config.seed, config.instances));
  result.checks.push_back(
      check_score_generation_battery(config.seed + 1, config.instances));
  result.checks.push_back(
      check_worst_case_loss_battery(config.seed + 2, config.instances));
  result.checks.push_back(check_equivalence_battery(
      config.seed + 3, config.instances, std::max(50, config.instances / 10)));
  result.checks.push_back(
      check_composition_battery(config.seed + 4, config.pair_instances));
  result.checks.push_back(check_receiver_postprocessing_battery(
      config.seed + 5, config.pair_instances));
  result.checks.push_back(
      check_sender_counterexample(config.seed + 6, config.search_budget));
  result.checks.push_back(check_average_bound_battery(
      config.seed + 7, config.gaussian_samples, config.full_gaussian_grid));
  result.checks.push_back(
      check_gaussian_inequalities(config.seed + 8, 1000));
  result.all_pass = true;
  for (const auto& check : result.checks) {
    result.all_pass = result.all_pass && check.pass;
  }
  return result;
}

std::string format_suite_table(const SuiteResult& result) {
  std::ostringstream os;
  os << "check                                 result  instances  runtime\n";
  for (const auto& check : result.checks) {
    std::string name = check.name;
    name.resize(36, ' ');
    std::ostringstream runtime;
    runtime.precision(1);
    runtime << std::fixed << check.runtime_ms / 1000.0 << "s";
    os << name << "  " << (check.pass ? "PASS" : "FAIL") << "    ";
    std::string count = std::to_string(check.instances);
    count.resize(9, ' ');
    os << count << "  " << runtime.str();
    if (!check.pass && !check.worst.empty()) os << "  [" << check.worst << "]";
    os << "\n";
  }
  os << (result.all_pass ? "overall: PASS" : "overall: FAIL") << "\n";
  return os.str();
}

}  // namespace ppcert
