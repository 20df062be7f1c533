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
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ppcert/certify.hpp"
#include "ppcert/errors.hpp"
#include "ppcert/json_io.hpp"
#include "ppcert/suite.hpp"

namespace {

using ppcert::Json;

constexpr int kExitTrue = 0;
constexpr int kExitParse = 2;
constexpr int kExitFalse = 3;
constexpr int kExitPrecondition = 4;

#ifndef PPCERT_VERSION
#define PPCERT_VERSION "0.0.0"
#endif

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct OutputOptions {
  std::string out_path;
  std::string format = "json";
};

void emit(const Json& payload, const std::string& command,
          const std::vector<ppcert::EvalRow>& rows, const OutputOptions& opt) {
  std::string content;
  if (opt.format == "csv") {
    content = ppcert::rows_to_csv(rows);
  } else {
    Json report = payload;
    report["tool"] = "ppcert";
    report["version"] = PPCERT_VERSION;
    report["command"] = command;
    report["timestamp"] = utc_timestamp();
    content = ppcert::dump_json_17(report);
  }
  if (opt.out_path.empty()) {
    std::cout << content;
  } else {
    ppcert::write_file_atomic(opt.out_path, content);
  }
}

ppcert::LogThreshold threshold_from(double log_value,
                                    const std::string& exp_ratio) {
  if (exp_ratio.empty()) return ppcert::LogThreshold(log_value);
  const auto slash = exp_ratio.find('/');
  const long num = std::stol(exp_ratio.substr(0, slash));
  const long den =
      slash == std::string::npos ? 1 : std::stol(exp_ratio.substr(slash + 1));
  return ppcert::LogThreshold::log_of_rational(num, den);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification of worst-case relative-privacy-score guarantees "
               "for finite and deterministic release mechanisms"};
  app.require_subcommand(1);

  std::string mechanism_arg, mechanism2_arg, kernel_arg, guarantee_arg,
      neighbors_arg;
  double eps = 0.0, delta = 0.0, delta_override = -1.0, kappa = -1.0,
         kappa2 = -1.0, delta2 = 0.0, tolerance = 1e-8;
  std::string eps_exp, kappa_exp, kappa2_exp;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  std::int64_t budget = 1000000;
  int grid_points = 25;
  OutputOptions output;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", output.out_path, "Write the report to this path");
    cmd->add_option("--format", output.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* pp = app.add_subcommand("certify-pp",
                                "Certify the worst-case tail criterion");
  pp->add_option("--mechanism", mechanism_arg, "Mechanism JSON or path")
      ->required();
  pp->add_option("--guarantee", guarantee_arg, "Guarantee JSON or path")
      ->required();
  pp->add_option("--kappa", kappa, "Override the guarantee's kappa");
  pp->add_option("--exp-kappa", kappa_exp,
                 "Exact e^kappa as p/q, overriding kappa");
  pp->add_option("--delta", delta_override, "Override the guarantee's delta");
  pp->add_option("--seed", seed, "Seed for sampled prior classes");
  pp->add_option("--samples", samples, "Sample count for sampled classes");
  pp->add_option("--grid", grid_points, "Two-point prior weight grid size");
  add_common(pp);

  auto* pdp = app.add_subcommand("certify-pdp",
                                 "Certify the likelihood-ratio tail criterion");
  pdp->add_option("--mechanism", mechanism_arg, "Mechanism JSON or path")
      ->required();
  pdp->add_option("--neighbors", neighbors_arg,
                  "Neighbor pairs JSON or path (default: complete)");
  pdp->add_option("--eps", eps, "Privacy level")->required();
  pdp->add_option("--exp-eps", eps_exp, "Exact e^eps as p/q");
  pdp->add_option("--delta", delta, "Target failure probability");
  add_common(pdp);

  auto* eq = app.add_subcommand(
      "equivalence",
      "Check that the likelihood-ratio and relative-score certifiers agree");
  eq->add_option("--mechanism", mechanism_arg, "Mechanism JSON or path")
      ->required();
  eq->add_option("--neighbors", neighbors_arg,
                 "Neighbor pairs JSON or path (default: complete)");
  eq->add_option("--eps", eps, "Privacy level")->required();
  eq->add_option("--exp-eps", eps_exp, "Exact e^eps as p/q");
  eq->add_option("--delta", delta, "Failure probability");
  eq->add_option("--grid", grid_points, "Two-point prior weight grid size");
  add_common(eq);

  auto* compose = app.add_subcommand(
      "compose", "Check the additive composition bound for two mechanisms");
  compose->add_option("--mechanism", mechanism_arg, "First mechanism")
      ->required();
  compose->add_option("--mechanism2", mechanism2_arg,
                      "Second mechanism (may be second-stage)")
      ->required();
  compose->add_option("--guarantee", guarantee_arg,
                      "Guarantee carrying scores, prior class, kappa1, delta1")
      ->required();
  compose->add_option("--kappa2", kappa2, "Second-stage kappa")->required();
  compose->add_option("--exp-kappa2", kappa2_exp, "Exact e^kappa2 as p/q");
  compose->add_option("--delta2", delta2, "Second-stage delta");
  add_common(compose);

  auto* post = app.add_subcommand(
      "postprocess",
      "Check invariance under a data-independent output kernel");
  post->add_option("--mechanism", mechanism_arg, "Mechanism JSON or path")
      ->required();
  post->add_option("--kernel", kernel_arg, "Post-processing kernel")
      ->required();
  post->add_option("--guarantee", guarantee_arg, "Guarantee JSON or path")
      ->required();
  add_common(post);

  auto* average = app.add_subcommand(
      "average",
      "Certify the noiseless average against a Gaussian prior class");
  average->add_option("--guarantee", guarantee_arg,
                      "Guarantee with a gaussian prior class")
      ->required();
  average->add_option("--seed", seed, "Sampler seed")->required();
  average->add_option("--samples", samples, "Samples from the class");
  average->add_option("--tolerance", tolerance,
                      "Slack below which samples count as near-boundary")
      ->check(CLI::PositiveNumber);
  add_common(average);

  auto* search = app.add_subcommand(
      "search-ce",
      "Search for a guarantee that chaining through a kernel breaks");
  search->add_option("--seed", seed, "Search seed")->required();
  search->add_option("--samples", budget, "Candidate budget");
  add_common(search);

  auto* suite = app.add_subcommand("suite", "Run the full property battery");
  suite->add_option("--seed", seed, "Battery seed")->required();
  suite->add_option("--samples", samples,
                    "Instances per battery (default 500/200)");
  add_common(suite);

  CLI11_PARSE(app, argc, argv);

  try {
    if (pp->parsed()) {
      const ppcert::AnyMechanism mech = ppcert::parse_any_mechanism(
          ppcert::load_json_argument(mechanism_arg));
      ppcert::GuaranteeSpec spec =
          ppcert::parse_guarantee(ppcert::load_json_argument(guarantee_arg));
      if (kappa >= 0.0 || !kappa_exp.empty()) {
        spec.kappa = threshold_from(kappa, kappa_exp);
      }
      if (delta_override >= 0.0) spec.delta = delta_override;
      if (auto* tp =
              std::get_if<ppcert::NeighborTwoPointClass>(&spec.prior_class)) {
        tp->w_grid.points = grid_points;
      }
      if (samples > 0) {
        if (auto* g =
                std::get_if<ppcert::GaussianPriorClass>(&spec.prior_class)) {
          g->samples = static_cast<int>(samples);
        }
      }
      const ppcert::CertificationReport report =
          ppcert::certify_pp(mech, spec, seed);
      emit(ppcert::to_json(report), "certify-pp", report.rows, output);
      return report.verdict ? kExitTrue : kExitFalse;
    }

    if (pdp->parsed()) {
      const ppcert::FiniteMechanism mech =
          ppcert::parse_mechanism(ppcert::load_json_argument(mechanism_arg));
      const ppcert::NeighborRelation neighbors =
          neighbors_arg.empty()
              ? ppcert::complete_neighbors(mech.universe())
              : ppcert::parse_neighbors(
                    ppcert::load_json_argument(neighbors_arg));
      const ppcert::PdpReport report = ppcert::certify_pdp(
          mech, neighbors, threshold_from(eps, eps_exp), delta);
      emit(ppcert::to_json(report), "certify-pdp", report.rows, output);
      return report.verdict ? kExitTrue : kExitFalse;
    }

    if (eq->parsed()) {
      const ppcert::FiniteMechanism mech =
          ppcert::parse_mechanism(ppcert::load_json_argument(mechanism_arg));
      const ppcert::NeighborRelation neighbors =
          neighbors_arg.empty()
              ? ppcert::complete_neighbors(mech.universe())
              : ppcert::parse_neighbors(
                    ppcert::load_json_argument(neighbors_arg));
      ppcert::WGridSpec grid;
      grid.points = grid_points;
      const ppcert::EquivalenceReport report = ppcert::check_pdp_pp_equivalence(
          mech, neighbors, threshold_from(eps, eps_exp), delta, grid);
      emit(ppcert::to_json(report), "equivalence", {}, output);
      return report.agree && report.grid_monotone ? kExitTrue : kExitFalse;
    }

    if (compose->parsed()) {
      const ppcert::FiniteMechanism m1 =
          ppcert::parse_mechanism(ppcert::load_json_argument(mechanism_arg));
      const ppcert::FiniteMechanism m2 =
          ppcert::parse_mechanism(ppcert::load_json_argument(mechanism2_arg));
      const ppcert::GuaranteeSpec spec =
          ppcert::parse_guarantee(ppcert::load_json_argument(guarantee_arg));
      const ppcert::CompositionReport report = ppcert::check_composition(
          m1, m2, spec.scores, spec.prior_class, spec.kappa, spec.delta,
          threshold_from(kappa2, kappa2_exp), delta2);
      emit(ppcert::to_json(report), "compose", {}, output);
      if (!report.conjugate) return kExitPrecondition;
      return report.bound_holds && report.composed_pass ? kExitTrue
                                                        : kExitFalse;
    }

    if (post->parsed()) {
      const ppcert::FiniteMechanism mech =
          ppcert::parse_mechanism(ppcert::load_json_argument(mechanism_arg));
      const ppcert::FiniteMechanism kernel =
          ppcert::parse_mechanism(ppcert::load_json_argument(kernel_arg));
      const ppcert::GuaranteeSpec spec =
          ppcert::parse_guarantee(ppcert::load_json_argument(guarantee_arg));
      const ppcert::RecPostReport report =
          ppcert::check_receiver_postprocessing(mech, kernel, spec);
      emit(ppcert::to_json(report), "postprocess", {}, output);
      return report.pass ? kExitTrue : kExitFalse;
    }

    if (average->parsed()) {
      const ppcert::GuaranteeSpec spec =
          ppcert::parse_guarantee(ppcert::load_json_argument(guarantee_arg));
      const auto* cls =
          std::get_if<ppcert::GaussianPriorClass>(&spec.prior_class);
      if (!cls) {
        throw ppcert::UnsupportedPriorClassError(
            "the average command needs a gaussian prior class");
      }
      const int count =
          samples > 0 ? static_cast<int>(samples) : cls->samples;
      const ppcert::AverageBoundReport bound_report =
          ppcert::certify_average_gaussian(cls->spec, count, seed,
                                           output.format == "csv");
      ppcert::GuaranteeSpec pp_spec = spec;
      std::get<ppcert::GaussianPriorClass>(pp_spec.prior_class).samples = count;
      const ppcert::CertificationReport pp_report = ppcert::certify_pp(
          ppcert::AnyMechanism(ppcert::AverageMechanism{}), pp_spec, seed);
      Json payload = ppcert::to_json(bound_report);
      payload["pp"] = ppcert::to_json(pp_report);
      std::int64_t near_boundary = 0;
      for (double s : bound_report.slacks) {
        if (s < tolerance) ++near_boundary;
      }
      payload["near_boundary_samples"] = near_boundary;
      emit(payload, "average", bound_report.rows, output);
      return pp_report.verdict && bound_report.pass ? kExitTrue : kExitFalse;
    }

    if (search->parsed()) {
      const auto witness = ppcert::search_sender_postprocessing_counterexample(
          ppcert::SearchBounds{}, seed, budget);
      if (witness) {
        emit(ppcert::to_json(*witness), "search-ce", {}, output);
        return kExitTrue;
      }
      emit(Json{{"found", false}, {"budget", budget}}, "search-ce", {},
           output);
      return kExitFalse;
    }

    if (suite->parsed()) {
      ppcert::SuiteConfig config;
      config.seed = seed;
      if (samples > 0) {
        config.instances = static_cast<int>(samples);
        config.pair_instances = static_cast<int>(std::max<std::int64_t>(
            1, samples * 2 / 5));
        config.gaussian_samples = static_cast<int>(samples * 4);
      }
      const ppcert::SuiteResult result = ppcert::run_suite(config);
      std::cout << ppcert::format_suite_table(result);
      if (!output.out_path.empty() || output.format == "csv") {
        Json checks = Json::array();
        for (const auto& check : result.checks) {
          checks.push_back(Json{{"name", check.name},
                                {"pass", check.pass},
                                {"instances", check.instances},
                                {"runtime_ms", check.runtime_ms},
                                {"worst", check.worst}});
        }
        emit(Json{{"all_pass", result.all_pass}, {"checks", checks}}, "suite",
             {}, output);
      }
      return result.all_pass ? kExitTrue : kExitFalse;
    }
  } catch (const ppcert::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ppcert::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
