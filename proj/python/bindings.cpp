// Python surface for the simulator: learner updates and the normalizer
// solver, certificate and bound arithmetic, and the config-driven experiment
// runner. Vectors cross the boundary as plain lists of floats; learner kinds
// and payoff modes as the same strings the JSON configs use.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lar/config.hpp"
#include "lar/core.hpp"
#include "lar/experiment.hpp"
#include "lar/learners.hpp"
#include "lar/metrics.hpp"

namespace py = pybind11;
using namespace lar;

namespace {

LearnerKind kind_from(const std::string& s) {
  if (s == "hedge") return LearnerKind::Hedge;
  if (s == "tuned_hedge") return LearnerKind::TunedHedge;
  if (s == "optimistic_hedge") return LearnerKind::OptimisticHedge;
  if (s == "noisy_hedge") return LearnerKind::NoisyHedge;
  if (s == "log_barrier_bandit") return LearnerKind::LogBarrierBandit;
  throw ConfigError("unknown learner kind: " + s);
}

PayoffMode mode_from(const std::string& s) {
  if (s == "cost") return PayoffMode::Cost;
  if (s == "utility") return PayoffMode::Utility;
  throw ConfigError("unknown payoff mode: " + s);
}

std::vector<CostVector> history_from(const std::vector<std::vector<double>>& rows) {
  std::vector<CostVector> history;
  history.reserve(rows.size());
  for (const auto& row : rows) history.emplace_back(row);
  return history;
}

py::dict result_dict(const ExperimentResult& result) {
  py::dict out;
  out["exit_code"] = result.exit_code;
  out["report"] = result.report.dump(2);
  out["summary"] = result.summary;
  py::list checks;
  for (const CheckResult& c : result.checks) {
    py::dict jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["detail"] = c.detail;
    checks.append(jc);
  }
  out["checks"] = checks;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "low-approximate-regret learning dynamics simulator";
  m.attr("__version__") = "0.1.0";

  // ----------------------------------------------------------- core math --
  m.def(
      "normalize",
      [](const std::vector<double>& w) { return normalize(w).weights(); },
      py::arg("weights"));
  m.def(
      "mix_with_uniform",
      [](const std::vector<double>& w, double theta) {
        return mix_with_uniform(ActionDistribution(w), theta).weights();
      },
      py::arg("weights"), py::arg("theta"));
  m.def(
      "expected_value",
      [](const std::vector<double>& w, const std::vector<double>& c) {
        return expected_value(ActionDistribution(w), c);
      },
      py::arg("weights"), py::arg("costs"));

  // ----------------------------------------------------- learner updates --
  m.def(
      "hedge_update",
      [](const std::vector<double>& w, const std::vector<double>& c, double eta) {
        return hedge_update(ActionDistribution(w), c, eta).weights();
      },
      py::arg("weights"), py::arg("costs"), py::arg("eta"));
  m.def(
      "optimistic_hedge_update",
      [](const std::vector<double>& g, const std::vector<double>& c, double eta) {
        auto [gn, wn] = optimistic_hedge_update(ActionDistribution(g), c, eta);
        return py::make_tuple(gn.weights(), wn.weights());
      },
      py::arg("aux"), py::arg("costs"), py::arg("eta"));
  m.def(
      "noisy_hedge_update",
      [](const std::vector<double>& w, const std::vector<double>& c, double eta,
         double theta) {
        auto [gn, wn] = noisy_hedge_update(ActionDistribution(w), c, eta, theta);
        return py::make_tuple(gn.weights(), wn.weights());
      },
      py::arg("weights"), py::arg("costs"), py::arg("eta"), py::arg("theta"));
  m.def(
      "importance_weighted_estimate",
      [](int played, double observed, const std::vector<double>& w) {
        return importance_weighted_estimate(played, observed, ActionDistribution(w));
      },
      py::arg("played"), py::arg("observed"), py::arg("weights"));
  m.def(
      "solve_normalizer_gamma",
      [](const std::vector<double>& w, int played, double tilt) {
        return solve_normalizer_gamma(ActionDistribution(w), played, tilt);
      },
      py::arg("weights"), py::arg("played"), py::arg("tilt"));
  m.def(
      "log_barrier_step",
      [](const std::vector<double>& w, int played, double tilt) {
        return log_barrier_step(ActionDistribution(w), played, tilt).weights();
      },
      py::arg("weights"), py::arg("played"), py::arg("tilt"));

  py::class_<Learner>(m, "Learner")
      .def(py::init([](const std::string& kind, int d, double eta, double theta,
                       const std::string& mode, int horizon_t) {
             LearnerConfig lc;
             lc.kind = kind_from(kind);
             lc.d = d;
             lc.eta = eta;
             lc.theta = theta;
             lc.mode = mode_from(mode);
             lc.horizon_t = horizon_t;
             return Learner(lc);
           }),
           py::arg("kind"), py::arg("d"), py::arg("eta") = 0.0, py::arg("theta") = -1.0,
           py::arg("mode") = "cost", py::arg("horizon_t") = 0)
      .def("distribution", [](const Learner& l) { return l.distribution().weights(); })
      .def("auxiliary", [](const Learner& l) { return l.auxiliary().weights(); })
      .def("observe_full",
           [](Learner& l, const std::vector<double>& payoffs) {
             l.observe(Feedback{FullFeedback{CostVector(payoffs)}});
           },
           py::arg("payoffs"))
      .def("observe_bandit",
           [](Learner& l, int played, double observed) {
             l.observe(Feedback{BanditFeedback{played, observed}});
           },
           py::arg("played"), py::arg("observed"))
      .def("reset", &Learner::reset)
      .def_property_readonly("round", &Learner::round)
      .def_property_readonly("doubling_epoch", &Learner::doubling_epoch);

  // -------------------------------------------------- certificate algebra --
  m.def("lar_residual", &lar_residual, py::arg("learner_total"),
        py::arg("comparator_total"), py::arg("epsilon"), py::arg("a_budget"),
        py::arg("shift_k") = 0.0);
  m.def("lar_residual_utility", &lar_residual_utility, py::arg("learner_total"),
        py::arg("comparator_total"), py::arg("epsilon"), py::arg("a_budget"),
        py::arg("shift_k") = 0.0);
  m.def(
      "best_fixed_comparator",
      [](const std::vector<std::vector<double>>& history) {
        const FixedComparator c = best_fixed_comparator(history_from(history));
        return py::make_tuple(c.action, c.total);
      },
      py::arg("history"));
  m.def(
      "best_shifting_comparator",
      [](const std::vector<std::vector<double>>& history, int max_shifts) {
        const ShiftingComparator c =
            best_shifting_comparator(history_from(history), max_shifts);
        return py::make_tuple(c.actions, c.total);
      },
      py::arg("history"), py::arg("max_shifts"));
  m.def(
      "budget_for",
      [](const std::string& kind, const std::string& mode, int d, long long horizon_t,
         double epsilon) {
        return budget_for(kind_from(kind), mode_from(mode), d, horizon_t, epsilon);
      },
      py::arg("kind"), py::arg("mode"), py::arg("d"), py::arg("horizon_t"),
      py::arg("epsilon"));

  // ------------------------------------------------------ bound formulas --
  m.def(
      "poa_bound_cost",
      [](double lambda, double mu, double epsilon) {
        return poa_bound_cost({lambda, mu, epsilon});
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("epsilon") = 0.0);
  m.def(
      "welfare_fraction",
      [](double lambda, double mu, double epsilon) {
        return welfare_fraction({lambda, mu, epsilon});
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("epsilon") = 0.0);
  m.def(
      "poa_bound_utility",
      [](double lambda, double mu, double epsilon) {
        return poa_bound_utility({lambda, mu, epsilon});
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("epsilon") = 0.0);
  m.def("hp_gamma_from_epsilon", &hp_gamma_from_epsilon, py::arg("epsilon"));
  m.def("epsilon_from_hp_gamma", &epsilon_from_hp_gamma, py::arg("gamma"));
  m.def(
      "turnover_threshold",
      [](double epsilon, double min_cost_gamma, double kappa, int d, long long horizon_t,
         const std::string& variant) {
        if (variant != "ours" && variant != "prior") {
          throw ConfigError("turnover variant must be 'ours' or 'prior'");
        }
        return turnover_threshold(
            epsilon, min_cost_gamma, kappa, d, horizon_t,
            variant == "ours" ? TurnoverVariant::Ours : TurnoverVariant::Prior);
      },
      py::arg("epsilon"), py::arg("min_cost_gamma"), py::arg("kappa"), py::arg("d"),
      py::arg("horizon_t"), py::arg("variant") = "ours");
  m.def("empirical_quantile", &empirical_quantile, py::arg("values"), py::arg("q"));

  // --------------------------------------------------- experiment runner --
  m.def(
      "config_hash",
      [](const std::string& text) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(parse_config_text(text).config_hash));
        return std::string(buf);
      },
      py::arg("text"), "canonical 16-hex hash of a config given as JSON text");
  m.def(
      "run_experiment_text",
      [](const std::string& text, std::optional<std::string> out_dir) {
        OutputOptions out;
        out.out_dir = std::move(out_dir);
        return result_dict(run_experiment(parse_config_text(text), out));
      },
      py::arg("text"), py::arg("out_dir") = std::nullopt,
      "run a config given as JSON text; returns exit_code, checks, report, summary");
  m.def(
      "run_experiment_file",
      [](const std::string& path, std::optional<std::string> out_dir) {
        OutputOptions out;
        out.out_dir = std::move(out_dir);
        return result_dict(run_experiment(parse_config(path), out));
      },
      py::arg("path"), py::arg("out_dir") = std::nullopt);

  // exceptions surface as ValueError except for missing files
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
}
