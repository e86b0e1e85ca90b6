#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eqsim/agents.hpp"
#include "eqsim/oracle.hpp"
#include "eqsim/runner.hpp"
#include "eqsim/stimuli.hpp"
#include "eqsim/structures.hpp"
#include "eqsim/trials.hpp"

namespace py = pybind11;
using namespace eqsim;

namespace {

py::dict rates_dict(double base, double refl, double symm, double trans) {
    py::dict d;
    d["base"] = base;
    d["reflexivity"] = refl;
    d["symmetry"] = symm;
    d["transitivity"] = trans;
    return d;
}

py::dict result_dict(const runner::RunResult& r) {
    py::dict d;
    d["simulation_id"] = r.simulation_id;
    d["condition"] = r.condition.name();
    d["agent"] = agents::to_string(r.agent);
    d["seed"] = r.seed;
    d["rates"] = rates_dict(r.rates.base, r.rates.reflexivity, r.rates.symmetry,
                            r.rates.transitivity);
    d["mastery"] = std::vector<bool>(r.mastery, r.mastery + 4);
    d["near_mastery"] = std::vector<bool>(r.near_mastery, r.near_mastery + 4);
    d["mastery_failed"] = r.mastery_failed;
    d["retries_used"] = r.retries_used;
    d["stop_reason"] = r.stop_reason;
    d["error"] = r.error;
    return d;
}

py::dict trial_dict(const trials::Trial& t) {
    py::dict d;
    d["sample"] = stimuli::label(t.sample);
    py::list comps;
    for (const auto& c : t.comparisons) comps.append(stimuli::label(c));
    d["comparisons"] = comps;
    d["correct_index"] = t.correct_index;
    d["phase"] = trials::to_string(t.phase);
    d["test_kind"] = trials::to_string(t.test_kind);
    return d;
}

}  // namespace

PYBIND11_MODULE(_eqsim, m) {
    m.doc() = "Matching-to-sample stimulus-equivalence simulation engine";

    m.def("condition_names", [] {
        std::vector<std::string> names;
        for (const auto& c : all_conditions()) names.push_back(c.name());
        return names;
    });

    m.def(
        "generate_training_trials",
        [](const std::string& condition, std::uint64_t seed, const std::string& scheme) {
            const auto set = trials::generate_training_trials(
                parse_condition(condition), trials::parse_scheme(scheme), seed);
            py::list out;
            for (const auto& t : set.trials) out.append(trial_dict(t));
            return out;
        },
        py::arg("condition"), py::arg("seed") = 1, py::arg("scheme") = "rotations");

    m.def(
        "generate_eval_trials",
        [](const std::string& condition) {
            const auto set = trials::generate_eval_trials(parse_condition(condition).ts);
            py::list out;
            for (const auto& t : set.trials) out.append(trial_dict(t));
            return out;
        },
        py::arg("condition"));

    m.def(
        "expected_rates",
        [](const std::string& condition) {
            const auto r = oracle::expected_rates(parse_condition(condition));
            return rates_dict(r.base, r.reflexivity, r.symmetry, r.transitivity);
        },
        py::arg("condition"));

    m.def(
        "relation_matrix_csv",
        [](const std::string& condition, std::uint64_t seed) {
            const auto cond = parse_condition(condition);
            const auto set = trials::generate_training_trials(
                cond, trials::PositionScheme::rotations(), seed);
            return structures::relation_matrix_csv(structures::relation_matrix(cond, set));
        },
        py::arg("condition"), py::arg("seed") = 1);

    m.def(
        "run_cell",
        [](const std::string& condition, const std::string& agent, std::uint64_t seed,
           const std::string& profile) {
            runner::ExperimentConfig cfg;
            cfg.profile = profile;
            return result_dict(runner::run_cell(parse_condition(condition),
                                                agents::parse_agent(agent), cfg, seed));
        },
        py::arg("condition"), py::arg("agent"), py::arg("seed") = 1,
        py::arg("profile") = "desk");

    m.def("simulation_id", [](const std::string& condition, const std::string& agent) {
        return runner::simulation_id(parse_condition(condition), agents::parse_agent(agent));
    });
}
