#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqsim/agents.hpp"
#include "eqsim/conditions.hpp"
#include "eqsim/trials.hpp"

namespace eqsim::runner {

struct ExperimentConfig {
    std::vector<Condition> conditions;       // empty = all 18
    std::vector<agents::AgentKind> agents;   // empty = all four
    std::vector<std::uint64_t> seeds = {1};
    double mastery_threshold = 0.90;
    double near_mastery_threshold = 0.70;
    int max_mastery_retries = 3;
    std::string profile = "desk";            // "desk" | "paper"
    trials::PositionScheme scheme = trials::PositionScheme::rotations();
    std::string out_dir = ".";
    bool decimal_comma = false;
    int threads = 1;

    void validate() const;
};

struct TestRates {
    double base = 0.0;
    double reflexivity = 0.0;
    double symmetry = 0.0;
    double transitivity = 0.0;
};

struct RunResult {
    int simulation_id = 0;  // 1..72, appendix table row order
    Condition condition;
    agents::AgentKind agent = agents::AgentKind::probabilistic;
    std::uint64_t seed = 0;
    TestRates rates;
    bool mastery[4] = {false, false, false, false};       // base, refl, symm, trans
    bool near_mastery[4] = {false, false, false, false};
    bool mastery_failed = false;  // baseline gate never reached after retries
    int retries_used = 0;
    std::string stop_reason;
    std::string error;  // nonempty when the cell aborted
    double wall_time_s = 0.0;
};

// Appendix row order: TS (LS, MTO, OTM), relation type (select-reject,
// select-only, reject-only), policy (standard, biased), agent
// (bert, ffn, gpt, probabilistic).
int simulation_id(const Condition& condition, agents::AgentKind agent);

RunResult run_cell(const Condition& condition, agents::AgentKind agent,
                   const ExperimentConfig& config, std::uint64_t seed);

std::vector<RunResult> run_full_matrix(const ExperimentConfig& config);

// Sequential single-sample probe: for each training sample stimulus in turn,
// train a fresh agent on only that sample's trials and evaluate everything.
struct ProbeResult {
    stimuli::StimulusId trained_sample;
    double trained_sample_rate = 0.0;  // correct rate on trials with that sample
    double other_sample_rate = 0.0;
    int trained_sample_trials = 0;
    int other_sample_trials = 0;
};
std::vector<ProbeResult> sequential_probe(const Condition& condition, agents::AgentKind agent,
                                          const ExperimentConfig& config, std::uint64_t seed);

std::string results_csv(const std::vector<RunResult>& results, bool decimal_comma = false);
std::string results_json(const std::vector<RunResult>& results);
std::vector<RunResult> parse_results_json(const std::string& json_text);

void write_results(const std::vector<RunResult>& results, const std::string& format,
                   const std::string& path, bool decimal_comma = false);

void export_relation_csv(const Condition& condition, const std::string& path,
                         std::uint64_t seed = 1, const std::string& svg_path = "");

ExperimentConfig load_config(const std::string& path);  // .toml or .json

}  // namespace eqsim::runner
