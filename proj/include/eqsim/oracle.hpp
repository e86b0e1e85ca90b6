#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "eqsim/conditions.hpp"
#include "eqsim/stimuli.hpp"
#include "eqsim/trials.hpp"

namespace eqsim::oracle {

// Analytical abstraction of the probabilistic agent's reward matrix:
// trained rejects (exactly 0) < untouched cells (0.5 noise band) < trained
// selects (exactly 1).
enum class PLevel { ZERO, TIE, ONE };

// Levels for every (member sample, comparison) cell of one condition.
// Dummy columns stay TIE; evaluation trials never present dummies.
struct PairLevels {
    std::array<PLevel, stimuli::kMemberCount * stimuli::kTotalStimuli> level;

    PairLevels() { level.fill(PLevel::TIE); }

    PLevel at(int sample_index, int comparison_index) const {
        return level[sample_index * stimuli::kTotalStimuli + comparison_index];
    }
    void set(int sample_index, int comparison_index, PLevel p);
};

// Derived analytically from the condition's baseline pairs and negative
// pools; throws on a select/reject conflict.
PairLevels classify_pairs(const Condition& condition);

struct ExpectedRates {
    double base = 0.0;
    double reflexivity = 0.0;
    double symmetry = 0.0;
    double transitivity = 0.0;

    double by_kind(trials::TestKind k) const {
        switch (k) {
            case trials::TestKind::baseline: return base;
            case trials::TestKind::reflexivity: return reflexivity;
            case trials::TestKind::symmetry: return symmetry;
            case trials::TestKind::transitivity: return transitivity;
        }
        return 0.0;
    }
};

// Exact expected correct-selection rates over the generated evaluation trial
// set: per trial 1 if the correct comparison's level strictly dominates,
// 1/k under a k-way tie at the top, else 0.
ExpectedRates expected_rates(const Condition& condition);

// Expected rates when only the baseline pairs of a single trained sample
// stimulus were trained; split by whether the evaluation trial's sample is
// that stimulus.
struct ProbeExpectation {
    double trained_sample_rate = 0.0;
    double other_sample_rate = 0.0;
};
ProbeExpectation expected_probe_rates(const Condition& condition,
                                      stimuli::StimulusId trained_sample);

// Per-seed replay: reconstructs the agent's post-training reward values
// (levels plus the exact initialization noise stream) and predicts every
// evaluation selection.
struct ExactRun {
    std::vector<int> selections;  // aligned with generate_eval_trials(ts)
    ExpectedRates rates;          // realized rates of this seed
};
ExactRun exact_run(const Condition& condition, std::uint64_t seed);

}  // namespace eqsim::oracle
