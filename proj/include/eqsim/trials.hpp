#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eqsim/conditions.hpp"
#include "eqsim/stimuli.hpp"

namespace eqsim::trials {

enum class Phase { train, eval };
enum class TestKind { baseline, reflexivity, symmetry, transitivity };

inline const char* to_string(Phase p) { return p == Phase::train ? "train" : "eval"; }

inline const char* to_string(TestKind k) {
    switch (k) {
        case TestKind::baseline: return "baseline";
        case TestKind::reflexivity: return "reflexivity";
        case TestKind::symmetry: return "symmetry";
        case TestKind::transitivity: return "transitivity";
    }
    return "?";
}

struct Trial {
    stimuli::StimulusId sample;
    std::array<stimuli::StimulusId, 3> comparisons;
    int correct_index = 0;
    Phase phase = Phase::train;
    TestKind test_kind = TestKind::baseline;

    stimuli::StimulusId reinforced() const { return comparisons[correct_index]; }
};

struct TrialSet {
    Condition condition;
    std::vector<Trial> trials;
    std::uint64_t seed = 0;
};

// How the reinforced comparison and the two negatives are distributed over
// the three screen positions for each (pair, negative-subset) combination.
struct PositionScheme {
    enum class Kind { rotations, permutations, random } kind = Kind::rotations;
    int random_count = 3;  // used by Kind::random only

    static PositionScheme rotations() { return {Kind::rotations, 3}; }
    static PositionScheme permutations() { return {Kind::permutations, 6}; }
    static PositionScheme random(int k) { return {Kind::random, k}; }

    std::string name() const;
};

PositionScheme parse_scheme(const std::string& name);

// Negative comparisons for one instantiated baseline pair.
// standard: the C-1 same-member-label stimuli from other classes.
// biased: all M*(C-1) members of other classes.
std::vector<stimuli::StimulusId> negative_pool(stimuli::StimulusId sample,
                                               stimuli::StimulusId positive,
                                               NegativePolicy ncs);

// Training trials: per instantiated baseline pair, all 2-subsets of the
// negative pool, expanded by the position scheme. select-only replaces both
// negatives with seeded dummies, reject-only replaces the positive with a
// seeded dummy; correct_index always marks the reinforced comparison.
TrialSet generate_training_trials(const Condition& condition, const PositionScheme& scheme,
                                  std::uint64_t seed);

// Evaluation trials: for every pair of every test kind (baseline re-test
// included), negatives from the standard pool of the positive, all 2-subsets
// x 3 rotations. Identical across relation types and policies of one ts.
TrialSet generate_eval_trials(TrainingStructure ts);

// Concatenated one-hot blocks [sample, comp0, comp1, comp2], length 4*48.
std::vector<double> encode_onehot(const Trial& trial, const stimuli::StimulusSet& set);

inline constexpr int kResponseTokenBase = stimuli::kTotalStimuli;  // O_1..O_3
inline constexpr int kVocabSize = stimuli::kTotalStimuli + 3;

// [sample, comp0, comp1, comp2, O_(correct+1)]; evaluation prompts are the
// first four tokens.
std::array<int, 5> encode_tokens(const Trial& trial);

// JSONL, one object per trial: sample, comparisons (labels), correct_index,
// phase, test_kind.
std::string to_jsonl(const TrialSet& set);

}  // namespace eqsim::trials
