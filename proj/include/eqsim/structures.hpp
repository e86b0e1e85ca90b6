#pragma once

#include <array>
#include <string>
#include <vector>

#include "eqsim/conditions.hpp"
#include "eqsim/stimuli.hpp"

namespace eqsim::trials {
struct TrialSet;
}

namespace eqsim::structures {

// Member-level ordered pair (sample letter, comparison letter), 0..5 == A..F.
struct MemberPair {
    int sample = 0;
    int comparison = 0;

    friend bool operator==(MemberPair a, MemberPair b) {
        return a.sample == b.sample && a.comparison == b.comparison;
    }
};

// Per-structure pair sets at the member level. Instantiated per class by the
// trials module. Per class: 5 baseline, 6 reflexivity, 5 symmetry,
// 20 transitivity; the union covers all 36 ordered member pairs.
struct PairSet {
    std::vector<MemberPair> baseline;
    std::vector<MemberPair> reflexivity;
    std::vector<MemberPair> symmetry;
    std::vector<MemberPair> transitivity;
};

std::vector<MemberPair> baseline_pairs(TrainingStructure ts);
PairSet derive_test_pairs(TrainingStructure ts);

enum class RelationKind { none, select, reject };

// Trained-relation summary for one condition: 24 member-sample rows,
// 48 comparison columns (members then dummies).
struct RelationMatrix {
    std::array<RelationKind, stimuli::kMemberCount * stimuli::kTotalStimuli> cells{};

    RelationKind& at(int sample_index, int comparison_index) {
        return cells[sample_index * stimuli::kTotalStimuli + comparison_index];
    }
    RelationKind at(int sample_index, int comparison_index) const {
        return cells[sample_index * stimuli::kTotalStimuli + comparison_index];
    }

    int count(RelationKind kind) const;
};

// Summarizes a generated training TrialSet: select at reinforced cells,
// reject at non-reinforced ones. Throws on a select/reject conflict.
RelationMatrix relation_matrix(const Condition& condition,
                               const trials::TrialSet& training_trials);

// CSV: first column sample label, header row of 48 comparison labels,
// cells in {"", "S+", "S-"}.
std::string relation_matrix_csv(const RelationMatrix& m);

// Minimal heatmap mirroring the appendix figures: blue = select, red = reject.
std::string relation_matrix_svg(const RelationMatrix& m, const std::string& title);

}  // namespace eqsim::structures
