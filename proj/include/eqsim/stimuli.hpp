#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqsim::stimuli {

// 24 class members (4 classes x 6 members, class-major: A1,B1,...,F1,A2,...,F4)
// followed by 24 dummy stimuli Z_11..Z_34.
inline constexpr int kMembersPerClass = 6;  // letters A..F
inline constexpr int kClassCount = 4;       // classes 1..4
inline constexpr int kMemberCount = kMembersPerClass * kClassCount;
inline constexpr int kDummyCount = kMemberCount;
inline constexpr int kTotalStimuli = kMemberCount + kDummyCount;

struct StimulusId {
    int index = 0;  // 0..47

    bool is_member() const { return index < kMemberCount; }
    bool is_dummy() const { return index >= kMemberCount; }

    // class members only
    int class_index() const { return index / kMembersPerClass + 1; }   // 1..4
    int member() const { return index % kMembersPerClass; }            // 0..5 == A..F

    // dummies only
    int dummy_ordinal() const { return index - kMemberCount + 11; }    // 11..34

    friend bool operator==(StimulusId a, StimulusId b) { return a.index == b.index; }
    friend bool operator!=(StimulusId a, StimulusId b) { return a.index != b.index; }
    friend bool operator<(StimulusId a, StimulusId b) { return a.index < b.index; }
};

inline StimulusId member_id(int class_index, int member) {
    return {(class_index - 1) * kMembersPerClass + member};
}

inline StimulusId dummy_id(int ordinal) {
    return {kMemberCount + ordinal - 11};
}

std::string label(StimulusId id);
StimulusId parse_label(const std::string& text);

struct StimulusSet {
    int members_per_class = kMembersPerClass;
    int class_count = kClassCount;
    int dummy_count = kDummyCount;

    int member_count() const { return members_per_class * class_count; }
    int total() const { return member_count() + dummy_count; }

    std::vector<StimulusId> all() const;
    std::vector<StimulusId> members() const;
    std::vector<StimulusId> dummies() const;
};

StimulusSet build_stimulus_set();

}  // namespace eqsim::stimuli
