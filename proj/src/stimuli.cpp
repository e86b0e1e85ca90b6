#include "eqsim/stimuli.hpp"

namespace eqsim::stimuli {

std::string label(StimulusId id) {
    if (id.index < 0 || id.index >= kTotalStimuli)
        throw std::out_of_range("stimulus index out of range: " + std::to_string(id.index));
    if (id.is_member()) {
        std::string s;
        s += static_cast<char>('A' + id.member());
        s += static_cast<char>('0' + id.class_index());
        return s;
    }
    return "Z_" + std::to_string(id.dummy_ordinal());
}

StimulusId parse_label(const std::string& text) {
    const auto fail = [&]() -> StimulusId {
        throw std::invalid_argument("malformed stimulus label: \"" + text + "\"");
    };
    if (text.size() == 2) {
        const char letter = text[0];
        const char digit = text[1];
        if (letter < 'A' || letter > 'F' || digit < '1' || digit > '4') return fail();
        return member_id(digit - '0', letter - 'A');
    }
    if (text.size() == 4 && text[0] == 'Z' && text[1] == '_') {
        if (text[2] < '0' || text[2] > '9' || text[3] < '0' || text[3] > '9') return fail();
        const int ordinal = (text[2] - '0') * 10 + (text[3] - '0');
        if (ordinal < 11 || ordinal > 34) return fail();
        return dummy_id(ordinal);
    }
    return fail();
}

std::vector<StimulusId> StimulusSet::all() const {
    std::vector<StimulusId> out;
    out.reserve(total());
    for (int i = 0; i < total(); ++i) out.push_back({i});
    return out;
}

std::vector<StimulusId> StimulusSet::members() const {
    std::vector<StimulusId> out;
    out.reserve(member_count());
    for (int i = 0; i < member_count(); ++i) out.push_back({i});
    return out;
}

std::vector<StimulusId> StimulusSet::dummies() const {
    std::vector<StimulusId> out;
    out.reserve(dummy_count);
    for (int i = member_count(); i < total(); ++i) out.push_back({i});
    return out;
}

StimulusSet build_stimulus_set() { return StimulusSet{}; }

}  // namespace eqsim::stimuli
