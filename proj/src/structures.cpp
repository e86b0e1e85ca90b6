#include "eqsim/structures.hpp"

#include <sstream>

#include "eqsim/trials.hpp"

namespace eqsim::structures {

std::vector<MemberPair> baseline_pairs(TrainingStructure ts) {
    std::vector<MemberPair> out;
    const int m = stimuli::kMembersPerClass;
    switch (ts) {
        case TrainingStructure::LS:
            for (int i = 0; i + 1 < m; ++i) out.push_back({i, i + 1});  // AB,BC,CD,DE,EF
            break;
        case TrainingStructure::OTM:
            for (int i = 1; i < m; ++i) out.push_back({0, i});  // AB,AC,AD,AE,AF
            break;
        case TrainingStructure::MTO:
            for (int i = 1; i < m; ++i) out.push_back({i, 0});  // BA,CA,DA,EA,FA
            break;
    }
    return out;
}

PairSet derive_test_pairs(TrainingStructure ts) {
    PairSet set;
    set.baseline = baseline_pairs(ts);
    const int m = stimuli::kMembersPerClass;
    for (int i = 0; i < m; ++i) set.reflexivity.push_back({i, i});
    for (const auto& p : set.baseline) set.symmetry.push_back({p.comparison, p.sample});
    const auto trained = [&](int s, int c) {
        for (const auto& p : set.baseline)
            if ((p.sample == s && p.comparison == c) || (p.sample == c && p.comparison == s))
                return true;
        return false;
    };
    for (int s = 0; s < m; ++s)
        for (int c = 0; c < m; ++c)
            if (s != c && !trained(s, c)) set.transitivity.push_back({s, c});
    return set;
}

int RelationMatrix::count(RelationKind kind) const {
    int n = 0;
    for (auto c : cells) n += (c == kind);
    return n;
}

RelationMatrix relation_matrix(const Condition& condition,
                               const trials::TrialSet& training_trials) {
    if (!(training_trials.condition == condition))
        throw std::invalid_argument("relation_matrix: trial set belongs to condition " +
                                    training_trials.condition.name() + ", not " +
                                    condition.name());
    RelationMatrix m;
    const auto mark = [&](int sample, int comparison, RelationKind kind) {
        auto& cell = m.at(sample, comparison);
        if (cell != RelationKind::none && cell != kind)
            throw std::runtime_error("relation_matrix: pair (" +
                                     stimuli::label({sample}) + ", " +
                                     stimuli::label({comparison}) +
                                     ") is both reinforced and non-reinforced");
        cell = kind;
    };
    for (const auto& t : training_trials.trials) {
        if (t.phase != trials::Phase::train) continue;
        if (!t.sample.is_member())
            throw std::runtime_error("relation_matrix: dummy used as sample");
        for (int i = 0; i < 3; ++i)
            mark(t.sample.index, t.comparisons[i].index,
                 i == t.correct_index ? RelationKind::select : RelationKind::reject);
    }
    return m;
}

std::string relation_matrix_csv(const RelationMatrix& m) {
    std::ostringstream out;
    out << "sample";
    for (int c = 0; c < stimuli::kTotalStimuli; ++c) out << ',' << stimuli::label({c});
    out << '\n';
    for (int r = 0; r < stimuli::kMemberCount; ++r) {
        out << stimuli::label({r});
        for (int c = 0; c < stimuli::kTotalStimuli; ++c) {
            out << ',';
            switch (m.at(r, c)) {
                case RelationKind::select: out << "S+"; break;
                case RelationKind::reject: out << "S-"; break;
                case RelationKind::none: break;
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string relation_matrix_svg(const RelationMatrix& m, const std::string& title) {
    const int cell = 14, left = 44, top = 36;
    const int w = left + stimuli::kTotalStimuli * cell + 8;
    const int h = top + stimuli::kMemberCount * cell + 8;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"8\">\n";
    out << "<text x=\"" << left << "\" y=\"12\" font-size=\"12\">" << title << "</text>\n";
    for (int c = 0; c < stimuli::kTotalStimuli; ++c)
        out << "<text x=\"" << left + c * cell + 2 << "\" y=\"" << top - 4
            << "\" transform=\"rotate(-60 " << left + c * cell + 2 << ' ' << top - 4 << ")\">"
            << stimuli::label({c}) << "</text>\n";
    for (int r = 0; r < stimuli::kMemberCount; ++r) {
        out << "<text x=\"4\" y=\"" << top + r * cell + 10 << "\">" << stimuli::label({r})
            << "</text>\n";
        for (int c = 0; c < stimuli::kTotalStimuli; ++c) {
            const char* fill = "#f2f2f2";
            if (m.at(r, c) == RelationKind::select) fill = "#2c5fd6";
            else if (m.at(r, c) == RelationKind::reject) fill = "#d63a2c";
            out << "<rect x=\"" << left + c * cell << "\" y=\"" << top + r * cell
                << "\" width=\"" << cell - 1 << "\" height=\"" << cell - 1 << "\" fill=\""
                << fill << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace eqsim::structures
