#include "eqsim/conditions.hpp"

#include <algorithm>
#include <cctype>

namespace eqsim {

std::vector<Condition> all_conditions() {
    std::vector<Condition> out;
    const TrainingStructure structs[] = {TrainingStructure::LS, TrainingStructure::MTO,
                                         TrainingStructure::OTM};
    const RelationType rels[] = {RelationType::select_reject, RelationType::select_only,
                                 RelationType::reject_only};
    const NegativePolicy policies[] = {NegativePolicy::standard, NegativePolicy::biased};
    for (auto ts : structs)
        for (auto rt : rels)
            for (auto ncs : policies) out.push_back({ts, rt, ncs});
    return out;
}

Condition parse_condition(const std::string& name) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c == ' ' || c == '_' ? '-' : c); });
    for (const auto& c : all_conditions()) {
        std::string cn = c.name();
        std::transform(cn.begin(), cn.end(), cn.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        if (cn == key) return c;
    }
    throw std::invalid_argument("unknown condition: \"" + name + "\"");
}

}  // namespace eqsim
