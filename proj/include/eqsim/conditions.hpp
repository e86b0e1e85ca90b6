#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eqsim {

enum class TrainingStructure { LS, OTM, MTO };
enum class RelationType { select_reject, select_only, reject_only };
enum class NegativePolicy { standard, biased };

inline const char* to_string(TrainingStructure ts) {
    switch (ts) {
        case TrainingStructure::LS: return "LS";
        case TrainingStructure::OTM: return "OTM";
        case TrainingStructure::MTO: return "MTO";
    }
    throw std::logic_error("bad TrainingStructure");
}

inline const char* to_string(RelationType rt) {
    switch (rt) {
        case RelationType::select_reject: return "select-reject";
        case RelationType::select_only: return "select-only";
        case RelationType::reject_only: return "reject-only";
    }
    throw std::logic_error("bad RelationType");
}

inline const char* to_string(NegativePolicy ncs) {
    return ncs == NegativePolicy::standard ? "standard" : "biased";
}

// One of the 18 experimental conditions: training structure x relation type
// x negative-comparison policy.
struct Condition {
    TrainingStructure ts = TrainingStructure::LS;
    RelationType relation_type = RelationType::select_reject;
    NegativePolicy ncs = NegativePolicy::standard;

    // Canonical short name: "LS", "LS-biased", "LS-select", "LS-select-biased",
    // "LS-reject", "LS-reject-biased", likewise for OTM and MTO.
    std::string name() const {
        std::string n = to_string(ts);
        if (relation_type == RelationType::select_only) n += "-select";
        else if (relation_type == RelationType::reject_only) n += "-reject";
        if (ncs == NegativePolicy::biased) n += "-biased";
        return n;
    }

    friend bool operator==(const Condition& a, const Condition& b) {
        return a.ts == b.ts && a.relation_type == b.relation_type && a.ncs == b.ncs;
    }
};

// All 18 conditions in report order: TS (LS, MTO, OTM), then relation type
// (select-reject, select-only, reject-only), then policy (standard, biased).
std::vector<Condition> all_conditions();

Condition parse_condition(const std::string& name);

}  // namespace eqsim
