#include "eqsim/trials.hpp"

#include <algorithm>
#include <sstream>

#include "eqsim/numerics.hpp"
#include "eqsim/structures.hpp"

namespace eqsim::trials {

using stimuli::StimulusId;

std::string PositionScheme::name() const {
    switch (kind) {
        case Kind::rotations: return "rotations";
        case Kind::permutations: return "permutations";
        case Kind::random: return "random:" + std::to_string(random_count);
    }
    return "?";
}

PositionScheme parse_scheme(const std::string& name) {
    if (name == "rotations") return PositionScheme::rotations();
    if (name == "permutations") return PositionScheme::permutations();
    if (name.rfind("random:", 0) == 0) {
        const int k = std::stoi(name.substr(7));
        if (k < 1) throw std::invalid_argument("random scheme needs k >= 1");
        return PositionScheme::random(k);
    }
    throw std::invalid_argument("unknown position scheme: \"" + name + "\"");
}

std::vector<StimulusId> negative_pool(StimulusId sample, StimulusId positive,
                                      NegativePolicy ncs) {
    (void)sample;
    std::vector<StimulusId> pool;
    for (int cls = 1; cls <= stimuli::kClassCount; ++cls) {
        if (cls == positive.class_index()) continue;
        if (ncs == NegativePolicy::standard) {
            pool.push_back(stimuli::member_id(cls, positive.member()));
        } else {
            for (int mem = 0; mem < stimuli::kMembersPerClass; ++mem)
                pool.push_back(stimuli::member_id(cls, mem));
        }
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {

struct InstantiatedPair {
    StimulusId sample;
    StimulusId positive;
};

std::vector<InstantiatedPair> instantiate(const std::vector<structures::MemberPair>& pairs) {
    std::vector<InstantiatedPair> out;
    for (const auto& p : pairs)
        for (int cls = 1; cls <= stimuli::kClassCount; ++cls)
            out.push_back({stimuli::member_id(cls, p.sample), stimuli::member_id(cls, p.comparison)});
    return out;
}

// Arrangements of (reinforced, neg1, neg2) over the three positions.
// Each entry maps position -> role, role 0 = reinforced.
std::vector<std::array<int, 3>> arrangements(const PositionScheme& scheme,
                                             numerics::Prng* rng) {
    switch (scheme.kind) {
        case PositionScheme::Kind::rotations:
            return {{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
        case PositionScheme::Kind::permutations:
            return {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        case PositionScheme::Kind::random: {
            std::vector<std::array<int, 3>> out;
            for (int i = 0; i < scheme.random_count; ++i) {
                std::vector<int> roles = {0, 1, 2};
                rng->shuffle(roles);
                out.push_back({roles[0], roles[1], roles[2]});
            }
            return out;
        }
    }
    throw std::logic_error("bad scheme");
}

Trial make_trial(StimulusId sample, StimulusId reinforced, StimulusId n1, StimulusId n2,
                 const std::array<int, 3>& arrangement, Phase phase, TestKind kind) {
    const StimulusId roles[3] = {reinforced, n1, n2};
    Trial t;
    t.sample = sample;
    for (int pos = 0; pos < 3; ++pos) {
        t.comparisons[pos] = roles[arrangement[pos]];
        if (arrangement[pos] == 0) t.correct_index = pos;
    }
    t.phase = phase;
    t.test_kind = kind;
    return t;
}

}  // namespace

TrialSet generate_training_trials(const Condition& condition, const PositionScheme& scheme,
                                  std::uint64_t seed) {
    numerics::Prng root(seed);
    auto stream = root.substream("train-trials/" + condition.name() + "/" + scheme.name());

    TrialSet set;
    set.condition = condition;
    set.seed = seed;

    const auto pairs = instantiate(structures::baseline_pairs(condition.ts));
    for (const auto& pair : pairs) {
        const auto pool = negative_pool(pair.sample, pair.positive, condition.ncs);
        if (pool.size() < 2)
            throw std::runtime_error("negative pool smaller than 2 for pair " +
                                     stimuli::label(pair.sample) + "-" +
                                     stimuli::label(pair.positive));
        for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                for (const auto& arr : arrangements(scheme, &stream)) {
                    StimulusId reinforced = pair.positive;
                    StimulusId n1 = pool[i];
                    StimulusId n2 = pool[j];
                    if (condition.relation_type == RelationType::select_only) {
                        const auto picks = stream.choice_without_replacement(stimuli::kDummyCount, 2);
                        n1 = stimuli::dummy_id(11 + picks[0]);
                        n2 = stimuli::dummy_id(11 + picks[1]);
                    } else if (condition.relation_type == RelationType::reject_only) {
                        reinforced = stimuli::dummy_id(11 + static_cast<int>(stream.below(stimuli::kDummyCount)));
                    }
                    set.trials.push_back(make_trial(pair.sample, reinforced, n1, n2, arr,
                                                    Phase::train, TestKind::baseline));
                }
            }
        }
    }
    return set;
}

TrialSet generate_eval_trials(TrainingStructure ts) {
    TrialSet set;
    set.condition = Condition{ts, RelationType::select_reject, NegativePolicy::standard};
    set.seed = 0;

    const auto test_pairs = structures::derive_test_pairs(ts);
    const auto emit = [&](const std::vector<structures::MemberPair>& pairs, TestKind kind) {
        for (const auto& pair : instantiate(pairs)) {
            const auto pool = negative_pool(pair.sample, pair.positive, NegativePolicy::standard);
            for (std::size_t i = 0; i + 1 < pool.size(); ++i)
                for (std::size_t j = i + 1; j < pool.size(); ++j)
                    for (const auto& arr : arrangements(PositionScheme::rotations(), nullptr))
                        set.trials.push_back(make_trial(pair.sample, pair.positive, pool[i],
                                                        pool[j], arr, Phase::eval, kind));
        }
    };
    emit(test_pairs.baseline, TestKind::baseline);
    emit(test_pairs.reflexivity, TestKind::reflexivity);
    emit(test_pairs.symmetry, TestKind::symmetry);
    emit(test_pairs.transitivity, TestKind::transitivity);
    return set;
}

std::vector<double> encode_onehot(const Trial& trial, const stimuli::StimulusSet& set) {
    const int n = set.total();
    std::vector<double> v(static_cast<std::size_t>(4) * n, 0.0);
    v[trial.sample.index] = 1.0;
    for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i + 1) * n + trial.comparisons[i].index] = 1.0;
    return v;
}

std::array<int, 5> encode_tokens(const Trial& trial) {
    return {trial.sample.index, trial.comparisons[0].index, trial.comparisons[1].index,
            trial.comparisons[2].index, kResponseTokenBase + trial.correct_index};
}

std::string to_jsonl(const TrialSet& set) {
    std::ostringstream out;
    for (const auto& t : set.trials) {
        out << "{\"sample\":\"" << stimuli::label(t.sample) << "\",\"comparisons\":[\""
            << stimuli::label(t.comparisons[0]) << "\",\"" << stimuli::label(t.comparisons[1])
            << "\",\"" << stimuli::label(t.comparisons[2]) << "\"],\"correct_index\":"
            << t.correct_index << ",\"phase\":\"" << to_string(t.phase)
            << "\",\"test_kind\":\"" << to_string(t.test_kind) << "\"}\n";
    }
    return out.str();
}

}  // namespace eqsim::trials
