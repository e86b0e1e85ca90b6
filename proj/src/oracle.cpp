#include "eqsim/oracle.hpp"

#include <stdexcept>

#include "eqsim/agents.hpp"
#include "eqsim/numerics.hpp"
#include "eqsim/structures.hpp"

namespace eqsim::oracle {

using stimuli::StimulusId;

void PairLevels::set(int sample_index, int comparison_index, PLevel p) {
    auto& cell = level[sample_index * stimuli::kTotalStimuli + comparison_index];
    if (cell != PLevel::TIE && cell != p)
        throw std::runtime_error("classify_pairs: pair (" + stimuli::label({sample_index}) +
                                 ", " + stimuli::label({comparison_index}) +
                                 ") classified as both select and reject");
    cell = p;
}

namespace {

struct InstantiatedPair {
    StimulusId sample;
    StimulusId positive;
};

std::vector<InstantiatedPair> baseline_instances(TrainingStructure ts) {
    std::vector<InstantiatedPair> out;
    for (const auto& p : structures::baseline_pairs(ts))
        for (int cls = 1; cls <= stimuli::kClassCount; ++cls)
            out.push_back({stimuli::member_id(cls, p.sample), stimuli::member_id(cls, p.comparison)});
    return out;
}

void classify_instance(PairLevels& levels, const Condition& condition,
                       const InstantiatedPair& pair) {
    if (condition.relation_type != RelationType::reject_only)
        levels.set(pair.sample.index, pair.positive.index, PLevel::ONE);
    if (condition.relation_type != RelationType::select_only)
        for (const auto& n : trials::negative_pool(pair.sample, pair.positive, condition.ncs))
            levels.set(pair.sample.index, n.index, PLevel::ZERO);
}

double trial_expectation(const PairLevels& levels, const trials::Trial& t) {
    PLevel lv[3];
    for (int i = 0; i < 3; ++i) lv[i] = levels.at(t.sample.index, t.comparisons[i].index);
    const PLevel correct = lv[t.correct_index];
    int ties_at_top = 0;
    for (int i = 0; i < 3; ++i) {
        if (lv[i] > correct) return 0.0;
        if (lv[i] == correct) ++ties_at_top;
    }
    return 1.0 / ties_at_top;
}

struct KindTotals {
    double sum[4] = {0, 0, 0, 0};
    int count[4] = {0, 0, 0, 0};

    void add(trials::TestKind k, double v) {
        sum[static_cast<int>(k)] += v;
        count[static_cast<int>(k)] += 1;
    }
    ExpectedRates rates() const {
        ExpectedRates r;
        r.base = count[0] ? sum[0] / count[0] : 0.0;
        r.reflexivity = count[1] ? sum[1] / count[1] : 0.0;
        r.symmetry = count[2] ? sum[2] / count[2] : 0.0;
        r.transitivity = count[3] ? sum[3] / count[3] : 0.0;
        return r;
    }
};

}  // namespace

PairLevels classify_pairs(const Condition& condition) {
    PairLevels levels;
    for (const auto& pair : baseline_instances(condition.ts))
        classify_instance(levels, condition, pair);
    return levels;
}

ExpectedRates expected_rates(const Condition& condition) {
    const auto levels = classify_pairs(condition);
    const auto evals = trials::generate_eval_trials(condition.ts);
    KindTotals totals;
    for (const auto& t : evals.trials) totals.add(t.test_kind, trial_expectation(levels, t));
    return totals.rates();
}

ProbeExpectation expected_probe_rates(const Condition& condition, StimulusId trained_sample) {
    PairLevels levels;
    for (const auto& pair : baseline_instances(condition.ts))
        if (pair.sample == trained_sample) classify_instance(levels, condition, pair);

    const auto evals = trials::generate_eval_trials(condition.ts);
    double sum_trained = 0.0, sum_other = 0.0;
    int n_trained = 0, n_other = 0;
    for (const auto& t : evals.trials) {
        const double e = trial_expectation(levels, t);
        if (t.sample == trained_sample) {
            sum_trained += e;
            ++n_trained;
        } else {
            sum_other += e;
            ++n_other;
        }
    }
    return {n_trained ? sum_trained / n_trained : 0.0, n_other ? sum_other / n_other : 0.0};
}

ExactRun exact_run(const Condition& condition, std::uint64_t seed) {
    const auto levels = classify_pairs(condition);

    // Replay the agent's initialization stream cell for cell.
    auto noise = numerics::Prng(seed).substream(agents::kProbInitSubstream);
    numerics::Matrix2D p(stimuli::kTotalStimuli, stimuli::kTotalStimuli);
    for (int r = 0; r < stimuli::kTotalStimuli; ++r)
        for (int c = 0; c < stimuli::kTotalStimuli; ++c) p.at(r, c) = 0.5 + noise.normal(0.0, 0.01);
    for (int r = 0; r < stimuli::kMemberCount; ++r)
        for (int c = 0; c < stimuli::kTotalStimuli; ++c) {
            if (levels.at(r, c) == PLevel::ONE) p.at(r, c) = 1.0;
            else if (levels.at(r, c) == PLevel::ZERO) p.at(r, c) = 0.0;
        }

    const auto evals = trials::generate_eval_trials(condition.ts);
    ExactRun run;
    run.selections.reserve(evals.trials.size());
    KindTotals totals;
    for (const auto& t : evals.trials) {
        int best = 0;
        double best_p = p.at(t.sample.index, t.comparisons[0].index);
        for (int i = 1; i < 3; ++i) {
            const double v = p.at(t.sample.index, t.comparisons[i].index);
            if (v > best_p) {
                best_p = v;
                best = i;
            }
        }
        run.selections.push_back(best);
        totals.add(t.test_kind, best == t.correct_index ? 1.0 : 0.0);
    }
    run.rates = totals.rates();
    return run;
}

}  // namespace eqsim::oracle
