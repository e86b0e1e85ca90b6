#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "eqsim/trials.hpp"

using namespace eqsim;
using namespace eqsim::trials;

namespace {

std::map<TestKind, int> kind_counts(const TrialSet& set) {
    std::map<TestKind, int> counts;
    for (const auto& t : set.trials) ++counts[t.test_kind];
    return counts;
}

}  // namespace

TEST_CASE("negative pools") {
    const auto a1 = stimuli::parse_label("A1");
    const auto b1 = stimuli::parse_label("B1");
    SUBCASE("standard: same-label other classes") {
        const auto pool = negative_pool(a1, b1, NegativePolicy::standard);
        REQUIRE(pool.size() == 3);
        CHECK(stimuli::label(pool[0]) == "B2");
        CHECK(stimuli::label(pool[1]) == "B3");
        CHECK(stimuli::label(pool[2]) == "B4");
    }
    SUBCASE("biased: all other-class members") {
        const auto pool = negative_pool(a1, b1, NegativePolicy::biased);
        REQUIRE(pool.size() == 18);
        for (const auto& n : pool) {
            CHECK(n.is_member());
            CHECK(n.class_index() != 1);
        }
    }
}

TEST_CASE("training trial counts") {
    // [DERIVED] pairs x classes x C(pool,2) x 3 rotations
    struct Row {
        const char* name;
        int count;
    };
    const Row rows[] = {
        {"LS", 180},          // 5*4*C(3,2)*3
        {"LS-biased", 9180},  // 5*4*C(18,2)*3
        {"LS-select", 180},   {"LS-reject", 180},
        {"OTM", 180},         {"MTO", 180},
        {"OTM-biased", 9180}, {"MTO-biased", 9180},
        {"LS-select-biased", 9180},
    };
    for (const auto& r : rows) {
        const auto set =
            generate_training_trials(parse_condition(r.name), PositionScheme::rotations(), 1);
        CHECK_MESSAGE(static_cast<int>(set.trials.size()) == r.count, r.name);
        for (const auto& t : set.trials) CHECK(t.phase == Phase::train);
    }
}

TEST_CASE("rotation scheme cycles correct_index 0,1,2") {
    const auto set = generate_training_trials(parse_condition("LS"), PositionScheme::rotations(), 1);
    for (std::size_t i = 0; i < set.trials.size(); i += 3) {
        CHECK(set.trials[i].correct_index == 0);
        CHECK(set.trials[i + 1].correct_index == 1);
        CHECK(set.trials[i + 2].correct_index == 2);
        // same three comparisons, rotated
        std::set<int> a, b;
        for (int k = 0; k < 3; ++k) {
            a.insert(set.trials[i].comparisons[k].index);
            b.insert(set.trials[i + 1].comparisons[k].index);
        }
        CHECK(a == b);
        CHECK(set.trials[i].reinforced() == set.trials[i + 1].reinforced());
    }
}

TEST_CASE("permutation scheme emits all six arrangements") {
    const auto set =
        generate_training_trials(parse_condition("LS"), PositionScheme::permutations(), 1);
    CHECK(set.trials.size() == 360);  // 60 combos x 6
    std::set<int> correct_positions;
    for (int k = 0; k < 6; ++k) correct_positions.insert(set.trials[k].correct_index);
    CHECK(correct_positions == std::set<int>{0, 1, 2});
}

TEST_CASE("random scheme draws k arrangements deterministically") {
    const auto a = generate_training_trials(parse_condition("LS"), PositionScheme::random(5), 7);
    const auto b = generate_training_trials(parse_condition("LS"), PositionScheme::random(5), 7);
    const auto c = generate_training_trials(parse_condition("LS"), PositionScheme::random(5), 8);
    CHECK(a.trials.size() == 300);  // 60 combos x 5
    REQUIRE(a.trials.size() == b.trials.size());
    bool all_equal = true, differs_from_c = false;
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        if (a.trials[i].correct_index != b.trials[i].correct_index) all_equal = false;
        if (a.trials[i].correct_index != c.trials[i].correct_index) differs_from_c = true;
    }
    CHECK(all_equal);
    CHECK(differs_from_c);
}

TEST_CASE("select-only replaces negatives with two distinct dummies") {
    const auto set =
        generate_training_trials(parse_condition("LS-select"), PositionScheme::rotations(), 1);
    for (const auto& t : set.trials) {
        CHECK(t.reinforced().is_member());
        std::set<int> dummies;
        for (int k = 0; k < 3; ++k)
            if (k != t.correct_index) {
                CHECK(t.comparisons[k].is_dummy());
                dummies.insert(t.comparisons[k].index);
            }
        CHECK(dummies.size() == 2);
    }
}

TEST_CASE("reject-only replaces the positive with a dummy") {
    const auto set =
        generate_training_trials(parse_condition("LS-reject"), PositionScheme::rotations(), 1);
    for (const auto& t : set.trials) {
        CHECK(t.reinforced().is_dummy());
        for (int k = 0; k < 3; ++k)
            if (k != t.correct_index) CHECK(t.comparisons[k].is_member());
    }
}

TEST_CASE("training generation is seed-deterministic") {
    const auto a =
        generate_training_trials(parse_condition("MTO-reject"), PositionScheme::rotations(), 42);
    const auto b =
        generate_training_trials(parse_condition("MTO-reject"), PositionScheme::rotations(), 42);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].sample == b.trials[i].sample);
        CHECK(a.trials[i].comparisons == b.trials[i].comparisons);
        CHECK(a.trials[i].correct_index == b.trials[i].correct_index);
    }
}

TEST_CASE("evaluation trial counts and order") {
    for (auto ts : {TrainingStructure::LS, TrainingStructure::OTM, TrainingStructure::MTO}) {
        const auto set = generate_eval_trials(ts);
        const auto counts = kind_counts(set);
        // [DERIVED] pairs x 4 classes x 3 combos x 3 rotations:
        // 5 baseline=180, 6 reflexivity=216, 5 symmetry=180, 20 transitivity=720.
        CHECK(counts.at(TestKind::baseline) == 180);
        CHECK(counts.at(TestKind::reflexivity) == 216);
        CHECK(counts.at(TestKind::symmetry) == 180);
        CHECK(counts.at(TestKind::transitivity) == 720);
        CHECK(set.trials.size() == 1296);
        // kinds appear in blocks: baseline, reflexivity, symmetry, transitivity
        TestKind last = TestKind::baseline;
        for (const auto& t : set.trials) {
            CHECK(static_cast<int>(t.test_kind) >= static_cast<int>(last));
            last = t.test_kind;
            CHECK(t.phase == Phase::eval);
            for (int k = 0; k < 3; ++k) CHECK(t.comparisons[k].is_member());
        }
    }
}

TEST_CASE("evaluation trials use standard pools only") {
    const auto set = generate_eval_trials(TrainingStructure::LS);
    for (const auto& t : set.trials) {
        const auto pos = t.reinforced();
        for (int k = 0; k < 3; ++k)
            if (k != t.correct_index) {
                CHECK(t.comparisons[k].member() == pos.member());
                CHECK(t.comparisons[k].class_index() != pos.class_index());
            }
    }
}

TEST_CASE("one-hot encoding layout") {
    const auto set = stimuli::build_stimulus_set();
    Trial t;
    t.sample = stimuli::parse_label("A1");
    t.comparisons = {stimuli::parse_label("B1"), stimuli::parse_label("B2"),
                     stimuli::parse_label("Z_11")};
    t.correct_index = 0;
    const auto enc = encode_onehot(t, set);
    REQUIRE(enc.size() == 192);
    double sum = 0.0;
    for (double v : enc) sum += v;
    CHECK(sum == doctest::Approx(4.0));
    CHECK(enc[0] == 1.0);            // sample A1
    CHECK(enc[48 + 1] == 1.0);       // comp0 B1
    CHECK(enc[96 + 7] == 1.0);       // comp1 B2
    CHECK(enc[144 + 24] == 1.0);     // comp2 Z_11
}

TEST_CASE("token encoding layout and vocab") {
    CHECK(kResponseTokenBase == 48);
    CHECK(kVocabSize == 51);
    Trial t;
    t.sample = stimuli::parse_label("A1");
    t.comparisons = {stimuli::parse_label("B1"), stimuli::parse_label("B2"),
                     stimuli::parse_label("B3")};
    t.correct_index = 2;
    const auto tokens = encode_tokens(t);
    CHECK(tokens == std::array<int, 5>{0, 1, 7, 13, 50});  // O_3 = 48 + 2
}

TEST_CASE("jsonl serialization") {
    const auto set = generate_training_trials(parse_condition("LS"), PositionScheme::rotations(), 1);
    const auto text = to_jsonl(set);
    CHECK(std::count(text.begin(), text.end(), '\n') == 180);
    CHECK(text.find("\"sample\":\"A1\"") != std::string::npos);
    CHECK(text.find("\"phase\":\"train\"") != std::string::npos);
    CHECK(text.find("\"test_kind\":\"baseline\"") != std::string::npos);
}

TEST_CASE("position scheme parsing") {
    CHECK(parse_scheme("rotations").kind == PositionScheme::Kind::rotations);
    CHECK(parse_scheme("permutations").kind == PositionScheme::Kind::permutations);
    const auto r = parse_scheme("random:4");
    CHECK(r.kind == PositionScheme::Kind::random);
    CHECK(r.random_count == 4);
    CHECK_THROWS_AS(parse_scheme("bogus"), std::invalid_argument);
}
