#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "stagedtree/error.hpp"
#include "stagedtree/generators.hpp"
#include "stagedtree/learning.hpp"

using namespace stagedtree;

namespace {

struct Problem {
    EventTree tree;
    std::vector<CategoricalDataset::Record> records;
    TreeCounts counts;
};

Problem make_problem(const EventTree& tree, std::vector<CategoricalDataset::Record> records) {
    Problem p{tree, std::move(records), {}};
    p.counts = tree_counts(oracle::dataset_for(p.tree, p.records), p.tree);
    return p;
}

Problem random_problem(std::mt19937_64& gen, std::size_t n_vars, std::size_t n_records) {
    const auto tree = oracle::binary_tree(n_vars);
    // Records from a random model so there is structure to find.
    const auto model = oracle::random_model(tree, gen);
    auto data = sample_model(model, n_records, gen());
    return make_problem(tree, data.records());
}

// Vertices of depth d sharing a stage with vertex v.
std::vector<std::size_t> stage_mates(const Staging& staging, std::size_t d, std::size_t v) {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < staging.depth(d).stage_of.size(); ++u) {
        if (staging.stage(d, u) == staging.stage(d, v)) out.push_back(u);
    }
    return out;
}

void expect_valid(const LearnResult& r) {
    EXPECT_NO_THROW(r.model.staging().check_against(r.model.tree()));
    double sum = 0.0;
    for (double p : joint_table(r.model)) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

} // namespace

TEST(Algorithms, NamesRoundTrip) {
    for (auto a : {Algorithm::Full, Algorithm::Indep, Algorithm::HcIndep, Algorithm::HcFull, Algorithm::Bhc,
                   Algorithm::Fbhc, Algorithm::Bj, Algorithm::NaiveHc, Algorithm::NaiveKm}) {
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    }
    EXPECT_THROW(parse_algorithm("tabu"), ValidationError);
    EXPECT_TRUE(is_score_driven(Algorithm::Bj));
    EXPECT_FALSE(is_score_driven(Algorithm::NaiveKm));
}

TEST(LearnConfig, Validation) {
    LearnConfig config;
    config.algorithm = Algorithm::Bj;
    config.kl_threshold = 0.0;
    EXPECT_THROW(config.validate(), ValidationError);
    config.kl_threshold = 0.01;
    config.max_search_depth = 0;
    EXPECT_THROW(config.validate(), ValidationError);
    config.max_search_depth = 1;
    EXPECT_NO_THROW(config.validate());
}

TEST(Baseline, FullAndIndepShapes) {
    const auto tree = oracle::binary_tree(3);
    std::vector<CategoricalDataset::Record> records;
    for (const auto& a : oracle::all_assignments({2, 2, 2})) records.push_back(a);
    const auto p = make_problem(tree, records);
    const auto full = learn_baseline(tree, p.counts, BaselineMode::Full);
    EXPECT_EQ(full.staging().depth(0).num_stages, 1u);
    EXPECT_EQ(full.staging().depth(1).num_stages, 2u);
    EXPECT_EQ(full.staging().depth(2).num_stages, 4u);
    const auto indep = learn_baseline(tree, p.counts, BaselineMode::Indep);
    for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(indep.staging().depth(d).num_stages, 1u);
}

TEST(Baseline, FullMemorizesParityTrainingData) {
    const auto data = generate_parity(6, 100, 3);
    const auto tree = tree_for(data, data.feature_names());
    const auto model = learn_baseline(tree, tree_counts(data, tree), BaselineMode::Full);
    const RecordMapper mapper(tree, data);
    for (const auto& r : data.records()) {
        const auto o = mapper.outcome(r);
        const std::vector<std::size_t> x(o.begin() + 1, o.end());
        // p(c, x) is positive for the true class only.
        auto wrong = o;
        wrong[0] = 1 - o[0];
        EXPECT_GT(atom_probability(model, o), 0.0);
        EXPECT_EQ(atom_probability(model, wrong), 0.0);
    }
}

TEST(HillClimb, JoinsIdenticalFlorets) {
    const auto tree = oracle::binary_tree(2);
    const auto p = make_problem(tree, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}, {1, 0}});
    const auto start = learn_baseline(tree, p.counts, BaselineMode::Full);
    const auto result = hill_climb(start, p.counts, HillClimbDirection::JoinOnly, false, std::nullopt);
    EXPECT_EQ(result.model.staging().depth(1).num_stages, 1u);
    ASSERT_EQ(result.trace.steps.size(), 1u);
    EXPECT_NEAR(result.trace.steps[0].score_after - result.trace.steps[0].score_before, 0.5 * std::log(6.0), 1e-9);
}

TEST(HillClimb, FixedPointHasEmptyTrace) {
    std::mt19937_64 gen(3);
    const auto p = random_problem(gen, 3, 300);
    for (auto direction : {HillClimbDirection::Free, HillClimbDirection::JoinOnly}) {
        const auto start = learn_baseline(p.tree, p.counts, BaselineMode::Full);
        const auto once = hill_climb(start, p.counts, direction, false, std::nullopt);
        const auto twice = hill_climb(once.model, p.counts, direction, false, std::nullopt);
        EXPECT_TRUE(twice.trace.steps.empty());
        EXPECT_EQ(twice.model, once.model);
    }
}

TEST(HillClimb, TraceStrictlyIncreasesAndMatchesGlobalRescore) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_problem(gen, 2 + gen() % 3, 20 + gen() % 300);
        const double lambda = trial % 3 == 0 ? 1.0 : 0.0;
        for (auto [mode, direction, first] :
             {std::tuple{BaselineMode::Full, HillClimbDirection::JoinOnly, false},
              std::tuple{BaselineMode::Full, HillClimbDirection::JoinOnly, true},
              std::tuple{BaselineMode::Full, HillClimbDirection::Free, false},
              std::tuple{BaselineMode::Indep, HillClimbDirection::Free, false}}) {
            const auto start = learn_baseline(p.tree, p.counts, mode, lambda);
            const auto r = hill_climb(start, p.counts, direction, first, std::nullopt, lambda);
            expect_valid(r);
            EXPECT_NEAR(r.trace.initial_score, bic_score(start, p.counts).score, 1e-9);
            double previous = r.trace.initial_score;
            for (const auto& step : r.trace.steps) {
                EXPECT_EQ(step.score_before, previous);
                EXPECT_GT(step.score_after, step.score_before);
                previous = step.score_after;
            }
            EXPECT_NEAR(r.trace.final_score, previous, 1e-9);
            EXPECT_NEAR(r.trace.final_score, bic_score(r.model, p.counts).score, 1e-9);
            EXPECT_GE(r.trace.final_score, r.trace.initial_score);
        }
    }
}

TEST(HillClimb, DepthCapFreezesDeeperDepths) {
    std::mt19937_64 gen(5);
    const auto p = random_problem(gen, 4, 400);
    const auto start = learn_baseline(p.tree, p.counts, BaselineMode::Full);
    const auto r = hill_climb(start, p.counts, HillClimbDirection::JoinOnly, false, 1);
    EXPECT_EQ(r.model.staging().depth(2), start.staging().depth(2));
    EXPECT_EQ(r.model.staging().depth(3), start.staging().depth(3));
}

TEST(HillClimb, ReachesExhaustiveOptimumOnTinyProblems) {
    std::mt19937_64 gen(6);
    int hits = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        const auto p = random_problem(gen, 3, 10 + gen() % 41);
        const auto start = learn_baseline(p.tree, p.counts, BaselineMode::Full);
        const auto r = hill_climb(start, p.counts, HillClimbDirection::JoinOnly, false, std::nullopt);
        const double optimum = oracle::exhaustive_best_bic(oracle::cardinalities(p.tree), p.records);
        EXPECT_LE(r.trace.final_score, optimum + 1e-9);
        if (r.trace.final_score >= optimum - 1e-9) ++hits;
    }
    EXPECT_GE(hits, 95);
}

TEST(HillClimb, RecoversPlantedContextSpecificStage) {
    // X1 at the root; the X3 florets of (0,0) and (1,1) are equal, as are
    // those of (0,1) and (1,0).
    const auto tree = build_event_tree(VariableSpec("X1", {"0", "1"}),
                                       {VariableSpec("X2", {"0", "1"}), VariableSpec("X3", {"0", "1"})});
    const auto staging = Staging::from_stages(tree, {{{2, 0}, {2, 3}}, {{2, 1}, {2, 2}}});
    const StagedTreeModel truth(tree, staging, {{{0.5, 0.5}}, {{0.6, 0.4}, {0.2, 0.8}}, {{0.8, 0.2}, {0.3, 0.7}}});
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = sample_model(truth, 5000, seed);
        const auto counts = tree_counts(data, tree);
        const auto r = hill_climb(learn_baseline(tree, counts, BaselineMode::Full), counts,
                                  HillClimbDirection::JoinOnly, false, std::nullopt);
        if (stage_mates(r.model.staging(), 2, 0) == std::vector<std::size_t>{0, 3}) ++recovered;
    }
    EXPECT_GE(recovered, 9);
}

TEST(BackwardJoin, MergesIdenticalFlorets) {
    const auto tree = oracle::binary_tree(2);
    const auto p = make_problem(tree, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const auto r = backward_join(learn_baseline(tree, p.counts, BaselineMode::Full), p.counts, 1e-6);
    EXPECT_EQ(r.model.staging().depth(1).num_stages, 1u);
    ASSERT_EQ(r.trace.steps.size(), 1u);
    EXPECT_EQ(*r.trace.steps[0].divergence, 0.0);
}

TEST(BackwardJoin, KeepsDistantFloretsApart) {
    // Depth-1 florets (0.5, 0.5) and (0.9, 0.1): divergence about 0.879.
    const auto tree = oracle::binary_tree(2);
    std::vector<CategoricalDataset::Record> records;
    for (int i = 0; i < 5; ++i) records.push_back({0, 0});
    for (int i = 0; i < 5; ++i) records.push_back({0, 1});
    for (int i = 0; i < 9; ++i) records.push_back({1, 0});
    records.push_back({1, 1});
    const auto p = make_problem(tree, records);
    const auto r = backward_join(learn_baseline(tree, p.counts, BaselineMode::Full), p.counts, 0.20);
    EXPECT_EQ(r.model.staging().depth(1).num_stages, 2u);
    EXPECT_TRUE(r.trace.steps.empty());
}

TEST(BackwardJoin, InfiniteThresholdCollapsesEveryDepth) {
    std::mt19937_64 gen(7);
    const auto p = random_problem(gen, 4, 200);
    const auto r = backward_join(learn_baseline(p.tree, p.counts, BaselineMode::Full), p.counts,
                                 std::numeric_limits<double>::infinity());
    for (std::size_t d = 0; d < p.tree.num_depths(); ++d) {
        EXPECT_EQ(r.model.staging().depth(d).num_observed_stages(), 1u);
    }
    EXPECT_EQ(r.model.staging(), learn_baseline(p.tree, p.counts, BaselineMode::Indep).staging());
}

TEST(BackwardJoin, RecordedDivergencesAreBelowThreshold) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_problem(gen, 2 + gen() % 3, 30 + gen() % 300);
        const double t = trial % 2 ? 0.01 : 0.2;
        const auto r = backward_join(learn_baseline(p.tree, p.counts, BaselineMode::Full), p.counts, t);
        expect_valid(r);
        for (const auto& step : r.trace.steps) {
            ASSERT_TRUE(step.divergence);
            EXPECT_LT(*step.divergence, t);
        }
        EXPECT_THROW(backward_join(r.model, p.counts, 0.0), ValidationError);
    }
}

TEST(Naive, TwoObservedVerticesStaySeparate) {
    const auto tree = oracle::binary_tree(2);
    const auto p = make_problem(tree, {{0, 0}, {0, 0}, {0, 1}, {1, 1}});
    for (auto method : {NaiveMethod::HClust, NaiveMethod::KMeans}) {
        const auto r = learn_naive(tree, p.counts, method);
        EXPECT_EQ(r.model.staging().depth(1).num_stages, 2u);
    }
}

TEST(Naive, IdenticalFloretsGiveOneStage) {
    const auto tree = oracle::binary_tree(3);
    std::vector<CategoricalDataset::Record> records;
    for (const auto& a : oracle::all_assignments({2, 2, 2})) records.push_back(a);
    const auto p = make_problem(tree, records);
    for (auto method : {NaiveMethod::HClust, NaiveMethod::KMeans}) {
        const auto r = learn_naive(tree, p.counts, method);
        EXPECT_EQ(r.model.staging().depth(2).num_stages, 1u);
        EXPECT_FALSE(r.trace.notes.empty());
    }
}

TEST(Naive, AtMostClassManyObservedStages) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::size_t> cards{2 + gen() % 3};
        for (std::size_t j = 0, n = 1 + gen() % 4; j < n; ++j) cards.push_back(2 + gen() % 3);
        const auto tree = oracle::tree_with_cards(cards);
        const auto data = sample_model(oracle::random_model(tree, gen), 50 + gen() % 500, gen());
        const auto counts = tree_counts(data, tree);
        for (auto method : {NaiveMethod::HClust, NaiveMethod::KMeans}) {
            const auto r = learn_naive(tree, counts, method, 0.0, gen());
            expect_valid(r);
            std::size_t naive_bayes = cards[0] - 1;
            for (std::size_t d = 1; d < cards.size(); ++d) {
                EXPECT_LE(r.model.staging().depth(d).num_observed_stages(), cards[0]);
                naive_bayes += cards[0] * (cards[d] - 1);
            }
            EXPECT_LE(free_parameter_count(r.model), naive_bayes);
        }
    }
}

TEST(Learn, DeterministicForEveryAlgorithm) {
    const auto data = generate_parity_with_noise(2, 400, 11);
    const auto tree = tree_for(data, data.feature_names());
    const auto counts = tree_counts(data, tree);
    for (auto a : {Algorithm::Full, Algorithm::Indep, Algorithm::HcIndep, Algorithm::HcFull, Algorithm::Bhc,
                   Algorithm::Fbhc, Algorithm::Bj, Algorithm::NaiveHc, Algorithm::NaiveKm}) {
        LearnConfig config;
        config.algorithm = a;
        config.seed = 99;
        const auto first = learn(tree, counts, config);
        const auto second = learn(tree, counts, config);
        EXPECT_EQ(first.model, second.model) << to_string(a);
        EXPECT_EQ(first.trace.steps.size(), second.trace.steps.size());
    }
}

TEST(Learn, RejectsEmptyCounts) {
    const auto tree = oracle::binary_tree(2);
    EXPECT_THROW(learn(tree, TreeCounts(tree), LearnConfig{}), ValidationError);
}
