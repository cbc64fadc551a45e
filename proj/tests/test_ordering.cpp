#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stagedtree/error.hpp"
#include "stagedtree/generators.hpp"
#include "stagedtree/ordering.hpp"

using namespace stagedtree;

namespace {

VariableSpec binary(const std::string& name) { return VariableSpec(name, {"0", "1"}); }

// Every (x1, x2, x3) once, class the 2-XOR of x1 and x2; columns X1 X2 X3 C.
CategoricalDataset parity_truth_table() {
    std::vector<CategoricalDataset::Record> records;
    for (const auto& a : oracle::all_assignments({2, 2, 2})) records.push_back({a[0], a[1], a[2], a[0] ^ a[1]});
    return CategoricalDataset({binary("X1"), binary("X2"), binary("X3"), binary("C")}, records, "C");
}

} // namespace

TEST(Cmi, IdenticalVariableGivesLn2) {
    const CategoricalDataset ds({binary("X"), binary("C")}, {{0, 0}, {1, 1}, {0, 0}, {1, 1}}, "C");
    EXPECT_NEAR(conditional_mutual_information(ds, "X", "C", {}), std::log(2.0), 1e-15);
}

TEST(Cmi, IndependentCoinIsNearZero) {
    std::mt19937_64 gen(1);
    std::vector<CategoricalDataset::Record> records(10000);
    for (auto& r : records) r = {gen() % 2, gen() % 2};
    const CategoricalDataset ds({binary("X"), binary("C")}, records, "C");
    const double cmi = conditional_mutual_information(ds, "X", "C", {});
    EXPECT_GE(cmi, 0.0);
    EXPECT_LE(cmi, 0.01);
}

TEST(Cmi, ParityNeedsThePartner) {
    const auto ds = parity_truth_table();
    EXPECT_NEAR(conditional_mutual_information(ds, "X2", "C", {}), 0.0, 1e-15);
    EXPECT_NEAR(conditional_mutual_information(ds, "X2", "C", {"X1"}), std::log(2.0), 1e-15);
}

TEST(Cmi, Errors) {
    const auto ds = parity_truth_table();
    EXPECT_THROW(conditional_mutual_information(ds, "X1", "C", {"X1"}), ValidationError);
    EXPECT_THROW(conditional_mutual_information(ds, "nope", "C", {}), ValidationError);
    EXPECT_THROW(conditional_mutual_information(ds, "X1", "C", {"X2", "X3"}, 0.0, 4), ValidationError);
}

TEST(Cmi, MatchesBruteForceOnRandomData) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t p = 2 + gen() % 3;
        std::vector<VariableSpec> vars;
        std::vector<std::size_t> cards;
        for (std::size_t j = 0; j <= p; ++j) {
            cards.push_back(2 + gen() % 3);
            std::vector<std::string> levels;
            for (std::size_t l = 0; l < cards.back(); ++l) levels.push_back(std::to_string(l));
            vars.emplace_back(j == p ? "C" : "X" + std::to_string(j), levels);
        }
        std::vector<CategoricalDataset::Record> records(20 + gen() % 100);
        for (auto& r : records) {
            for (auto k : cards) r.push_back(gen() % k);
            // Every level present so the dataset is valid.
        }
        for (std::size_t j = 0; j <= p; ++j) {
            for (std::size_t l = 0; l < cards[j]; ++l) records[l % records.size()][j] = l;
        }
        const CategoricalDataset ds(vars, records, "C");
        const std::size_t x = gen() % p;
        std::vector<std::size_t> given;
        std::vector<std::string> given_names;
        for (std::size_t j = 0; j < p; ++j) {
            if (j != x && gen() % 2) {
                given.push_back(j);
                given_names.push_back(vars[j].name());
            }
        }
        EXPECT_NEAR(conditional_mutual_information(ds, vars[x].name(), "C", given_names),
                    oracle::plugin_cmi(records, x, p, given), 1e-12);
    }
}

TEST(CmiOrder, ExactCopyGoesFirst) {
    std::mt19937_64 gen(2);
    std::vector<CategoricalDataset::Record> records(500);
    for (auto& r : records) {
        r = {gen() % 2, gen() % 2, gen() % 2, 0};
        r[3] = r[2];
    }
    const CategoricalDataset ds({binary("X1"), binary("X2"), binary("X3"), binary("C")}, records, "C");
    EXPECT_EQ(cmi_order(ds).order.front(), "X3");
}

TEST(CmiOrder, SingleFeature) {
    const CategoricalDataset ds({binary("X"), binary("C")}, {{0, 0}, {1, 1}, {1, 0}, {1, 1}}, "C");
    const auto result = cmi_order(ds);
    ASSERT_EQ(result.order, std::vector<std::string>{"X"});
    EXPECT_NEAR(result.scores[0], conditional_mutual_information(ds, "X", "C", {}), 0.0);
}

TEST(CmiOrder, ParityPartnerComesSecond) {
    const auto result = cmi_order(parity_truth_table());
    ASSERT_EQ(result.order.size(), 3u);
    EXPECT_NE(result.order[0], "X3");
    // All first-step scores are 0, so the earlier column wins the tie.
    EXPECT_EQ(result.order[0], "X1");
    EXPECT_EQ(result.order[1], "X2");
    EXPECT_NEAR(result.scores[1], std::log(2.0), 1e-15);
}

TEST(CmiOrder, IsAPermutationWithRecomputableScores) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto ds = generate_parity_with_noise(3, 300, seed);
        const auto result = cmi_order(ds);
        auto sorted = result.order;
        auto names = ds.feature_names();
        std::sort(sorted.begin(), sorted.end());
        std::sort(names.begin(), names.end());
        EXPECT_EQ(sorted, names);
        std::vector<std::string> chosen;
        for (std::size_t k = 0; k < result.order.size(); ++k) {
            EXPECT_GE(result.scores[k], -1e-12);
            EXPECT_EQ(result.scores[k], conditional_mutual_information(ds, result.order[k], "C", chosen));
            chosen.push_back(result.order[k]);
        }
        const auto again = cmi_order(ds);
        EXPECT_EQ(again.order, result.order);
        EXPECT_EQ(again.scores, result.scores);
    }
}
