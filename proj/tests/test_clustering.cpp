#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stagedtree/clustering.hpp"
#include "stagedtree/error.hpp"

using namespace stagedtree;

TEST(Hierarchical, SeparatesTwoObviousGroups) {
    const std::vector<Point> points{{0.9, 0.1}, {0.1, 0.9}, {0.85, 0.15}, {0.15, 0.85}, {0.88, 0.12}};
    EXPECT_EQ(hierarchical_clustering(points, 2), (std::vector<std::size_t>{0, 1, 0, 1, 0}));
}

TEST(Hierarchical, FewerPointsThanClusters) {
    EXPECT_EQ(hierarchical_clustering({{0.5, 0.5}, {0.2, 0.8}}, 3), (std::vector<std::size_t>{0, 1}));
    EXPECT_THROW(hierarchical_clustering({{1.0}}, 0), ValidationError);
}

TEST(Hierarchical, AverageLinkageMatchesNaiveRecomputation) {
    // Average linkage from scratch: cluster distance is the mean pairwise distance.
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + gen() % 8;
        const std::size_t k = 1 + gen() % 3;
        std::vector<Point> points;
        for (std::size_t i = 0; i < n; ++i) points.push_back(oracle::random_simplex(gen, 3));
        std::vector<std::vector<std::size_t>> clusters;
        for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
        auto tv = [&](std::size_t a, std::size_t b) {
            double s = 0.0;
            for (std::size_t l = 0; l < 3; ++l) s += std::abs(points[a][l] - points[b][l]);
            return 0.5 * s;
        };
        while (clusters.size() > k) {
            double best = 1e300;
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                    double sum = 0.0;
                    for (auto a : clusters[i]) {
                        for (auto b : clusters[j]) sum += tv(a, b);
                    }
                    const double d = sum / static_cast<double>(clusters[i].size() * clusters[j].size());
                    if (d < best - 1e-12) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            }
            clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
            clusters.erase(clusters.begin() + static_cast<long>(bj));
        }
        std::vector<std::size_t> raw(n);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (auto i : clusters[c]) raw[i] = c;
        }
        std::map<std::size_t, std::size_t> renumber;
        std::vector<std::size_t> expected(n);
        for (std::size_t i = 0; i < n; ++i) expected[i] = renumber.try_emplace(raw[i], renumber.size()).first->second;
        EXPECT_EQ(hierarchical_clustering(points, k), expected);
    }
}

TEST(KMeans, SeparatesTwoObviousGroups) {
    const std::vector<Point> points{{0.9, 0.1}, {0.1, 0.9}, {0.85, 0.15}, {0.15, 0.85}, {0.88, 0.12}};
    const auto r = kmeans(points, 2, 5);
    EXPECT_EQ(r.labels, (std::vector<std::size_t>{0, 1, 0, 1, 0}));
    EXPECT_NEAR(r.centroids[0][0], (0.9 + 0.85 + 0.88) / 3.0, 1e-12);
    EXPECT_LT(r.within_sum_of_squares, 0.01);
}

TEST(KMeans, DeterministicAndNeverEmpty) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> points;
        const std::size_t n = 3 + gen() % 20;
        for (std::size_t i = 0; i < n; ++i) points.push_back(oracle::random_simplex(gen, 3));
        // Duplicates push the initialization towards empty clusters.
        points.push_back(points.front());
        points.push_back(points.front());
        const std::size_t k = 2 + gen() % 3;
        const auto a = kmeans(points, k, trial);
        const auto b = kmeans(points, k, trial);
        EXPECT_EQ(a.labels, b.labels);
        std::vector<std::size_t> sizes(k, 0);
        for (auto l : a.labels) ++sizes[l];
        for (auto s : sizes) EXPECT_GT(s, 0u);
        EXPECT_THROW(kmeans(points, k, trial, 0), ValidationError);
    }
}
