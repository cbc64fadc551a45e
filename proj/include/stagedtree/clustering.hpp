#ifndef STAGEDTREE_CLUSTERING_HPP
#define STAGEDTREE_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stagedtree {

using Point = std::vector<double>;

enum class Linkage { Average, Complete, Single };
enum class Distance { TotalVariation, SymmetrizedKl };

/// Agglomerative clustering cut at `k` clusters. Returns one label per point,
/// labels numbered by first occurrence. Ties merge the lowest (i, j) pair.
std::vector<std::size_t> hierarchical_clustering(const std::vector<Point>& points, std::size_t k,
                                                 Linkage linkage = Linkage::Average,
                                                 Distance distance = Distance::TotalVariation);

struct KMeansResult {
    std::vector<std::size_t> labels;
    std::vector<Point> centroids;
    double within_sum_of_squares = 0.0;
};

/// Lloyd's algorithm on squared Euclidean distance with `restarts` seeded
/// random initializations; the restart with the smallest within-cluster sum of
/// squares is kept. An emptied cluster is re-seeded with the point farthest
/// from its current centroid.
KMeansResult kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                    std::size_t max_iterations = 100);

} // namespace stagedtree

#endif
