#include "stagedtree/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "stagedtree/error.hpp"
#include "stagedtree/estimation.hpp"
#include "stagedtree/rng.hpp"

namespace stagedtree {
namespace {

std::vector<std::size_t> first_occurrence_labels(const std::vector<std::size_t>& raw) {
    std::map<std::size_t, std::size_t> renumber;
    std::vector<std::size_t> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = renumber.try_emplace(raw[i], renumber.size()).first->second;
    return out;
}

double squared_distance(const Point& a, const Point& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

std::vector<std::size_t> identity_labels(std::size_t n) {
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i;
    return labels;
}

} // namespace

std::vector<std::size_t> hierarchical_clustering(const std::vector<Point>& points, std::size_t k, Linkage linkage,
                                                 Distance distance) {
    if (k == 0) throw ValidationError("clustering needs k >= 1");
    const std::size_t n = points.size();
    if (n <= k) return identity_labels(n);

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance == Distance::TotalVariation ? total_variation(points[i], points[j])
                                                                  : symmetrized_kl(points[i], points[j]);
            dist[i][j] = dist[j][i] = d;
        }
    }
    std::vector<std::size_t> owner = identity_labels(n);
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::size_t clusters = n;

    while (clusters > k) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && dist[i][j] < best) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        // Lance-Williams update of the merged cluster (kept at index bi).
        for (std::size_t h = 0; h < n; ++h) {
            if (!active[h] || h == bi || h == bj) continue;
            double merged = 0.0;
            switch (linkage) {
            case Linkage::Average:
                merged = (static_cast<double>(size[bi]) * dist[bi][h] + static_cast<double>(size[bj]) * dist[bj][h]) /
                         static_cast<double>(size[bi] + size[bj]);
                break;
            case Linkage::Complete: merged = std::max(dist[bi][h], dist[bj][h]); break;
            case Linkage::Single: merged = std::min(dist[bi][h], dist[bj][h]); break;
            }
            dist[bi][h] = dist[h][bi] = merged;
        }
        size[bi] += size[bj];
        active[bj] = false;
        for (auto& o : owner) {
            if (o == bj) o = bi;
        }
        --clusters;
    }
    return first_occurrence_labels(owner);
}

KMeansResult kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iterations) {
    if (k == 0) throw ValidationError("clustering needs k >= 1");
    if (restarts == 0) throw ValidationError("k-means needs at least one restart");
    const std::size_t n = points.size();
    KMeansResult best;
    if (n <= k) {
        best.labels = identity_labels(n);
        best.centroids = points;
        return best;
    }
    const std::size_t dim = points.front().size();
    best.within_sum_of_squares = std::numeric_limits<double>::infinity();

    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, r));
        std::vector<std::size_t> order = identity_labels(n);
        rng.shuffle(order);
        std::vector<Point> centroids;
        for (std::size_t c = 0; c < k; ++c) centroids.push_back(points[order[c]]);

        std::vector<std::size_t> labels(n, k);
        for (std::size_t iter = 0; iter < max_iterations; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t nearest = 0;
                double nearest_d = squared_distance(points[i], centroids[0]);
                for (std::size_t c = 1; c < k; ++c) {
                    const double d = squared_distance(points[i], centroids[c]);
                    if (d < nearest_d) {
                        nearest_d = d;
                        nearest = c;
                    }
                }
                if (labels[i] != nearest) {
                    labels[i] = nearest;
                    changed = true;
                }
            }
            std::vector<Point> sums(k, Point(dim, 0.0));
            std::vector<std::size_t> counts(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[labels[i]];
                for (std::size_t j = 0; j < dim; ++j) sums[labels[i]][j] += points[i][j];
            }
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
                    continue;
                }
                // Empty: take over the point farthest from its own centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (counts[labels[i]] <= 1) continue;
                    const double d = squared_distance(points[i], centroids[labels[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                if (far_d < 0.0) continue;
                --counts[labels[far]];
                labels[far] = c;
                counts[c] = 1;
                centroids[c] = points[far];
                changed = true;
            }
            if (!changed) break;
        }
        double wss = 0.0;
        for (std::size_t i = 0; i < n; ++i) wss += squared_distance(points[i], centroids[labels[i]]);
        if (wss < best.within_sum_of_squares) {
            best.within_sum_of_squares = wss;
            best.labels = labels;
            best.centroids = centroids;
        }
    }
    // Renumber clusters by first occurrence, carrying the centroids along.
    std::map<std::size_t, std::size_t> renumber;
    for (auto label : best.labels) renumber.try_emplace(label, renumber.size());
    std::vector<Point> centroids(renumber.size());
    for (const auto& [old_label, new_label] : renumber) centroids[new_label] = best.centroids[old_label];
    for (auto& label : best.labels) label = renumber[label];
    best.centroids = std::move(centroids);
    return best;
}

} // namespace stagedtree
