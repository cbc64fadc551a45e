#ifndef STAGEDTREE_LEARNING_HPP
#define STAGEDTREE_LEARNING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stagedtree/clustering.hpp"
#include "stagedtree/estimation.hpp"
#include "stagedtree/model.hpp"
#include "stagedtree/tree_counts.hpp"

namespace stagedtree {

enum class Algorithm { Full, Indep, HcIndep, HcFull, Bhc, Fbhc, Bj, NaiveHc, NaiveKm };

const char* to_string(Algorithm algorithm);
/// Accepts the CLI names: full, indep, hc_indep, hc_full, bhc, fbhc, bj,
/// naive_hc, naive_km.
Algorithm parse_algorithm(const std::string& name);
/// True for the algorithms whose trace records BIC improvements.
bool is_score_driven(Algorithm algorithm);

struct LearnConfig {
    Algorithm algorithm = Algorithm::Fbhc;
    /// Backward joining threshold on the symmetrized KL (sum of both directions).
    double kl_threshold = 0.01;
    double kl_epsilon = kDefaultKlEpsilon;
    /// Depths beyond this keep their starting staging (hc and bhc searches).
    std::optional<std::size_t> max_search_depth;
    std::uint64_t seed = 0;
    double smoothing = 0.0;
    std::size_t kmeans_restarts = 10;
    Linkage linkage = Linkage::Average;
    Distance hclust_distance = Distance::TotalVariation;

    /// Throws ValidationError when a field is out of range.
    void validate() const;
};

struct SearchStep {
    std::string move;
    double score_before = 0.0;
    double score_after = 0.0;
    /// Divergence of the merged pair (backward joining only).
    std::optional<double> divergence;
};

struct SearchTrace {
    std::vector<SearchStep> steps;
    std::vector<std::string> notes;
    double initial_score = 0.0;
    double final_score = 0.0;
    double wall_seconds = 0.0;
};

struct LearnResult {
    StagedTreeModel model;
    SearchTrace trace;
};

enum class BaselineMode { Full, Indep };
enum class HillClimbDirection { Free, JoinOnly };

/// Full: one stage per observed vertex. Indep: one stage per depth. In both,
/// unobserved vertices are collected into the unobserved stage.
StagedTreeModel learn_baseline(const EventTree& tree, const TreeCounts& counts, BaselineMode mode,
                               double smoothing = 0.0);

/// Greedy BIC ascent from `start`.
///
/// Free moves reassign one observed vertex to another observed stage of its
/// depth or to a fresh stage. Join-only moves merge two observed stages of a
/// depth. Each iteration applies the best move, or with `first_improvement`
/// the first improving one in (depth, stage, stage) order. The search stops
/// when no move improves the score. Depths above `max_search_depth` are left
/// as in `start`.
LearnResult hill_climb(const StagedTreeModel& start, const TreeCounts& counts, HillClimbDirection direction,
                       bool first_improvement, std::optional<std::size_t> max_search_depth,
                       double smoothing = 0.0);

/// Repeatedly merges, within each depth, the pair of observed stages with the
/// smallest symmetrized KL between their fitted florets while that value is
/// below `threshold`. A threshold of +infinity collapses every depth.
LearnResult backward_join(const StagedTreeModel& start, const TreeCounts& counts, double threshold,
                          double smoothing = 0.0, double kl_epsilon = kDefaultKlEpsilon,
                          std::optional<std::size_t> max_search_depth = std::nullopt);

enum class NaiveMethod { HClust, KMeans };

/// Naive staged tree: at each feature depth the distinct empirical florets of
/// observed vertices are clustered into at most |C| stages.
LearnResult learn_naive(const EventTree& tree, const TreeCounts& counts, NaiveMethod method, double smoothing = 0.0,
                        std::uint64_t seed = 0, std::size_t restarts = 10, Linkage linkage = Linkage::Average,
                        Distance distance = Distance::TotalVariation);

/// Runs the configured algorithm end to end on the counts of a tree.
LearnResult learn(const EventTree& tree, const TreeCounts& counts, const LearnConfig& config);

} // namespace stagedtree

#endif
