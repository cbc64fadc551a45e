#ifndef STAGEDTREE_ESTIMATION_HPP
#define STAGEDTREE_ESTIMATION_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "stagedtree/model.hpp"
#include "stagedtree/staging.hpp"
#include "stagedtree/tree_counts.hpp"

namespace stagedtree {

/// Level counts aggregated per stage: counts[depth][stage][level].
struct StageCounts {
    std::vector<std::vector<std::vector<double>>> counts;

    double total(std::size_t depth, std::size_t stage) const;
};

StageCounts stage_counts(const TreeCounts& counts, const Staging& staging);

/// Moves every vertex with zero reach-count into its depth's unobserved stage.
/// Observed vertices keep their grouping and never enter it. A depth with no
/// unobserved vertex ends up without an unobserved stage.
Staging mark_unobserved(const Staging& staging, const TreeCounts& counts);

/// Observed stages get (count_l + smoothing) / (total + smoothing * L); the
/// unobserved stage gets the uniform vector. Throws std::logic_error for an
/// observed stage with no counts when smoothing is 0.
Florets fit_floret_probabilities(const StageCounts& counts, const Staging& staging, double smoothing = 0.0);

/// Shortcut: stage counts, florets and model in one go.
StagedTreeModel fit_model(const EventTree& tree, const Staging& staging, const TreeCounts& counts,
                          double smoothing = 0.0);

inline constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

/// Sum of count * ln(prob) over all edges, 0 ln 0 := 0. Returns
/// kNegativeInfinity when a positive count sits on a zero-probability edge.
double log_likelihood(const StagedTreeModel& model, const TreeCounts& counts);
double depth_log_likelihood(const StagedTreeModel& model, const TreeCounts& counts, std::size_t depth);

/// Log-likelihood contribution of one stage whose floret is fitted from
/// `level_counts` with the given smoothing.
double stage_log_likelihood(const std::vector<double>& level_counts, double smoothing);

struct ScoreValue {
    double log_likelihood = 0.0;
    std::size_t n_params = 0;
    std::uint64_t n_records = 0;
    /// log_likelihood - (n_params / 2) ln(n_records); higher is better.
    double score = 0.0;
};

ScoreValue make_score(double log_likelihood, std::size_t n_params, std::uint64_t n_records);

/// BIC in the maximization convention. Throws ValidationError for zero records.
ScoreValue bic_score(const StagedTreeModel& model, const TreeCounts& counts);

/// Score share of one depth; summing over depths gives bic_score().score.
double depth_bic_score(const StagedTreeModel& model, const TreeCounts& counts, std::size_t depth);

inline constexpr double kDefaultKlEpsilon = 1e-12;

/// KL(p||q) + KL(q||p) after flooring every entry at epsilon and renormalizing.
double symmetrized_kl(const std::vector<double>& p, const std::vector<double>& q,
                      double epsilon = kDefaultKlEpsilon);

/// Half the L1 distance.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

} // namespace stagedtree

#endif
