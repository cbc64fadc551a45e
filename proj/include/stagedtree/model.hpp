#ifndef STAGEDTREE_MODEL_HPP
#define STAGEDTREE_MODEL_HPP

#include <cstddef>
#include <vector>

#include "stagedtree/event_tree.hpp"
#include "stagedtree/staging.hpp"

namespace stagedtree {

/// Floret probability vectors: florets[depth][stage][level].
using Florets = std::vector<std::vector<std::vector<double>>>;

/// Tolerance on the sum of a floret vector.
inline constexpr double kFloretSumTolerance = 1e-12;

/// Event tree + staging + one probability vector per stage. Immutable.
/// Entries lie in the closed interval [0, 1].
class StagedTreeModel {
public:
    StagedTreeModel() = default;
    /// Throws ValidationError when shapes disagree or a floret is not a
    /// probability vector.
    StagedTreeModel(EventTree tree, Staging staging, Florets florets);

    const EventTree& tree() const { return tree_; }
    const Staging& staging() const { return staging_; }
    const Florets& florets() const { return florets_; }

    const std::vector<double>& floret(std::size_t depth, std::size_t stage) const {
        return florets_[depth][stage];
    }
    /// Floret of the vertex, through its stage.
    const std::vector<double>& vertex_floret(std::size_t depth, std::size_t vertex) const {
        return florets_[depth][staging_.stage(depth, vertex)];
    }

    friend bool operator==(const StagedTreeModel&, const StagedTreeModel&) = default;

private:
    EventTree tree_;
    Staging staging_;
    Florets florets_;
};

/// Product of floret entries along the root-to-leaf path of the outcome.
double atom_probability(const StagedTreeModel& model, const Outcome& outcome);

inline constexpr std::size_t kDefaultJointTableCap = 10'000'000;

/// Probabilities of all atoms, indexed by leaf index. Throws ValidationError
/// when the tree has more than `cap` leaves.
std::vector<double> joint_table(const StagedTreeModel& model, std::size_t cap = kDefaultJointTableCap);

/// Sum over depths and observed stages of (|X_d| - 1).
std::size_t free_parameter_count(const StagedTreeModel& model);

/// Uniform florets for every stage; handy for tests and as a fitting seed.
Florets uniform_florets(const EventTree& tree, const Staging& staging);

} // namespace stagedtree

#endif
