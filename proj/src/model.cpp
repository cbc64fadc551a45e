#include "stagedtree/model.hpp"

#include <cmath>
#include <string>

#include "stagedtree/error.hpp"

namespace stagedtree {

StagedTreeModel::StagedTreeModel(EventTree tree, Staging staging, Florets florets)
    : tree_(std::move(tree)), staging_(std::move(staging)), florets_(std::move(florets)) {
    staging_.check_against(tree_);
    if (florets_.size() != tree_.num_depths()) {
        throw ValidationError("florets cover " + std::to_string(florets_.size()) + " depths, tree has " +
                              std::to_string(tree_.num_depths()));
    }
    for (std::size_t d = 0; d < florets_.size(); ++d) {
        const auto& depth = staging_.depth(d);
        if (florets_[d].size() != depth.num_stages) {
            throw ValidationError("depth " + std::to_string(d) + " has " + std::to_string(depth.num_stages) +
                                  " stages but " + std::to_string(florets_[d].size()) + " florets");
        }
        for (std::size_t s = 0; s < florets_[d].size(); ++s) {
            const auto& floret = florets_[d][s];
            const std::string where = "floret of stage " + std::to_string(s) + " at depth " + std::to_string(d);
            if (floret.size() != tree_.cardinality(d)) {
                throw ValidationError(where + " has " + std::to_string(floret.size()) + " entries, expected " +
                                      std::to_string(tree_.cardinality(d)));
            }
            double sum = 0.0;
            for (double p : floret) {
                if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(where + " has an entry outside [0, 1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kFloretSumTolerance) {
                throw ValidationError(where + " sums to " + std::to_string(sum) + ", not 1");
            }
        }
    }
}

double atom_probability(const StagedTreeModel& model, const Outcome& outcome) {
    const auto& tree = model.tree();
    tree.check_outcome(outcome);
    double prob = 1.0;
    std::size_t vertex = 0;
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        prob *= model.vertex_floret(d, vertex)[outcome[d]];
        vertex = tree.child(d, vertex, outcome[d]);
    }
    return prob;
}

std::vector<double> joint_table(const StagedTreeModel& model, std::size_t cap) {
    const auto& tree = model.tree();
    if (tree.leaf_count() > cap) {
        throw ValidationError("joint table has " + std::to_string(tree.leaf_count()) + " atoms, above the cap of " +
                              std::to_string(cap));
    }
    // Path products, one depth at a time; the children of vertex v are
    // contiguous, so the next layer is written in index order.
    std::vector<double> layer{1.0};
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const std::size_t card = tree.cardinality(d);
        std::vector<double> next(layer.size() * card);
        for (std::size_t v = 0; v < layer.size(); ++v) {
            const auto& floret = model.vertex_floret(d, v);
            for (std::size_t l = 0; l < card; ++l) next[v * card + l] = layer[v] * floret[l];
        }
        layer = std::move(next);
    }
    return layer;
}

std::size_t free_parameter_count(const StagedTreeModel& model) {
    std::size_t count = 0;
    const auto& tree = model.tree();
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        count += model.staging().depth(d).num_observed_stages() * (tree.cardinality(d) - 1);
    }
    return count;
}

Florets uniform_florets(const EventTree& tree, const Staging& staging) {
    Florets florets(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const std::size_t card = tree.cardinality(d);
        florets[d].assign(staging.depth(d).num_stages, std::vector<double>(card, 1.0 / static_cast<double>(card)));
    }
    return florets;
}

} // namespace stagedtree
