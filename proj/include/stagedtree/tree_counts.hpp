#ifndef STAGEDTREE_TREE_COUNTS_HPP
#define STAGEDTREE_TREE_COUNTS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stagedtree/dataset.hpp"
#include "stagedtree/event_tree.hpp"

namespace stagedtree {

/// Edge counts of the data along an event tree: for every depth, vertex and
/// level, the number of records whose prefix reaches the vertex and then
/// takes the level.
class TreeCounts {
public:
    TreeCounts() = default;
    explicit TreeCounts(const EventTree& tree);

    std::size_t num_depths() const { return counts_.size(); }
    std::uint64_t n_records() const { return n_records_; }

    std::uint64_t count(std::size_t depth, std::size_t vertex, std::size_t level) const {
        return counts_[depth][vertex * cardinalities_[depth] + level];
    }
    /// Records reaching the vertex.
    std::uint64_t reach(std::size_t depth, std::size_t vertex) const;
    std::size_t cardinality(std::size_t depth) const { return cardinalities_[depth]; }
    std::size_t vertex_count(std::size_t depth) const { return counts_[depth].size() / cardinalities_[depth]; }

    void add(const EventTree& tree, const Outcome& outcome, std::uint64_t weight = 1);

    friend bool operator==(const TreeCounts&, const TreeCounts&) = default;

private:
    std::vector<std::size_t> cardinalities_;
    std::vector<std::vector<std::uint64_t>> counts_;
    std::uint64_t n_records_ = 0;
};

/// Tabulates the dataset along the tree. The tree's variables are looked up
/// by name, so their order may differ from the file order. Throws
/// ValidationError when a tree variable is missing from the dataset.
TreeCounts tree_counts(const CategoricalDataset& dataset, const EventTree& tree);

} // namespace stagedtree

#endif
