#include "stagedtree/tree_counts.hpp"

namespace stagedtree {

TreeCounts::TreeCounts(const EventTree& tree) {
    cardinalities_.reserve(tree.num_depths());
    counts_.reserve(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        cardinalities_.push_back(tree.cardinality(d));
        counts_.emplace_back(tree.vertex_count(d) * tree.cardinality(d), 0);
    }
}

std::uint64_t TreeCounts::reach(std::size_t depth, std::size_t vertex) const {
    const std::size_t card = cardinalities_[depth];
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < card; ++l) total += counts_[depth][vertex * card + l];
    return total;
}

void TreeCounts::add(const EventTree& tree, const Outcome& outcome, std::uint64_t weight) {
    std::size_t vertex = 0;
    for (std::size_t d = 0; d < counts_.size(); ++d) {
        counts_[d][vertex * cardinalities_[d] + outcome[d]] += weight;
        vertex = tree.child(d, vertex, outcome[d]);
    }
    n_records_ += weight;
}

TreeCounts tree_counts(const CategoricalDataset& dataset, const EventTree& tree) {
    RecordMapper mapper(tree, dataset);
    TreeCounts counts(tree);
    for (const auto& record : dataset.records()) counts.add(tree, mapper.outcome(record));
    return counts;
}

} // namespace stagedtree
