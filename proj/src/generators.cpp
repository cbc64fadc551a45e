#include "stagedtree/generators.hpp"

#include "stagedtree/error.hpp"
#include "stagedtree/rng.hpp"

namespace stagedtree {
namespace {

const std::vector<std::string> kSigns{"-1", "+1"};

// Level 1 is +1, so the parity of a record is the count of level-0 entries.
std::size_t parity_level(const std::vector<std::size_t>& levels, std::size_t count) {
    std::size_t negatives = 0;
    for (std::size_t i = 0; i < count; ++i) negatives += levels[i] == 0 ? 1 : 0;
    return negatives % 2 == 0 ? 1 : 0;
}

} // namespace

CategoricalDataset generate_parity(std::size_t n_features, std::size_t n_records, std::uint64_t seed) {
    if (n_features == 0) throw ValidationError("parity needs at least one feature");
    std::vector<VariableSpec> variables;
    for (std::size_t j = 1; j <= n_features; ++j) variables.emplace_back("X" + std::to_string(j), kSigns);
    variables.emplace_back("C", kSigns);
    Rng rng(seed);
    std::vector<CategoricalDataset::Record> records(n_records, CategoricalDataset::Record(n_features + 1));
    for (auto& record : records) {
        for (std::size_t j = 0; j < n_features; ++j) record[j] = rng.index(2);
        record[n_features] = parity_level(record, n_features);
    }
    return CategoricalDataset(std::move(variables), std::move(records), "C");
}

CategoricalDataset generate_parity_with_noise(std::size_t n_noise, std::size_t n_records, std::uint64_t seed) {
    std::vector<VariableSpec> variables{VariableSpec("X1", kSigns), VariableSpec("X2", kSigns)};
    for (std::size_t j = 1; j <= n_noise; ++j) variables.emplace_back("N" + std::to_string(j), kSigns);
    variables.emplace_back("C", kSigns);
    const std::size_t width = variables.size();
    Rng rng(seed);
    std::vector<CategoricalDataset::Record> records(n_records, CategoricalDataset::Record(width));
    for (auto& record : records) {
        for (std::size_t j = 0; j + 1 < width; ++j) record[j] = rng.index(2);
        record[width - 1] = parity_level(record, 2);
    }
    return CategoricalDataset(std::move(variables), std::move(records), "C");
}

CategoricalDataset sample_model(const StagedTreeModel& model, std::size_t n_records, std::uint64_t seed) {
    const auto& tree = model.tree();
    Rng rng(seed);
    std::vector<CategoricalDataset::Record> records(n_records, CategoricalDataset::Record(tree.num_depths()));
    for (auto& record : records) {
        std::size_t v = 0;
        for (std::size_t d = 0; d < tree.num_depths(); ++d) {
            record[d] = rng.categorical(model.vertex_floret(d, v));
            if (d + 1 < tree.num_depths()) v = tree.child(d, v, record[d]);
        }
    }
    return CategoricalDataset(tree.variables(), std::move(records), tree.class_variable().name());
}

} // namespace stagedtree
