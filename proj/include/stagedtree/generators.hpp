#ifndef STAGEDTREE_GENERATORS_HPP
#define STAGEDTREE_GENERATORS_HPP

#include <cstddef>
#include <cstdint>

#include "stagedtree/dataset.hpp"
#include "stagedtree/model.hpp"

namespace stagedtree {

/// Features X1..Xn i.i.d. uniform on {-1, +1}; class C = product of the
/// features. Levels are ordered ("-1", "+1").
CategoricalDataset generate_parity(std::size_t n_features, std::size_t n_records, std::uint64_t seed);

/// C = X1 * X2 with `n_noise` extra independent uniform features N1..Nk.
CategoricalDataset generate_parity_with_noise(std::size_t n_noise, std::size_t n_records, std::uint64_t seed);

/// Samples records from a staged tree model.
CategoricalDataset sample_model(const StagedTreeModel& model, std::size_t n_records, std::uint64_t seed);

} // namespace stagedtree

#endif
