#ifndef STAGEDTREE_ORDERING_HPP
#define STAGEDTREE_ORDERING_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "stagedtree/dataset.hpp"

namespace stagedtree {

/// Greedy feature order and the conditional mutual information (nats) of each
/// chosen feature at the step it was chosen.
struct OrderingResult {
    std::vector<std::string> order;
    std::vector<double> scores;
};

/// Largest joint table (conditioning cells x |X| x |C|) the estimator will
/// allocate before refusing.
inline constexpr std::size_t kDefaultCmiCellCap = std::size_t{1} << 26;

/// Plug-in estimate of I(X; C | given) in nats from empirical frequencies,
/// each joint cell padded by `smoothing` pseudo-counts. 0 ln 0 := 0 and
/// conditioning cells without mass contribute nothing.
double conditional_mutual_information(const CategoricalDataset& dataset, const std::string& x, const std::string& c,
                                      const std::vector<std::string>& given, double smoothing = 0.0,
                                      std::size_t cell_cap = kDefaultCmiCellCap);

/// Repeatedly picks the feature with the largest CMI with the class given the
/// features already picked. Exact ties (within 1e-12) go to the earlier column.
OrderingResult cmi_order(const CategoricalDataset& dataset, double smoothing = 0.0,
                         std::size_t cell_cap = kDefaultCmiCellCap);

} // namespace stagedtree

#endif
