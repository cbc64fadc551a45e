#ifndef STAGEDTREE_DATASET_HPP
#define STAGEDTREE_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stagedtree/event_tree.hpp"

namespace stagedtree {

/// Labelled records over named categorical variables. Each record holds one
/// level index per variable, in variable order.
class CategoricalDataset {
public:
    using Record = std::vector<std::size_t>;

    CategoricalDataset() = default;
    /// Throws ValidationError on out-of-range levels, ragged records, an
    /// unknown class column or duplicate variable names.
    CategoricalDataset(std::vector<VariableSpec> variables, std::vector<Record> records, std::string class_column);

    const std::vector<VariableSpec>& variables() const { return variables_; }
    const std::vector<Record>& records() const { return records_; }
    const std::string& class_column() const { return class_column_; }
    std::size_t class_index() const { return class_index_; }
    const VariableSpec& class_variable() const { return variables_[class_index_]; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    /// Feature names in column order (class excluded).
    std::vector<std::string> feature_names() const;
    const VariableSpec& variable(const std::string& name) const { return variables_[column(name)]; }

    /// Same variables, selected records.
    CategoricalDataset subset(const std::vector<std::size_t>& rows) const;

    /// Level labels of a record.
    std::vector<std::string> decode(const Record& record) const;
    /// Level indices of labelled cells given in variable order.
    Record encode(const std::vector<std::string>& labels) const;

    /// FNV-1a digest over variables, levels and records.
    std::uint64_t digest() const;

private:
    std::vector<VariableSpec> variables_;
    std::vector<Record> records_;
    std::string class_column_;
    std::size_t class_index_ = 0;
};

/// Optional pinned level orders, keyed by variable name.
using LevelOrder = std::map<std::string, std::vector<std::string>>;

/// Parses a levels sidecar: one CSV line per variable, the name followed by
/// its levels in order.
LevelOrder read_level_order(const std::filesystem::path& path);
LevelOrder parse_level_order(const std::string& text);

/// Loads a comma-separated file with a header row; quoted fields are allowed.
/// Every column is categorical. Levels follow first appearance unless pinned by
/// `level_order`. Throws ValidationError on a missing class column, empty
/// cells, zero records or a single-level column.
CategoricalDataset load_csv(const std::filesystem::path& path, const std::string& class_column,
                            const LevelOrder& level_order = {});
CategoricalDataset parse_csv(const std::string& text, const std::string& class_column,
                             const LevelOrder& level_order = {});

/// Splits one CSV line into fields (RFC 4180 quoting).
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

/// Writes the dataset as CSV with a header row.
std::string to_csv(const CategoricalDataset& dataset);

/// Seeded shuffle then prefix take; train size = round(fraction * N).
/// Throws ValidationError when the fraction is outside (0, 1) or a part ends
/// up empty.
std::pair<CategoricalDataset, CategoricalDataset> split(const CategoricalDataset& dataset, double train_fraction,
                                                        std::uint64_t seed);

/// Event tree with the dataset's class at the root and the named features in
/// order.
EventTree tree_for(const CategoricalDataset& dataset, const std::vector<std::string>& feature_order);

/// Maps dataset records onto an event tree's depth order. Levels are matched
/// by label, so a dataset loaded with a different level order still encodes
/// correctly. Throws ValidationError for a missing column or unknown label.
class RecordMapper {
public:
    RecordMapper(const EventTree& tree, const CategoricalDataset& dataset);
    Outcome outcome(const CategoricalDataset::Record& record) const;

private:
    std::vector<std::size_t> columns_;
    std::vector<std::vector<std::size_t>> level_maps_;
};

} // namespace stagedtree

#endif
