#include "stagedtree/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stagedtree/error.hpp"
#include "stagedtree/rng.hpp"

namespace stagedtree {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Splits CSV text into rows of fields. Quoted fields may hold commas, quotes
// (doubled) and line breaks.
std::vector<std::vector<std::string>> parse_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };

    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            end_row();
        } else if (ch == '\r') {
            // dropped; \r\n endings
        } else {
            field += ch;
            field_started = true;
        }
    }
    if (quoted) throw ValidationError("unterminated quoted field in CSV input");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

void hash_bytes(std::uint64_t& h, const std::string& bytes) {
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
}

} // namespace

CategoricalDataset::CategoricalDataset(std::vector<VariableSpec> variables, std::vector<Record> records,
                                       std::string class_column)
    : variables_(std::move(variables)), records_(std::move(records)), class_column_(std::move(class_column)) {
    std::set<std::string> names;
    bool found = false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (!names.insert(variables_[i].name()).second) {
            throw ValidationError("duplicate column '" + variables_[i].name() + "'");
        }
        if (variables_[i].name() == class_column_) {
            class_index_ = i;
            found = true;
        }
    }
    if (!found) throw ValidationError("class column '" + class_column_ + "' not found");
    for (std::size_t r = 0; r < records_.size(); ++r) {
        const auto& record = records_[r];
        if (record.size() != variables_.size()) {
            throw ValidationError("record " + std::to_string(r) + " has " + std::to_string(record.size()) +
                                  " values, expected " + std::to_string(variables_.size()));
        }
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (record[i] >= variables_[i].cardinality()) {
                throw ValidationError("record " + std::to_string(r) + " has an invalid level for '" +
                                      variables_[i].name() + "'");
            }
        }
    }
}

std::size_t CategoricalDataset::column(const std::string& name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name() == name) return i;
    }
    throw ValidationError("unknown variable '" + name + "'");
}

bool CategoricalDataset::has_column(const std::string& name) const {
    for (const auto& var : variables_) {
        if (var.name() == name) return true;
    }
    return false;
}

std::vector<std::string> CategoricalDataset::feature_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (i != class_index_) names.push_back(variables_[i].name());
    }
    return names;
}

CategoricalDataset CategoricalDataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<Record> records;
    records.reserve(rows.size());
    for (auto r : rows) records.push_back(records_.at(r));
    return CategoricalDataset(variables_, std::move(records), class_column_);
}

std::vector<std::string> CategoricalDataset::decode(const Record& record) const {
    std::vector<std::string> labels;
    labels.reserve(record.size());
    for (std::size_t i = 0; i < record.size(); ++i) labels.push_back(variables_.at(i).level(record[i]));
    return labels;
}

CategoricalDataset::Record CategoricalDataset::encode(const std::vector<std::string>& labels) const {
    if (labels.size() != variables_.size()) throw ValidationError("wrong number of cells to encode");
    Record record(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) record[i] = variables_[i].level_index(labels[i]);
    return record;
}

std::uint64_t CategoricalDataset::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_bytes(h, class_column_);
    for (const auto& var : variables_) {
        hash_bytes(h, var.name());
        for (const auto& level : var.levels()) hash_bytes(h, level);
    }
    for (const auto& record : records_) {
        for (auto level : record) hash_bytes(h, std::to_string(level));
    }
    return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    auto rows = parse_rows(line);
    if (rows.empty()) return {};
    return rows.front();
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

LevelOrder parse_level_order(const std::string& text) {
    LevelOrder order;
    for (const auto& row : parse_rows(text)) {
        if (row.size() < 2) throw ValidationError("level order line for '" + row.front() + "' lists no levels");
        if (!order.emplace(row.front(), std::vector<std::string>(row.begin() + 1, row.end())).second) {
            throw ValidationError("level order lists '" + row.front() + "' twice");
        }
    }
    return order;
}

LevelOrder read_level_order(const std::filesystem::path& path) { return parse_level_order(read_file(path)); }

CategoricalDataset parse_csv(const std::string& text, const std::string& class_column, const LevelOrder& level_order) {
    auto rows = parse_rows(text);
    if (rows.empty()) throw ValidationError("CSV input has no header row");
    const auto header = rows.front();
    const std::size_t n_cols = header.size();
    if (rows.size() == 1) throw ValidationError("CSV input has no records");

    std::vector<std::vector<std::string>> levels(n_cols);
    std::vector<bool> pinned(n_cols, false);
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (auto it = level_order.find(header[c]); it != level_order.end()) {
            levels[c] = it->second;
            pinned[c] = true;
        }
    }
    bool has_class = false;
    for (const auto& name : header) has_class = has_class || name == class_column;
    if (!has_class) throw ValidationError("class column '" + class_column + "' not found in header");

    std::vector<CategoricalDataset::Record> records;
    records.reserve(rows.size() - 1);
    std::vector<std::map<std::string, std::size_t>> lookup(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        for (std::size_t l = 0; l < levels[c].size(); ++l) lookup[c].emplace(levels[c][l], l);
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != n_cols) {
            throw ValidationError("line " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                  " fields, header has " + std::to_string(n_cols));
        }
        CategoricalDataset::Record record(n_cols);
        for (std::size_t c = 0; c < n_cols; ++c) {
            const auto& cell = row[c];
            if (cell.empty()) {
                throw ValidationError("empty cell in column '" + header[c] + "' on line " + std::to_string(r + 1) +
                                      "; missing values are not supported");
            }
            auto it = lookup[c].find(cell);
            if (it == lookup[c].end()) {
                if (pinned[c]) {
                    throw ValidationError("level '" + cell + "' of column '" + header[c] +
                                          "' is not in the pinned level order");
                }
                it = lookup[c].emplace(cell, levels[c].size()).first;
                levels[c].push_back(cell);
            }
            record[c] = it->second;
        }
        records.push_back(std::move(record));
    }

    std::vector<VariableSpec> variables;
    variables.reserve(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (levels[c].size() < 2) {
            throw ValidationError("column '" + header[c] + "' has a single level");
        }
        variables.emplace_back(header[c], levels[c]);
    }
    return CategoricalDataset(std::move(variables), std::move(records), class_column);
}

CategoricalDataset load_csv(const std::filesystem::path& path, const std::string& class_column,
                            const LevelOrder& level_order) {
    return parse_csv(read_file(path), class_column, level_order);
}

std::string to_csv(const CategoricalDataset& dataset) {
    std::string out;
    const auto& vars = dataset.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(vars[i].name());
    }
    out += '\n';
    for (const auto& record : dataset.records()) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(vars[i].level(record[i]));
        }
        out += '\n';
    }
    return out;
}

std::pair<CategoricalDataset, CategoricalDataset> split(const CategoricalDataset& dataset, double train_fraction,
                                                        std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train fraction must lie in (0, 1)");
    }
    const std::size_t n = dataset.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw ValidationError("split of " + std::to_string(n) + " records leaves an empty part");
    }
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    Rng rng(seed);
    rng.shuffle(rows);
    std::vector<std::size_t> train(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    return {dataset.subset(train), dataset.subset(test)};
}

EventTree tree_for(const CategoricalDataset& dataset, const std::vector<std::string>& feature_order) {
    std::vector<VariableSpec> features;
    features.reserve(feature_order.size());
    for (const auto& name : feature_order) {
        if (name == dataset.class_column()) throw ValidationError("the class cannot also be a feature");
        features.push_back(dataset.variable(name));
    }
    return build_event_tree(dataset.class_variable(), std::move(features));
}

RecordMapper::RecordMapper(const EventTree& tree, const CategoricalDataset& dataset) {
    for (const auto& var : tree.variables()) {
        if (!dataset.has_column(var.name())) {
            throw ValidationError("variable '" + var.name() + "' is missing from the data");
        }
        const std::size_t col = dataset.column(var.name());
        columns_.push_back(col);
        const auto& data_var = dataset.variables()[col];
        std::vector<std::size_t> map(data_var.cardinality());
        for (std::size_t l = 0; l < data_var.cardinality(); ++l) {
            auto index = var.find_level(data_var.level(l));
            if (!index) {
                throw ValidationError("level '" + data_var.level(l) + "' of '" + var.name() +
                                      "' is unknown to the model");
            }
            map[l] = *index;
        }
        level_maps_.push_back(std::move(map));
    }
}

Outcome RecordMapper::outcome(const CategoricalDataset::Record& record) const {
    Outcome out(columns_.size());
    for (std::size_t d = 0; d < columns_.size(); ++d) out[d] = level_maps_[d][record[columns_[d]]];
    return out;
}

} // namespace stagedtree
