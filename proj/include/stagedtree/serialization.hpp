#ifndef STAGEDTREE_SERIALIZATION_HPP
#define STAGEDTREE_SERIALIZATION_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "stagedtree/model.hpp"

namespace stagedtree {

inline constexpr int kModelFormatVersion = 1;

struct Provenance {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> flags;
    /// Hex digest of the training data, empty when unknown.
    std::string data_digest;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ModelFile {
    StagedTreeModel model;
    Provenance provenance;

    friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// JSON document; schema in docs/model-format.md.
std::string serialize_model(const ModelFile& file);
std::string serialize_model(const StagedTreeModel& model);

/// Throws FormatError on malformed JSON (naming the section that was cut
/// short), unknown versions or fields, and shape mismatches; ValidationError
/// when a floret is not a probability vector.
ModelFile deserialize_model(const std::string& text);

void write_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model(const std::filesystem::path& path);

} // namespace stagedtree

#endif
