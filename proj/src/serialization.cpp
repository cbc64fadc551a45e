#include "stagedtree/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "stagedtree/error.hpp"

namespace stagedtree {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "stagedtree-model";
const char* const kSections[] = {"format", "version", "variables", "stages", "provenance"};

void require_keys(const json& object, const std::set<std::string>& required, const std::set<std::string>& optional,
                  const std::string& where) {
    if (!object.is_object()) throw FormatError(where + " must be a JSON object");
    for (const auto& key : required) {
        if (!object.contains(key)) throw FormatError(where + " lacks field '" + key + "'");
    }
    for (const auto& [key, value] : object.items()) {
        if (!required.count(key) && !optional.count(key)) {
            throw FormatError(where + " has unknown field '" + key + "'");
        }
    }
}

// Names the top-level section in which a parse error at `offset` occurred.
std::string section_at(const std::string& text, std::size_t offset) {
    std::string section = "header";
    std::size_t best = 0;
    for (const char* name : kSections) {
        const std::string quoted = std::string("\"") + name + "\"";
        const auto pos = text.rfind(quoted, offset);
        if (pos != std::string::npos && pos >= best) {
            best = pos;
            section = name;
        }
    }
    return section;
}

template <typename T>
T get_as(const json& value, const std::string& where) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw FormatError(where + " has the wrong type");
    }
}

} // namespace

std::string serialize_model(const ModelFile& file) {
    const auto& model = file.model;
    const auto& tree = model.tree();
    json doc;
    doc["format"] = kFormatName;
    doc["version"] = kModelFormatVersion;
    doc["variables"] = json::array();
    for (const auto& var : tree.variables()) doc["variables"].push_back({{"name", var.name()}, {"levels", var.levels()}});
    doc["stages"] = json::array();
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const auto& ds = model.staging().depth(d);
        doc["stages"].push_back({{"depth", d},
                                 {"stage_of", ds.stage_of},
                                 {"unobserved", ds.unobserved ? json(*ds.unobserved) : json(nullptr)},
                                 {"florets", model.florets()[d]}});
    }
    doc["provenance"] = {{"algorithm", file.provenance.algorithm},
                         {"seed", file.provenance.seed},
                         {"flags", file.provenance.flags},
                         {"data_digest", file.provenance.data_digest}};
    return doc.dump(2) + "\n";
}

std::string serialize_model(const StagedTreeModel& model) { return serialize_model(ModelFile{model, {}}); }

ModelFile deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError("model file is malformed or truncated in section '" + section_at(text, e.byte) +
                          "': " + e.what());
    }
    require_keys(doc, {"format", "version", "variables", "stages"}, {"provenance"}, "model file");
    if (doc["format"] != kFormatName) throw FormatError("not a staged tree model file");
    if (!doc["version"].is_number_integer() || doc["version"].get<long long>() != kModelFormatVersion) {
        throw FormatError("unsupported model format version " + doc["version"].dump());
    }

    const auto& vars = doc["variables"];
    if (!vars.is_array() || vars.size() < 2) throw FormatError("'variables' must list the class and at least one feature");
    std::vector<VariableSpec> specs;
    for (const auto& var : vars) {
        require_keys(var, {"name", "levels"}, {}, "variable entry");
        specs.emplace_back(get_as<std::string>(var["name"], "variable name"),
                           get_as<std::vector<std::string>>(var["levels"], "variable levels"));
    }
    const VariableSpec class_var = specs.front();
    const EventTree tree = build_event_tree(class_var, std::vector<VariableSpec>(specs.begin() + 1, specs.end()));

    const auto& stages = doc["stages"];
    if (!stages.is_array() || stages.size() != tree.num_depths()) {
        throw FormatError("'stages' must hold one entry per depth");
    }
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    std::vector<std::optional<std::size_t>> unobserved(tree.num_depths());
    Florets florets(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const auto& entry = stages[d];
        const std::string where = "stages[" + std::to_string(d) + "]";
        require_keys(entry, {"depth", "stage_of", "unobserved", "florets"}, {}, where);
        if (get_as<std::size_t>(entry["depth"], where + ".depth") != d) throw FormatError(where + " is out of order");
        labels[d] = get_as<std::vector<std::size_t>>(entry["stage_of"], where + ".stage_of");
        if (!entry["unobserved"].is_null()) unobserved[d] = get_as<std::size_t>(entry["unobserved"], where + ".unobserved");
        florets[d] = get_as<std::vector<std::vector<double>>>(entry["florets"], where + ".florets");
    }
    const Staging staging = Staging::from_labels(tree, labels, unobserved);
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        if (staging.depth(d).stage_of != labels[d] || staging.depth(d).unobserved != unobserved[d]) {
            throw FormatError("stage ids of depth " + std::to_string(d) + " are not canonical");
        }
    }

    ModelFile file{StagedTreeModel(tree, staging, std::move(florets)), {}};
    if (doc.contains("provenance")) {
        const auto& prov = doc["provenance"];
        require_keys(prov, {"algorithm", "seed", "flags", "data_digest"}, {}, "provenance");
        file.provenance.algorithm = get_as<std::string>(prov["algorithm"], "provenance.algorithm");
        file.provenance.seed = get_as<std::uint64_t>(prov["seed"], "provenance.seed");
        file.provenance.flags = get_as<std::map<std::string, std::string>>(prov["flags"], "provenance.flags");
        file.provenance.data_digest = get_as<std::string>(prov["data_digest"], "provenance.data_digest");
    }
    return file;
}

void write_model(const std::filesystem::path& path, const ModelFile& file) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file " + path.string());
    out << serialize_model(file);
    if (!out) throw ValidationError("failed writing model file " + path.string());
}

ModelFile read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

} // namespace stagedtree
