#ifndef LUMPKIT_MODEL_HPP
#define LUMPKIT_MODEL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lumpkit/chain.hpp"
#include "lumpkit/lumping.hpp"

namespace lumpkit {

struct ModelOptions {
    bool allow_trivial_lumping = false;
    bool exact_zero_mode = false;
    bool allow_periodic = false;
};

/// A chain together with its lumping, as read from a model file.
///
/// Model files are JSON objects:
///
///   {
///     "name": "optional",
///     "states": ["a", "b", ...],
///     "transition_matrix": [[0.5, "1/2"], ...],
///     "lumping": {"a": "A", "b": "B", ...},
///     "initial": [ ... ],                      (optional)
///     "options": {"allow_trivial_lumping": false,
///                 "exact_zero_mode": false,
///                 "allow_periodic": false}     (optional)
///   }
///
/// Matrix and initial entries are numbers or strings. Strings hold exact
/// fractions ("3/32") or decimals ("0.125"); a row written entirely as
/// strings must sum to exactly one.
struct Model {
    std::string name;
    MarkovChain chain;
    Lumping lumping;
    ModelOptions options;
    // entries as written in the file, used for edge labels
    std::vector<std::vector<std::string>> entry_text;
};

struct ModelOverrides {
    bool allow_trivial_lumping = false;
};

/// Throws Error(ParseError) for malformed JSON or wrong field types and
/// Error(ValidationError) when the content does not form a valid chain and
/// lumping; messages name the offending field.
Model parse_model(const nlohmann::json& doc, const ModelOverrides& overrides = {});
Model parse_model_text(const std::string& text, const ModelOverrides& overrides = {});
Model parse_model_file(const std::filesystem::path& path, const ModelOverrides& overrides = {});

/// Builds a model from an already validated chain and lumping; entries are
/// labelled by their shortest round-trip decimal form.
Model make_model(std::string name, MarkovChain chain, Lumping lumping, ModelOptions options = {});

nlohmann::json model_to_json(const Model& model);

/// Graphviz description: one cluster per block drawn in red, one labelled
/// edge per positive transition. Output depends only on the model.
std::string export_dot(const Model& model);

} // namespace lumpkit

#endif
