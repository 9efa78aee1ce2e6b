#pragma once

#include <string>
#include <variant>

#include "json.hpp"

#include "gmmltree/forest.hpp"
#include "gmmltree/tree.hpp"

namespace gmmltree {

using json = nlohmann::json;

inline constexpr const char* kTreeFormat = "gmmltree-tree";
inline constexpr const char* kForestFormat = "gmmltree-forest";
inline constexpr int kModelVersion = 1;

json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const json& j);

json to_json(const ForestConfig& config);
ForestConfig forest_config_from_json(const json& j);

// Tree document: {"format", "version", "d", "classes", "config", "stats",
// "root"} where each node is {"type": "leaf"|"split"|"oblique", "feature" or
// "weights", "threshold", "label", "counts", "depth", "left", "right"}.
// Doubles are written in shortest round-trip form, so a reload reproduces
// every threshold and weight bit for bit.
json tree_to_json(const Tree& tree);
Tree tree_from_json(const json& doc);

// Forest document: config, per-tree seeds and an array of tree documents.
json forest_to_json(const Forest& forest);
Forest forest_from_json(const json& doc);

using Model = std::variant<Tree, Forest>;

// Parses either document kind. Throws DataError on malformed input.
Model model_from_string(const std::string& text);
std::string model_to_string(const Model& model);

}  // namespace gmmltree
