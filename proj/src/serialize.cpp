#include "gmmltree/serialize.hpp"

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

json to_json(const TrainConfig& c) {
  return json{
      {"criterion", std::string(to_string(c.criterion))},
      {"oblique", c.oblique},
      {"mtry", c.mtry.str()},
      {"minleaf", c.minleaf},
      {"split_strategy", std::string(to_string(c.split_strategy))},
      {"window", c.window},
      {"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
      {"seed", c.seed},
  };
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.criterion = parse_tree_criterion(j.at("criterion").get<std::string>());
  c.oblique = j.at("oblique").get<bool>();
  c.mtry = Mtry::parse(j.at("mtry").get<std::string>());
  c.minleaf = j.at("minleaf").get<std::size_t>();
  c.split_strategy = parse_split_strategy(j.at("split_strategy").get<std::string>());
  c.window = j.value("window", kDefaultWindow);
  if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json to_json(const ForestConfig& c) {
  return json{
      {"n_trees", c.n_trees},     {"seed", c.seed},
      {"bootstrap", c.bootstrap}, {"subspaces", c.subspaces},
      {"tree_config", to_json(c.tree_config)},
  };
}

ForestConfig forest_config_from_json(const json& j) {
  ForestConfig c;
  c.n_trees = j.at("n_trees").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.bootstrap = j.at("bootstrap").get<bool>();
  c.subspaces = j.at("subspaces").get<bool>();
  c.tree_config = train_config_from_json(j.at("tree_config"));
  return c;
}

namespace {

json node_to_json(const Tree& tree, std::size_t k) {
  const TreeNode& node = tree.nodes[k];
  json out;
  if (node.leaf) {
    out["type"] = "leaf";
    out["label"] = node.label;
  } else if (const auto* axis = std::get_if<AxisSplit>(&node.split.test)) {
    out["type"] = "split";
    out["feature"] = axis->feature;
    out["threshold"] = axis->threshold;
  } else {
    const auto& ob = std::get<ObliqueSplit>(node.split.test);
    out["type"] = "oblique";
    out["weights"] = ob.weights;
    out["threshold"] = ob.threshold;
  }
  out["counts"] = {{"neg", node.counts.neg}, {"pos", node.counts.pos}};
  out["depth"] = node.depth;
  if (!node.leaf) {
    out["left"] = node_to_json(tree, static_cast<std::size_t>(node.left));
    out["right"] = node_to_json(tree, static_cast<std::size_t>(node.right));
  }
  return out;
}

// Rebuilds nodes in the same layout grow() produces (children allocated as a
// pair, left subtree filled first).
void node_from_json(const json& j, Tree& tree, std::size_t slot) {
  TreeNode node;
  const auto type = j.at("type").get<std::string>();
  node.counts.neg = j.at("counts").at("neg").get<std::size_t>();
  node.counts.pos = j.at("counts").at("pos").get<std::size_t>();
  node.depth = j.at("depth").get<std::size_t>();
  node.label = node.counts.majority();
  if (type == "leaf") {
    node.label = j.at("label").get<int>();
    if (node.label != -1 && node.label != 1) throw DataError("leaf label must be -1 or +1");
    tree.nodes[slot] = std::move(node);
    return;
  }
  if (type == "split") {
    const auto feature = j.at("feature").get<std::size_t>();
    if (feature >= tree.d) throw DataError(fmt::format("split feature {} out of range", feature));
    node.split.test = AxisSplit{feature, j.at("threshold").get<double>()};
  } else if (type == "oblique") {
    auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != tree.d) throw DataError("oblique weight vector has wrong length");
    node.split.test = ObliqueSplit{std::move(weights), j.at("threshold").get<double>()};
  } else {
    throw DataError(fmt::format("unknown node type '{}'", type));
  }
  node.leaf = false;
  node.left = static_cast<std::int32_t>(tree.nodes.size());
  node.right = node.left + 1;
  tree.nodes.emplace_back();
  tree.nodes.emplace_back();
  const auto left = static_cast<std::size_t>(node.left);
  const auto right = static_cast<std::size_t>(node.right);
  tree.nodes[slot] = std::move(node);
  // Matches the traversal order of grow(): right slot is reserved, the left
  // subtree is expanded, then the right subtree.
  node_from_json(j.at("left"), tree, left);
  node_from_json(j.at("right"), tree, right);
}

void check_header(const json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", std::string()) != format) {
    throw DataError(fmt::format("not a {} document", format));
  }
  if (doc.value("version", 0) != kModelVersion) {
    throw DataError(fmt::format("unsupported {} version", format));
  }
}

}  // namespace

json tree_to_json(const Tree& tree) {
  return json{
      {"format", kTreeFormat},
      {"version", kModelVersion},
      {"d", tree.d},
      {"classes", tree.class_names},
      {"config", to_json(tree.config)},
      {"stats",
       {{"node_count", tree.stats.node_count},
        {"leaf_count", tree.stats.leaf_count},
        {"max_depth", tree.stats.max_depth},
        {"train_time_ms", tree.stats.train_time_ms}}},
      {"root", node_to_json(tree, 0)},
  };
}

Tree tree_from_json(const json& doc) {
  try {
    check_header(doc, kTreeFormat);
    Tree tree;
    tree.d = doc.at("d").get<std::size_t>();
    tree.class_names = doc.at("classes").get<std::array<std::string, 2>>();
    tree.config = train_config_from_json(doc.at("config"));
    tree.nodes.resize(1);
    node_from_json(doc.at("root"), tree, 0);
    tree.stats = tree_stats(tree);
    tree.stats.train_time_ms = doc.at("stats").value("train_time_ms", 0.0);
    return tree;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed tree document: {}", e.what()));
  } catch (const ConfigError& e) {
    throw DataError(fmt::format("malformed tree document: {}", e.what()));
  }
}

json forest_to_json(const Forest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees) trees.push_back(tree_to_json(t));
  return json{
      {"format", kForestFormat},
      {"version", kModelVersion},
      {"d", forest.d},
      {"config", to_json(forest.config)},
      {"per_tree_seeds", forest.per_tree_seeds},
      {"train_time_ms", forest.train_time_ms},
      {"trees", std::move(trees)},
  };
}

Forest forest_from_json(const json& doc) {
  try {
    check_header(doc, kForestFormat);
    Forest f;
    f.d = doc.at("d").get<std::size_t>();
    f.config = forest_config_from_json(doc.at("config"));
    f.per_tree_seeds = doc.at("per_tree_seeds").get<std::vector<std::uint64_t>>();
    f.train_time_ms = doc.value("train_time_ms", 0.0);
    for (const auto& t : doc.at("trees")) f.trees.push_back(tree_from_json(t));
    if (f.trees.empty() || f.trees.size() != f.per_tree_seeds.size()) {
      throw DataError("forest document: tree and seed counts disagree");
    }
    for (const auto& t : f.trees) {
      if (t.d != f.d) throw DataError("forest document: trees disagree on d");
    }
    return f;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed forest document: {}", e.what()));
  } catch (const ConfigError& e) {
    throw DataError(fmt::format("malformed forest document: {}", e.what()));
  }
}

Model model_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("model is not valid JSON: {}", e.what()));
  }
  const auto format = doc.is_object() ? doc.value("format", std::string()) : std::string();
  if (format == kTreeFormat) return tree_from_json(doc);
  if (format == kForestFormat) return forest_from_json(doc);
  throw DataError("unknown model format");
}

std::string model_to_string(const Model& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Tree>) {
          return tree_to_json(m).dump(1);
        } else {
          return forest_to_json(m).dump(1);
        }
      },
      model);
}

}  // namespace gmmltree
