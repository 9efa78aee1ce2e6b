#include "gmmltree/tree.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <numeric>

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

std::string_view to_string(TreeCriterion c) noexcept {
  switch (c) {
    case TreeCriterion::dgmml:
      return "dgmml";
    case TreeCriterion::info_gain:
      return "info_gain";
    case TreeCriterion::gain_ratio:
      return "gain_ratio";
    case TreeCriterion::gini:
      return "gini";
    case TreeCriterion::ihd:
      return "ihd";
  }
  return "?";
}

TreeCriterion parse_tree_criterion(std::string_view text) {
  for (auto c : {TreeCriterion::dgmml, TreeCriterion::info_gain, TreeCriterion::gain_ratio,
                 TreeCriterion::gini, TreeCriterion::ihd}) {
    if (text == to_string(c)) return c;
  }
  throw ConfigError(fmt::format(
      "unknown criterion '{}' (expected dgmml, info_gain, gain_ratio, gini or ihd)", text));
}

SplitStrategy parse_split_strategy(std::string_view text) {
  for (auto s : {SplitStrategy::closest_means, SplitStrategy::median, SplitStrategy::mean}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError(fmt::format(
      "unknown split strategy '{}' (expected closest_means, median or mean)", text));
}

Mtry Mtry::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "sqrt") return sqrt();
  std::size_t m = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), m);
  if (ec != std::errc() || ptr != text.data() + text.size() || m == 0) {
    throw ConfigError(fmt::format("invalid mtry '{}' (expected all, sqrt or a count >= 1)", text));
  }
  return fixed(m);
}

std::size_t Mtry::resolve(std::size_t d) const {
  switch (kind) {
    case Kind::all:
      return d;
    case Kind::sqrt:
      return sqrt_mtry(d);
    case Kind::fixed:
      if (value < 1 || value > d) {
        throw ConfigError(fmt::format("mtry must be in [1, {}], got {}", d, value));
      }
      return value;
  }
  return d;
}

std::string Mtry::str() const {
  switch (kind) {
    case Kind::all:
      return "all";
    case Kind::sqrt:
      return "sqrt";
    case Kind::fixed:
      return std::to_string(value);
  }
  return "?";
}

void TrainConfig::validate(std::size_t d) const {
  if (oblique && criterion != TreeCriterion::dgmml) {
    throw ConfigError("oblique splits are only available with the dgmml criterion");
  }
  if (minleaf < 1) throw ConfigError("minleaf must be >= 1");
  if (window < 1) throw ConfigError("split window must be >= 1");
  mtry.resolve(d);
}

// ---- split tests ----------------------------------------------------------------

double SplitSpec::threshold() const noexcept {
  return std::visit([](const auto& t) { return t.threshold; }, test);
}

// Both overloads sum w_j * x_j in ascending j and skip zero weights, so a row
// projects to the same bits at training and at prediction time.
double SplitSpec::value(const Dataset& ds, std::size_t i) const noexcept {
  if (const auto* axis = std::get_if<AxisSplit>(&test)) return ds.value(i, axis->feature);
  const auto& w = std::get<ObliqueSplit>(test).weights;
  double p = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) p += w[j] * ds.value(i, j);
  }
  return p;
}

double SplitSpec::value(std::span<const double> x) const noexcept {
  if (const auto* axis = std::get_if<AxisSplit>(&test)) return x[axis->feature];
  const auto& w = std::get<ObliqueSplit>(test).weights;
  double p = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) p += w[j] * x[j];
  }
  return p;
}

Partition partition(const NodeView& node, const SplitSpec& split) {
  Partition out;
  const Dataset& ds = node.dataset();
  if (const auto* axis = std::get_if<AxisSplit>(&split.test)) {
    const auto col = ds.column(axis->feature);
    for (std::size_t i : node.indices()) {
      (col[i] <= axis->threshold ? out.left : out.right).push_back(i);
    }
    return out;
  }
  for (std::size_t i : node.indices()) {
    (split.goes_left(ds, i) ? out.left : out.right).push_back(i);
  }
  return out;
}

SplitSpec fit_oblique_node(const NodeView& node, std::span<const std::size_t> candidates,
                           SplitStrategy strategy, std::size_t window) {
  const Dataset& ds = node.dataset();
  const FeatureWeights fw = gmml_weights(node, candidates).weights;

  double max_finite = 0.0;
  bool any_nonzero = false;
  for (double w : fw.weights) {
    if (w != kWeightMax) max_finite = std::max(max_finite, w);
    any_nonzero = any_nonzero || w > 0.0;
  }
  if (!any_nonzero) throw DegenerateError("all candidate weights are zero");
  const double clamp = max_finite > 0.0 ? 10.0 * max_finite : 1.0;

  ObliqueSplit ob;
  ob.weights.assign(ds.d(), 0.0);
  for (std::size_t c = 0; c < fw.weights.size(); ++c) {
    const double w = fw.weights[c] == kWeightMax ? clamp : fw.weights[c];
    ob.weights[fw.candidate_indices[c]] = w;
  }
  SplitSpec spec{ob};

  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i : node.indices()) {
    (ds.label(i) > 0 ? pos : neg).push_back(spec.value(ds, i));
  }
  std::get<ObliqueSplit>(spec.test).threshold = split_point(pos, neg, strategy, window);
  return spec;
}

// ---- induction ------------------------------------------------------------------

namespace {

Criterion exhaustive_criterion(TreeCriterion c) {
  switch (c) {
    case TreeCriterion::info_gain:
      return Criterion::info_gain;
    case TreeCriterion::gain_ratio:
      return Criterion::gain_ratio;
    case TreeCriterion::gini:
      return Criterion::gini_reduction;
    case TreeCriterion::ihd:
      return Criterion::ihd;
    case TreeCriterion::dgmml:
      break;
  }
  throw ContractError("dgmml has no exhaustive criterion");
}

struct ChosenSplit {
  SplitSpec split;
  Partition parts;
};

class Grower {
 public:
  Grower(const TrainConfig& config, std::size_t d)
      : config_(config), d_(d), mtry_(config.mtry.resolve(d)), rng_(config.seed) {
    all_features_.resize(d);
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> run(const NodeView& root) {
    struct Task {
      std::vector<std::size_t> indices;
      std::size_t slot;
      std::size_t depth;
    };
    std::vector<TreeNode> nodes(1);
    std::vector<Task> stack;
    stack.push_back({std::vector<std::size_t>(root.indices().begin(), root.indices().end()), 0, 0});
    const Dataset& ds = root.dataset();

    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      NodeView view(ds, std::move(task.indices));

      TreeNode node;
      node.counts = count_classes(view);
      node.label = node.counts.majority();
      node.depth = task.depth;

      std::optional<ChosenSplit> chosen;
      const bool can_split = !node.counts.pure() && view.size() >= 2 * config_.minleaf &&
                             (!config_.max_depth || task.depth < *config_.max_depth);
      if (can_split) chosen = choose(view);

      if (!chosen) {
        nodes[task.slot] = std::move(node);
        continue;
      }
      node.leaf = false;
      node.split = std::move(chosen->split);
      node.left = static_cast<std::int32_t>(nodes.size());
      node.right = node.left + 1;
      nodes.emplace_back();
      nodes.emplace_back();
      // Right pushed first so the left subtree is grown first.
      stack.push_back({std::move(chosen->parts.right), static_cast<std::size_t>(node.right),
                       task.depth + 1});
      stack.push_back({std::move(chosen->parts.left), static_cast<std::size_t>(node.left),
                       task.depth + 1});
      nodes[task.slot] = std::move(node);
    }
    return nodes;
  }

 private:
  std::vector<std::size_t> candidates() {
    if (mtry_ == d_) return all_features_;
    return subsample_features(d_, mtry_, rng_);
  }

  bool acceptable(const Partition& p) const {
    return p.left.size() >= config_.minleaf && p.right.size() >= config_.minleaf;
  }

  std::optional<ChosenSplit> choose(const NodeView& view) {
    const auto cand = candidates();
    if (config_.criterion != TreeCriterion::dgmml) {
      try {
        const SplitScore s = best_exhaustive_split(view, cand, exhaustive_criterion(config_.criterion),
                                                   config_.minleaf);
        SplitSpec spec{AxisSplit{s.feature, s.threshold}};
        Partition parts = partition(view, spec);
        if (!acceptable(parts)) return std::nullopt;
        return ChosenSplit{std::move(spec), std::move(parts)};
      } catch (const NoValidSplitError&) {
        return std::nullopt;
      }
    }
    if (config_.oblique) {
      try {
        SplitSpec spec = fit_oblique_node(view, cand, config_.split_strategy, config_.window);
        Partition parts = partition(view, spec);
        if (acceptable(parts)) return ChosenSplit{std::move(spec), std::move(parts)};
      } catch (const DegenerateError&) {
        return std::nullopt;
      }
    }
    return choose_axis_dgmml(view, cand);
  }

  // Top-weighted feature first; when its threshold leaves a child under
  // minleaf, the next-ranked candidate is tried. Zero weights end the chain.
  std::optional<ChosenSplit> choose_axis_dgmml(const NodeView& view,
                                               const std::vector<std::size_t>& cand) {
    const FeatureWeights fw = gmml_weights(view, cand).weights;
    const Dataset& ds = view.dataset();
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t p : rank_features(fw)) {
      if (fw.weights[p] <= 0.0) break;
      const std::size_t j = fw.candidate_indices[p];
      pos.clear();
      neg.clear();
      const auto col = ds.column(j);
      for (std::size_t i : view.indices()) (ds.label(i) > 0 ? pos : neg).push_back(col[i]);
      const double b = split_point(pos, neg, config_.split_strategy, config_.window);
      SplitSpec spec{AxisSplit{j, b}};
      Partition parts = partition(view, spec);
      if (acceptable(parts)) return ChosenSplit{std::move(spec), std::move(parts)};
    }
    return std::nullopt;
  }

  const TrainConfig& config_;
  std::size_t d_;
  std::size_t mtry_;
  Rng rng_;
  std::vector<std::size_t> all_features_;
};

}  // namespace

Tree grow(const NodeView& node, const TrainConfig& config) {
  const Dataset& ds = node.dataset();
  config.validate(ds.d());
  const auto start = std::chrono::steady_clock::now();
  Tree tree;
  tree.nodes = Grower(config, ds.d()).run(node);
  const auto stop = std::chrono::steady_clock::now();
  tree.config = config;
  tree.d = ds.d();
  tree.class_names = ds.class_names();
  tree.stats = tree_stats(tree);
  tree.stats.train_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return tree;
}

Tree train_tree(const Dataset& ds, const TrainConfig& config) {
  return grow(NodeView::all(ds), config);
}

std::size_t leaf_index(const Tree& tree, std::span<const double> x) {
  if (x.size() != tree.d) {
    throw DimensionError(fmt::format("expected {} features, got {}", tree.d, x.size()));
  }
  std::size_t k = 0;
  while (!tree.nodes[k].leaf) {
    const TreeNode& node = tree.nodes[k];
    k = static_cast<std::size_t>(node.split.goes_left(x) ? node.left : node.right);
  }
  return k;
}

int predict(const Tree& tree, std::span<const double> x) {
  return tree.nodes[leaf_index(tree, x)].label;
}

std::vector<int> predict(const Tree& tree, const Dataset& ds) {
  if (ds.d() != tree.d) {
    throw DimensionError(fmt::format("expected {} features, got {}", tree.d, ds.d()));
  }
  std::vector<int> out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::size_t k = 0;
    while (!tree.nodes[k].leaf) {
      const TreeNode& node = tree.nodes[k];
      k = static_cast<std::size_t>(node.split.goes_left(ds, i) ? node.left : node.right);
    }
    out[i] = tree.nodes[k].label;
  }
  return out;
}

TreeStats tree_stats(const Tree& tree) {
  TreeStats s;
  s.train_time_ms = tree.stats.train_time_ms;
  s.node_count = tree.nodes.size();
  for (const auto& node : tree.nodes) {
    if (node.leaf) ++s.leaf_count;
    s.max_depth = std::max(s.max_depth, node.depth);
  }
  return s;
}

}  // namespace gmmltree
