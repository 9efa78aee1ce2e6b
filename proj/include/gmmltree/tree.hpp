#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gmmltree/criteria.hpp"
#include "gmmltree/dataset.hpp"

namespace gmmltree {

// Split selection rule for a tree. `dgmml` ranks candidates by their
// closed-form weights; the others run an exhaustive threshold search.
enum class TreeCriterion { dgmml, info_gain, gain_ratio, gini, ihd };

std::string_view to_string(TreeCriterion c) noexcept;
TreeCriterion parse_tree_criterion(std::string_view text);
SplitStrategy parse_split_strategy(std::string_view text);

// Number of candidate features drawn at each internal node.
struct Mtry {
  enum class Kind { all, sqrt, fixed };
  Kind kind = Kind::all;
  std::size_t value = 0;  // only for Kind::fixed

  static Mtry all() { return {}; }
  static Mtry sqrt() { return {Kind::sqrt, 0}; }
  static Mtry fixed(std::size_t m) { return {Kind::fixed, m}; }
  static Mtry parse(std::string_view text);  // "all", "sqrt" or a count

  // Throws ConfigError when a fixed count falls outside [1, d].
  std::size_t resolve(std::size_t d) const;
  std::string str() const;
  friend bool operator==(const Mtry&, const Mtry&) = default;
};

struct TrainConfig {
  TreeCriterion criterion = TreeCriterion::dgmml;
  bool oblique = false;  // dgmml only
  Mtry mtry = Mtry::all();
  std::size_t minleaf = 1;
  SplitStrategy split_strategy = SplitStrategy::closest_means;
  std::size_t window = kDefaultWindow;
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::uint64_t seed = 0;

  // Throws ConfigError on inconsistent settings for a d-feature dataset.
  void validate(std::size_t d) const;
};

struct AxisSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
};

// Linear test w.x <= threshold. `weights` has one entry per dataset feature,
// zero for features that were not candidates.
struct ObliqueSplit {
  std::vector<double> weights;
  double threshold = 0.0;
};

struct SplitSpec {
  std::variant<AxisSplit, ObliqueSplit> test;

  bool oblique() const noexcept { return std::holds_alternative<ObliqueSplit>(test); }
  double threshold() const noexcept;
  // Test value of row `i` of `ds` (the feature value, or w.x).
  double value(const Dataset& ds, std::size_t i) const noexcept;
  double value(std::span<const double> x) const noexcept;
  bool goes_left(const Dataset& ds, std::size_t i) const noexcept {
    return value(ds, i) <= threshold();
  }
  bool goes_left(std::span<const double> x) const noexcept { return value(x) <= threshold(); }
};

struct TreeNode {
  static constexpr std::int32_t kNone = -1;

  bool leaf = true;
  SplitSpec split;  // internal nodes only
  std::int32_t left = kNone;
  std::int32_t right = kNone;
  int label = -1;  // majority class of `counts`, ties -> -1
  ClassCounts counts;
  std::size_t depth = 0;
};

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t max_depth = 0;
  double train_time_ms = 0.0;
};

// Flat binary tree; nodes[0] is the root and children are referenced by
// position.
struct Tree {
  std::vector<TreeNode> nodes;
  TrainConfig config;
  std::size_t d = 0;
  TreeStats stats;
  std::array<std::string, 2> class_names{"-1", "+1"};

  const TreeNode& root() const { return nodes.front(); }
};

struct Partition {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

// Splits the node's rows by the test (<= threshold goes left). Either side
// may come back empty.
Partition partition(const NodeView& node, const SplitSpec& split);

// Oblique test from the closed-form weights of `candidates`. Perfect single
// features (kWeightMax) are clamped to ten times the largest finite weight.
// Throws DegenerateError when every weight is zero.
SplitSpec fit_oblique_node(const NodeView& node, std::span<const std::size_t> candidates,
                           SplitStrategy strategy, std::size_t window = kDefaultWindow);

// Grows a tree on the node's rows. Degenerate situations become leaves.
Tree grow(const NodeView& node, const TrainConfig& config);
Tree train_tree(const Dataset& ds, const TrainConfig& config);

// Throws DimensionError when x.size() != tree.d.
int predict(const Tree& tree, std::span<const double> x);
std::vector<int> predict(const Tree& tree, const Dataset& ds);

// Index of the leaf reached by x.
std::size_t leaf_index(const Tree& tree, std::span<const double> x);

// Recomputes node/leaf counts and depth from the structure. train_time_ms is
// copied from tree.stats.
TreeStats tree_stats(const Tree& tree);

}  // namespace gmmltree
