#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gmmltree/dataset.hpp"
#include "gmmltree/tree.hpp"

namespace gmmltree {

struct ForestConfig {
  std::size_t n_trees = 20;
  TrainConfig tree_config = [] {
    TrainConfig c;
    c.mtry = Mtry::sqrt();
    return c;
  }();
  std::uint64_t seed = 0;
  bool bootstrap = true;  // bag each tree
  bool subspaces = true;  // per-node random feature subsets; off means mtry = all
  std::size_t threads = 1;
};

struct Votes {
  std::size_t pos = 0;
  std::size_t neg = 0;
  // Unweighted majority; ties go to -1.
  int winner() const noexcept { return pos > neg ? 1 : -1; }
};

struct Forest {
  std::vector<Tree> trees;
  std::vector<std::uint64_t> per_tree_seeds;
  ForestConfig config;
  std::size_t d = 0;

  double train_time_ms = 0.0;
};

// Seed of tree t, a pure function of (master seed, t).
std::uint64_t tree_seed(std::uint64_t master, std::size_t t) noexcept;

// Throws LabelError unless both classes are present, ConfigError on bad
// settings.
Forest grow_forest(const Dataset& ds, const ForestConfig& config);

Votes forest_votes(const Forest& f, std::span<const double> x);
int predict_forest(const Forest& f, std::span<const double> x);
std::vector<int> predict_forest(const Forest& f, const Dataset& ds);

}  // namespace gmmltree
