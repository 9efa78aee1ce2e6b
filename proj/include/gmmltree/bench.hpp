#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gmmltree/dataset.hpp"
#include "gmmltree/forest.hpp"
#include "gmmltree/tree.hpp"

namespace gmmltree {

// What to train in each fold: a single tree, or a forest of them.
struct ModelConfig {
  TrainConfig tree;
  bool forest = false;
  std::size_t n_trees = 20;
  bool bootstrap = true;
  bool subspaces = true;
  std::size_t threads = 1;

  // Short name such as "dgmml-dt", "dgmml-mdt" or "gini-rf".
  std::string descriptor() const;
};

struct ConfusionMatrix {
  std::size_t tp = 0;  // +1 predicted +1
  std::size_t tn = 0;  // -1 predicted -1
  std::size_t fp = 0;  // -1 predicted +1
  std::size_t fn = 0;  // +1 predicted -1

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  double accuracy() const noexcept {
    return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
  }
  void add(int truth, int predicted) noexcept;
};

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  // Each fold is trained this many times and the median wall time kept.
  std::size_t timing_reps = 5;
};

struct CvReport {
  std::string dataset;
  std::string model;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<double> fold_accuracies;
  std::vector<ConfusionMatrix> fold_confusion;
  std::vector<double> fold_train_ms;
  double mean_accuracy = 0.0;
  double train_time_ms = 0.0;  // mean over folds of the per-fold median
  double mean_node_count = 0.0;
};

// Trains a model for the fold seed, returning its predictions for `test`
// and the wall time of construction alone.
struct FoldResult {
  std::vector<int> predictions;
  double train_ms = 0.0;
  double node_count = 0.0;
};
FoldResult train_and_predict(const Dataset& train, const Dataset& test, const ModelConfig& model,
                             std::uint64_t seed);

CvReport run_cv(const Dataset& ds, const ModelConfig& model, const CvOptions& options);

inline constexpr double kTimerFloorMs = 0.05;

struct SpeedRow {
  std::string criterion;
  double mean_train_ms = 0.0;
  // mean_train_ms divided by the reference (dgmml when listed, otherwise the
  // first criterion); the speedup of the reference over this criterion.
  double ratio = 1.0;
  bool below_resolution = false;
  double mean_accuracy = 0.0;
  double mean_node_count = 0.0;
};

// Single-tree cross-validated timing of each criterion; everything except
// the criterion comes from `base`.
std::vector<SpeedRow> bench_speed(const Dataset& ds, const std::vector<TreeCriterion>& criteria,
                                  const ModelConfig& base, const CvOptions& options);

struct WeightImpurityRow {
  std::size_t rank = 0;  // 1-based
  std::size_t feature = 0;
  double weight = 0.0;
  double threshold = 0.0;
  double post_split_impurity = 0.0;  // weighted Gini of the two partitions
};

// Full-dataset weights over all features, ranked, each feature used to split
// the whole dataset with the given strategy.
std::vector<WeightImpurityRow> weight_vs_impurity(const Dataset& ds, SplitStrategy strategy,
                                                  std::size_t window = kDefaultWindow);

struct StrategyRow {
  SplitStrategy strategy = SplitStrategy::closest_means;
  double mean_accuracy = 0.0;
  std::vector<double> per_dataset;  // same order as the input list
};

// Runs run_cv for each split strategy (all other settings from `base`) over
// every dataset. Throws ConfigError on an empty list.
std::vector<StrategyRow> compare_strategies(const std::vector<Dataset>& datasets,
                                            const ModelConfig& base, const CvOptions& options);

// Two isotropic Gaussian classes of n/2 rows each, class means at -shift/2
// and +shift/2 on every feature.
Dataset synthetic_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double shift = 0.5);

}  // namespace gmmltree
