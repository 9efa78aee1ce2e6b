#include "gmmltree/bench.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

std::string ModelConfig::descriptor() const {
  std::string name(to_string(tree.criterion));
  if (forest) return name + "-rf";
  return name + (tree.oblique ? "-mdt" : "-dt");
}

void ConfusionMatrix::add(int truth, int predicted) noexcept {
  if (truth > 0) {
    ++(predicted > 0 ? tp : fn);
  } else {
    ++(predicted > 0 ? fp : tn);
  }
}

FoldResult train_and_predict(const Dataset& train, const Dataset& test, const ModelConfig& model,
                             std::uint64_t seed) {
  FoldResult out;
  if (model.forest) {
    ForestConfig fc;
    fc.n_trees = model.n_trees;
    fc.tree_config = model.tree;
    fc.seed = seed;
    fc.bootstrap = model.bootstrap;
    fc.subspaces = model.subspaces;
    fc.threads = model.threads;
    const Forest f = grow_forest(train, fc);
    out.predictions = predict_forest(f, test);
    out.train_ms = f.train_time_ms;
    double nodes = 0.0;
    for (const auto& t : f.trees) nodes += static_cast<double>(t.stats.node_count);
    out.node_count = nodes / static_cast<double>(f.trees.size());
    return out;
  }
  TrainConfig tc = model.tree;
  tc.seed = seed;
  const Tree tree = train_tree(train, tc);
  out.predictions = predict(tree, test);
  out.train_ms = tree.stats.train_time_ms;
  out.node_count = static_cast<double>(tree.stats.node_count);
  return out;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

CvReport run_cv(const Dataset& ds, const ModelConfig& model, const CvOptions& options) {
  model.tree.validate(ds.d());
  const FoldPlan plan = stratified_kfold(ds, options.k, options.seed);

  CvReport report;
  report.dataset = ds.name();
  report.model = model.descriptor();
  report.k = options.k;
  report.seed = options.seed;
  std::vector<double> nodes;

  for (std::size_t fold = 0; fold < options.k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const Dataset train = ds.subset(train_idx, ds.name());
    const Dataset test = ds.subset(test_idx, ds.name());
    const std::uint64_t fold_seed = derive_seed(options.seed, fold + 1);

    const FoldResult first = train_and_predict(train, test, model, fold_seed);
    std::vector<double> times{first.train_ms};
    for (std::size_t rep = 1; rep < options.timing_reps; ++rep) {
      times.push_back(train_and_predict(train, test, model, fold_seed).train_ms);
    }

    ConfusionMatrix cm;
    for (std::size_t i = 0; i < test.n(); ++i) cm.add(test.label(i), first.predictions[i]);
    report.fold_confusion.push_back(cm);
    report.fold_accuracies.push_back(cm.accuracy());
    report.fold_train_ms.push_back(median(times));
    nodes.push_back(first.node_count);
  }
  report.mean_accuracy = mean(report.fold_accuracies);
  report.train_time_ms = mean(report.fold_train_ms);
  report.mean_node_count = mean(nodes);
  return report;
}

std::vector<SpeedRow> bench_speed(const Dataset& ds, const std::vector<TreeCriterion>& criteria,
                                  const ModelConfig& base, const CvOptions& options) {
  if (criteria.empty()) throw ConfigError("bench_speed: empty criteria list");
  std::vector<SpeedRow> rows;
  std::size_t reference = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    ModelConfig model = base;
    model.forest = false;
    model.tree.criterion = criteria[c];
    model.tree.oblique = base.tree.oblique && criteria[c] == TreeCriterion::dgmml;
    const CvReport r = run_cv(ds, model, options);
    SpeedRow row;
    row.criterion = model.descriptor();
    row.mean_train_ms = r.train_time_ms;
    row.mean_accuracy = r.mean_accuracy;
    row.mean_node_count = r.mean_node_count;
    rows.push_back(row);
    if (criteria[c] == TreeCriterion::dgmml && criteria[reference] != TreeCriterion::dgmml) {
      reference = c;
    }
  }
  const double ref = rows[reference].mean_train_ms;
  for (auto& row : rows) {
    row.ratio = ref > 0.0 ? row.mean_train_ms / ref : 1.0;
    row.below_resolution = row.mean_train_ms < kTimerFloorMs || ref < kTimerFloorMs;
  }
  rows[reference].ratio = 1.0;
  return rows;
}

std::vector<WeightImpurityRow> weight_vs_impurity(const Dataset& ds, SplitStrategy strategy,
                                                  std::size_t window) {
  const NodeView all = NodeView::all(ds);
  std::vector<std::size_t> features(ds.d());
  std::iota(features.begin(), features.end(), std::size_t{0});
  const FeatureWeights fw = gmml_weights(all, features).weights;
  const ClassCounts parent = count_classes(all);

  std::vector<WeightImpurityRow> rows;
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t p : rank_features(fw)) {
    const std::size_t j = fw.candidate_indices[p];
    pos.clear();
    neg.clear();
    for (std::size_t i = 0; i < ds.n(); ++i) {
      (ds.label(i) > 0 ? pos : neg).push_back(ds.value(i, j));
    }
    WeightImpurityRow row;
    row.rank = rows.size() + 1;
    row.feature = j;
    row.weight = fw.weights[p];
    row.threshold = split_point(pos, neg, strategy, window);
    ClassCounts left;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.value(i, j) <= row.threshold) ++(ds.label(i) > 0 ? left.pos : left.neg);
    }
    const ClassCounts right{parent.pos - left.pos, parent.neg - left.neg};
    double impurity = 0.0;
    for (const auto& child : {left, right}) {
      if (child.total() == 0) continue;
      impurity += static_cast<double>(child.total()) / static_cast<double>(parent.total()) *
                  gini(child);
    }
    row.post_split_impurity = impurity;
    rows.push_back(row);
  }
  return rows;
}

std::vector<StrategyRow> compare_strategies(const std::vector<Dataset>& datasets,
                                            const ModelConfig& base, const CvOptions& options) {
  if (datasets.empty()) throw ConfigError("compare_strategies: no datasets");
  std::vector<StrategyRow> rows;
  for (auto s : {SplitStrategy::closest_means, SplitStrategy::median, SplitStrategy::mean}) {
    ModelConfig model = base;
    model.tree.split_strategy = s;
    StrategyRow row;
    row.strategy = s;
    for (const auto& ds : datasets) row.per_dataset.push_back(run_cv(ds, model, options).mean_accuracy);
    row.mean_accuracy = mean(row.per_dataset);
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset synthetic_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double shift) {
  if (n < 2 || d < 1) throw ConfigError("synthetic_gaussian needs n >= 2 and d >= 1");
  Rng rng(seed);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? -1 : 1;
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      values[j * n + i] = rng.normal() + 0.5 * shift * labels[i];
    }
  }
  return Dataset(fmt::format("gaussian_n{}_d{}", n, d), n, d, std::move(values),
                 std::move(labels), {});
}

}  // namespace gmmltree
