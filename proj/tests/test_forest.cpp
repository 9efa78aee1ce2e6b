#include "doctest.h"
#include "gmmltree/bench.hpp"
#include "gmmltree/errors.hpp"
#include "gmmltree/forest.hpp"
#include "oracles.hpp"

using namespace gmmltree;

namespace {

bool same_tree(const Tree& a, const Tree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    const auto& x = a.nodes[k];
    const auto& y = b.nodes[k];
    if (x.leaf != y.leaf || x.left != y.left || x.label != y.label || !(x.counts == y.counts)) {
      return false;
    }
    if (!x.leaf) {
      if (x.split.threshold() != y.split.threshold()) return false;
      if (std::get<AxisSplit>(x.split.test).feature != std::get<AxisSplit>(y.split.test).feature) {
        return false;
      }
    }
  }
  return true;
}

Tree stump(int left_label, int right_label) {
  Tree t;
  t.d = 1;
  TreeNode root;
  root.leaf = false;
  root.split = SplitSpec{AxisSplit{0, 0.0}};
  root.left = 1;
  root.right = 2;
  TreeNode l;
  l.label = left_label;
  l.depth = 1;
  TreeNode r = l;
  r.label = right_label;
  t.nodes = {root, l, r};
  t.stats = tree_stats(t);
  return t;
}

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("one tree without bagging equals a single tree") {
  Rng rng(1);
  const auto ds = oracle::random_dataset(rng, 150, 6, false);
  ForestConfig fc;
  fc.n_trees = 1;
  fc.bootstrap = false;
  fc.subspaces = false;
  const auto f = grow_forest(ds, fc);
  TrainConfig tc = fc.tree_config;
  tc.mtry = Mtry::all();
  const auto t = train_tree(ds, tc);
  CHECK(same_tree(f.trees[0], t));
  const auto probe = oracle::random_dataset(rng, 300, 6, false);
  CHECK(predict_forest(f, probe) == predict(t, probe));
}

TEST_CASE("forests are deterministic and thread-count independent") {
  Rng rng(2);
  const auto ds = oracle::random_dataset(rng, 200, 9, false);
  ForestConfig fc;
  fc.n_trees = 7;
  fc.seed = 99;
  const auto a = grow_forest(ds, fc);
  const auto b = grow_forest(ds, fc);
  fc.threads = 3;
  const auto c = grow_forest(ds, fc);
  REQUIRE(a.trees.size() == 7);
  CHECK(a.per_tree_seeds == b.per_tree_seeds);
  for (std::size_t t = 0; t < 7; ++t) {
    CHECK(same_tree(a.trees[t], b.trees[t]));
    CHECK(same_tree(a.trees[t], c.trees[t]));
  }
  CHECK(predict_forest(a, ds) == predict_forest(c, ds));
  // Seeds differ per tree, so bagged trees differ.
  CHECK_FALSE(same_tree(a.trees[0], a.trees[1]));
}

TEST_CASE("majority vote") {
  Forest f;
  f.d = 1;
  f.trees = {stump(1, -1), stump(1, -1), stump(-1, 1)};
  const std::vector<double> left{-1.0};
  const auto v = forest_votes(f, left);
  CHECK(v.pos == 2);
  CHECK(v.neg == 1);
  CHECK(predict_forest(f, left) == 1);

  f.trees = {stump(1, -1), stump(-1, 1)};
  CHECK(predict_forest(f, left) == -1);  // tie
  CHECK_THROWS_AS(predict_forest(f, std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST_CASE("identical trees vote like one tree") {
  Rng rng(3);
  const auto ds = oracle::random_dataset(rng, 120, 4, false);
  ForestConfig fc;
  fc.n_trees = 5;
  fc.bootstrap = false;
  fc.subspaces = false;
  const auto f = grow_forest(ds, fc);
  for (std::size_t t = 1; t < f.trees.size(); ++t) CHECK(same_tree(f.trees[0], f.trees[t]));
  const auto probe = oracle::random_dataset(rng, 200, 4, false);
  CHECK(predict_forest(f, probe) == predict(f.trees[0], probe));
}

TEST_CASE("votes sum to the forest size and match a recount") {
  Rng rng(4);
  const auto ds = oracle::random_dataset(rng, 400, 8, false);
  const auto plan = stratified_kfold(ds, 5, 4);
  const auto train = ds.subset(plan.train_indices(0), "train");
  const auto test = ds.subset(plan.test_indices(0), "test");
  ForestConfig fc;
  fc.n_trees = 20;
  fc.seed = 4;
  const auto f = grow_forest(train, fc);
  const auto pred = predict_forest(f, test);

  ConfusionMatrix recount;
  for (std::size_t i = 0; i < test.n(); ++i) {
    const auto x = test.row(i);
    std::size_t pos = 0;
    for (const auto& t : f.trees) pos += predict(t, x) > 0;
    const auto v = forest_votes(f, x);
    CHECK(v.pos + v.neg == 20);
    CHECK(v.pos == pos);
    const int vote = pos > 20 - pos ? 1 : -1;
    CHECK(pred[i] == vote);
    recount.add(test.label(i), vote);
  }
  ConfusionMatrix direct;
  for (std::size_t i = 0; i < test.n(); ++i) direct.add(test.label(i), pred[i]);
  CHECK(recount.accuracy() == direct.accuracy());
}

TEST_CASE("forest errors") {
  const auto single = Dataset::from_rows("s", {{1.0}, {2.0}}, {1, 1});
  CHECK_THROWS_AS(grow_forest(single, ForestConfig{}), LabelError);
  const auto ds = Dataset::from_rows("d", {{1.0}, {2.0}}, {1, -1});
  ForestConfig none;
  none.n_trees = 0;
  CHECK_THROWS_AS(grow_forest(ds, none), ConfigError);
  CHECK(tree_seed(1, 0) != tree_seed(1, 1));
  CHECK(tree_seed(1, 0) != tree_seed(2, 0));
}

}  // TEST_SUITE
