#include <cstring>

#include "doctest.h"
#include "gmmltree/errors.hpp"
#include "gmmltree/serialize.hpp"
#include "oracles.hpp"

using namespace gmmltree;

namespace {

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_same_structure(const Tree& a, const Tree& b) {
  REQUIRE(a.nodes.size() == b.nodes.size());
  CHECK(a.d == b.d);
  CHECK(a.class_names == b.class_names);
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    const auto& x = a.nodes[k];
    const auto& y = b.nodes[k];
    CHECK(x.leaf == y.leaf);
    CHECK(x.left == y.left);
    CHECK(x.right == y.right);
    CHECK(x.label == y.label);
    CHECK(x.counts == y.counts);
    CHECK(x.depth == y.depth);
    if (x.leaf) continue;
    CHECK(x.split.oblique() == y.split.oblique());
    CHECK(bits_equal(x.split.threshold(), y.split.threshold()));
    if (x.split.oblique()) {
      const auto& wx = std::get<ObliqueSplit>(x.split.test).weights;
      const auto& wy = std::get<ObliqueSplit>(y.split.test).weights;
      REQUIRE(wx.size() == wy.size());
      for (std::size_t j = 0; j < wx.size(); ++j) CHECK(bits_equal(wx[j], wy[j]));
    } else {
      CHECK(std::get<AxisSplit>(x.split.test).feature == std::get<AxisSplit>(y.split.test).feature);
    }
  }
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("tree round trip is bit exact") {
  Rng rng(10);
  for (int t = 0; t < 40; ++t) {
    const auto ds = oracle::random_dataset(rng, 30 + rng.uniform_index(100), 1 + rng.uniform_index(6),
                                           false);
    TrainConfig cfg;
    cfg.criterion = static_cast<TreeCriterion>(t % 5);
    cfg.oblique = cfg.criterion == TreeCriterion::dgmml && t % 2 == 0;
    cfg.split_strategy = static_cast<SplitStrategy>(t % 3);
    cfg.seed = static_cast<std::uint64_t>(t) * 1000003u;
    if (t % 4 == 0) cfg.max_depth = 3;
    const auto tree = train_tree(ds, cfg);
    const std::string text = model_to_string(Model{tree});
    const auto back = std::get<Tree>(model_from_string(text));
    check_same_structure(tree, back);
    CHECK(back.config.criterion == cfg.criterion);
    CHECK(back.config.oblique == cfg.oblique);
    CHECK(back.config.seed == cfg.seed);
    CHECK(back.config.max_depth == cfg.max_depth);
    CHECK(predict(back, ds) == predict(tree, ds));
    CHECK(model_to_string(Model{back}) == text);
  }
}

TEST_CASE("forest round trip") {
  Rng rng(11);
  const auto ds = oracle::random_dataset(rng, 120, 5, false);
  ForestConfig fc;
  fc.n_trees = 4;
  fc.seed = 8;
  const auto f = grow_forest(ds, fc);
  const auto back = std::get<Forest>(model_from_string(model_to_string(Model{f})));
  REQUIRE(back.trees.size() == 4);
  CHECK(back.per_tree_seeds == f.per_tree_seeds);
  CHECK(back.config.seed == 8);
  CHECK(back.config.tree_config.mtry == Mtry::sqrt());
  for (std::size_t t = 0; t < 4; ++t) check_same_structure(f.trees[t], back.trees[t]);
  CHECK(predict_forest(back, ds) == predict_forest(f, ds));
}

TEST_CASE("documents carry the expected fields") {
  const auto ds = Dataset::from_rows("s", {{1.0}, {2.0}, {8.0}, {9.0}}, {1, 1, -1, -1});
  const auto j = tree_to_json(train_tree(ds, TrainConfig{}));
  CHECK(j.at("format") == "gmmltree-tree");
  CHECK(j.at("d") == 1);
  CHECK(j.at("root").at("type") == "split");
  CHECK(j.at("root").at("feature") == 0);
  CHECK(j.at("root").at("threshold") == 5.0);
  CHECK(j.at("root").at("left").at("type") == "leaf");
  CHECK(j.at("root").at("left").at("label") == 1);
  CHECK(j.at("root").at("left").at("counts").at("pos") == 2);
  CHECK(j.at("config").at("criterion") == "dgmml");
}

TEST_CASE("malformed documents are data errors") {
  CHECK_THROWS_AS(model_from_string("not json"), DataError);
  CHECK_THROWS_AS(model_from_string("{}"), DataError);
  CHECK_THROWS_AS(model_from_string("[1,2]"), DataError);

  const auto ds = Dataset::from_rows("s", {{1.0}, {2.0}, {8.0}, {9.0}}, {1, 1, -1, -1});
  auto j = tree_to_json(train_tree(ds, TrainConfig{}));
  auto bad_feature = j;
  bad_feature["root"]["feature"] = 3;
  CHECK_THROWS_AS(tree_from_json(bad_feature), DataError);
  auto bad_version = j;
  bad_version["version"] = 99;
  CHECK_THROWS_AS(tree_from_json(bad_version), DataError);
  auto bad_type = j;
  bad_type["root"]["type"] = "branch";
  CHECK_THROWS_AS(tree_from_json(bad_type), DataError);
  auto missing = j;
  missing["root"].erase("left");
  CHECK_THROWS_AS(tree_from_json(missing), DataError);
  auto bad_label = j;
  bad_label["root"]["left"]["label"] = 0;
  CHECK_THROWS_AS(tree_from_json(bad_label), DataError);
  auto bad_config = j;
  bad_config["config"]["criterion"] = "twoing";
  CHECK_THROWS_AS(tree_from_json(bad_config), DataError);
}

}  // TEST_SUITE
