#include <sstream>

#include "doctest.h"
#include "gmmltree/bench.hpp"
#include "gmmltree/errors.hpp"
#include "gmmltree/report.hpp"
#include "oracles.hpp"

using namespace gmmltree;

namespace {

Dataset separable_1d(std::size_t per_class) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < per_class; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(-1);
    rows.push_back({100.0 + static_cast<double>(i)});
    labels.push_back(1);
  }
  return Dataset::from_rows("separable", rows, labels);
}

ModelConfig model_for(TreeCriterion c, bool forest = false) {
  ModelConfig m;
  m.tree.criterion = c;
  m.tree.mtry = Mtry::sqrt();
  m.forest = forest;
  m.n_trees = 5;
  return m;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("separable data is classified perfectly by every model") {
  const auto ds = separable_1d(20);
  CvOptions opt;
  opt.timing_reps = 1;
  for (auto c : {TreeCriterion::dgmml, TreeCriterion::info_gain, TreeCriterion::gain_ratio,
                 TreeCriterion::gini, TreeCriterion::ihd}) {
    CHECK(run_cv(ds, model_for(c), opt).mean_accuracy == 1.0);
    CHECK(run_cv(ds, model_for(c, true), opt).mean_accuracy == 1.0);
  }
  auto oblique = model_for(TreeCriterion::dgmml);
  oblique.tree.oblique = true;
  CHECK(run_cv(ds, oblique, opt).mean_accuracy == 1.0);
}

TEST_CASE("cv reports are deterministic and self-consistent") {
  Rng rng(5);
  const auto ds = oracle::random_dataset(rng, 150, 5, false, 0.4);
  CvOptions opt;
  opt.k = 7;
  opt.seed = 3;
  opt.timing_reps = 2;
  for (bool forest : {false, true}) {
    const auto a = run_cv(ds, model_for(TreeCriterion::dgmml, forest), opt);
    const auto b = run_cv(ds, model_for(TreeCriterion::dgmml, forest), opt);
    CHECK(a.fold_accuracies == b.fold_accuracies);
    CHECK(a.mean_node_count == b.mean_node_count);
    CHECK(a.k == 7);
    CHECK(a.fold_accuracies.size() == 7);
    CHECK(a.model == (forest ? "dgmml-rf" : "dgmml-dt"));
    double sum = 0.0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < a.k; ++f) {
      const auto& cm = a.fold_confusion[f];
      CHECK(a.fold_accuracies[f] ==
            static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()));
      CHECK(cm.tp == b.fold_confusion[f].tp);
      CHECK(cm.fp == b.fold_confusion[f].fp);
      sum += a.fold_accuracies[f];
      total += cm.total();
    }
    CHECK(total == ds.n());
    CHECK(a.mean_accuracy == doctest::Approx(sum / 7).epsilon(1e-15));
    CHECK(a.train_time_ms >= 0.0);
  }
}

TEST_CASE("model descriptors") {
  CHECK(model_for(TreeCriterion::gini).descriptor() == "gini-dt");
  CHECK(model_for(TreeCriterion::ihd, true).descriptor() == "ihd-rf");
  auto ob = model_for(TreeCriterion::dgmml);
  ob.tree.oblique = true;
  CHECK(ob.descriptor() == "dgmml-mdt");
}

TEST_CASE("speed table") {
  CvOptions opt;
  opt.k = 2;
  opt.timing_reps = 1;
  const auto tiny = separable_1d(5);
  const auto one = bench_speed(tiny, {TreeCriterion::gini}, model_for(TreeCriterion::gini), opt);
  REQUIRE(one.size() == 1);
  CHECK(one[0].ratio == 1.0);
  CHECK(one[0].below_resolution);

  const auto two = bench_speed(tiny, {TreeCriterion::gini, TreeCriterion::dgmml},
                               model_for(TreeCriterion::dgmml), opt);
  REQUIRE(two.size() == 2);
  CHECK(two[0].criterion == "gini-dt");
  CHECK(two[1].criterion == "dgmml-dt");
  CHECK(two[1].ratio == 1.0);
  CHECK_THROWS_AS(bench_speed(tiny, {}, model_for(TreeCriterion::gini), opt), ConfigError);
}

TEST_CASE("weight versus impurity rows") {
  // Feature 1 separates the classes, feature 0 is noise.
  Rng rng(6);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    const int y = i % 2 == 0 ? -1 : 1;
    rows.push_back({rng.normal(), y * 3.0 + rng.uniform01()});
    labels.push_back(y);
  }
  const auto ds = Dataset::from_rows("planted", rows, labels);
  const auto r = weight_vs_impurity(ds, SplitStrategy::closest_means);
  REQUIRE(r.size() == 2);
  CHECK(r[0].rank == 1);
  CHECK(r[0].feature == 1);
  CHECK(r[0].post_split_impurity == 0.0);
  CHECK(r[0].weight >= r[1].weight);

  const auto flat = Dataset::from_rows("flat", {{1, 2}, {1, 2}, {1, 2}, {1, 2}}, {1, -1, 1, 1});
  for (const auto& row : weight_vs_impurity(flat, SplitStrategy::median)) {
    CHECK(row.weight == 0.0);
    CHECK(row.post_split_impurity == doctest::Approx(gini(ClassCounts{3, 1})));
  }
}

TEST_CASE("higher weights give purer partitions in most random draws") {
  Rng rng(7);
  int wins = 0;
  for (int draw = 0; draw < 10; ++draw) {
    const auto ds = oracle::random_dataset(rng, 200, 10, false, 0.5);
    const auto r = weight_vs_impurity(ds, SplitStrategy::closest_means);
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k - 1].weight >= r[k].weight);
    wins += r.front().post_split_impurity <= r.back().post_split_impurity;
  }
  CHECK(wins >= 8);
}

TEST_CASE("strategy comparison") {
  CvOptions opt;
  opt.k = 4;
  opt.timing_reps = 1;
  const auto rows =
      compare_strategies({separable_1d(12)}, model_for(TreeCriterion::dgmml), opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].strategy == SplitStrategy::closest_means);
  CHECK(rows[1].strategy == SplitStrategy::median);
  CHECK(rows[2].strategy == SplitStrategy::mean);
  for (const auto& r : rows) CHECK(r.mean_accuracy == 1.0);
  CHECK_THROWS_AS(compare_strategies({}, model_for(TreeCriterion::dgmml), opt), ConfigError);
}

TEST_CASE("csv and json reports carry the same values") {
  Rng rng(8);
  const auto ds = oracle::random_dataset(rng, 80, 3, false);
  CvOptions opt;
  opt.k = 4;
  opt.timing_reps = 1;
  const auto report = run_cv(ds, model_for(TreeCriterion::gini), opt);

  std::ostringstream csv;
  std::ostringstream js;
  write_cv_reports(csv, ReportFormat::csv, {report}, true);
  write_cv_reports(js, ReportFormat::json, {report}, true);
  const auto rows = lines_of(csv.str());
  REQUIRE(rows.size() == 2);
  const auto j = json::parse(lines_of(js.str()).at(0));
  const auto cells = read_csv_records(csv.str()).at(1);
  CHECK(cells[0] == j.at("dataset").get<std::string>());
  CHECK(cells[1] == j.at("model").get<std::string>());
  CHECK(std::stod(cells[4]) == j.at("mean_accuracy").get<double>());
  CHECK(std::stod(cells[5]) == j.at("train_time_ms").get<double>());
  std::istringstream accs(cells[6]);
  std::size_t f = 0;
  for (std::string a; std::getline(accs, a, ';'); ++f) {
    CHECK(std::stod(a) == j.at("fold_accuracies").at(f).get<double>());
  }
  CHECK(f == 4);

  // The accuracy column equals a recount from the emitted confusion cells.
  std::istringstream conf(cells[7]);
  std::istringstream accs2(cells[6]);
  for (std::string c, a; std::getline(conf, c, ';') && std::getline(accs2, a, ';');) {
    std::size_t tp, tn, fp, fn;
    REQUIRE(std::sscanf(c.c_str(), "%zu:%zu:%zu:%zu", &tp, &tn, &fp, &fn) == 4);
    CHECK(a == format_fixed4(static_cast<double>(tp + tn) / static_cast<double>(tp + tn + fp + fn)));
  }

  std::ostringstream off;
  write_cv_reports(off, ReportFormat::csv, {report}, false);
  CHECK(read_csv_records(off.str()).at(1)[5] == "NA");
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_fixed4(0.93456) == "0.9346");
  CHECK(format_sig17(0.1) == "0.10000000000000001");
}

TEST_CASE("synthetic gaussian data") {
  const auto ds = synthetic_gaussian(100, 7, 3);
  CHECK(ds.n() == 100);
  CHECK(ds.d() == 7);
  CHECK(ds.count(1) == 50);
  CHECK(synthetic_gaussian(100, 7, 3).value(5, 6) == ds.value(5, 6));
  CHECK_THROWS_AS(synthetic_gaussian(1, 1, 0), ConfigError);
}

}  // TEST_SUITE
