#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gmmltree/bench.hpp"
#include "gmmltree/cli.hpp"
#include "gmmltree/errors.hpp"
#include "gmmltree/report.hpp"
#include "gmmltree/serialize.hpp"

namespace py = pybind11;
using namespace gmmltree;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

Dataset dataset_from_arrays(const Matrix& x, const Labels& y, const std::string& name,
                            std::vector<std::string> feature_names) {
  if (x.ndim() != 2) throw DimensionError("X must be a 2-D array");
  if (y.ndim() != 1 || y.shape(0) != x.shape(0)) {
    throw DimensionError("y must be 1-D with one label per row of X");
  }
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto d = static_cast<std::size_t>(x.shape(1));
  const auto xv = x.unchecked<2>();
  const auto yv = y.unchecked<1>();
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) values[j * n + i] = xv(i, j);
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = yv(i);
  return Dataset(name, n, d, std::move(values), std::move(labels), std::move(feature_names));
}

Matrix dataset_matrix(const Dataset& ds) {
  Matrix out({ds.n(), ds.d()});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) m(i, j) = ds.value(i, j);
  }
  return out;
}

std::vector<double> row_of(const Matrix& x, py::ssize_t i) {
  std::vector<double> r(static_cast<std::size_t>(x.shape(1)));
  for (py::ssize_t j = 0; j < x.shape(1); ++j) r[static_cast<std::size_t>(j)] = *x.data(i, j);
  return r;
}

// Filled through mutable_data(); the single-count array_t constructor
// misbehaved here with numpy 2.
template <class Fill>
py::array_t<int> int_array(py::ssize_t n, Fill fill) {
  py::array_t<int> out(std::vector<py::ssize_t>{n});
  int* p = out.mutable_data();
  for (py::ssize_t i = 0; i < n; ++i) p[i] = fill(i);
  return out;
}

template <class Predict>
py::array_t<int> predict_rows(const Matrix& x, Predict predict_one) {
  if (x.ndim() == 1) {
    Matrix two = x.attr("reshape")(1, -1).cast<Matrix>();
    return predict_rows(two, predict_one);
  }
  if (x.ndim() != 2) throw DimensionError("X must be a 1-D or 2-D array");
  return int_array(x.shape(0), [&](py::ssize_t i) { return predict_one(row_of(x, i)); });
}

TrainConfig make_config(const std::string& criterion, bool oblique, const std::string& mtry,
                        std::size_t minleaf, const std::string& strategy, std::size_t window,
                        std::optional<std::size_t> max_depth, std::uint64_t seed) {
  TrainConfig c;
  c.criterion = parse_tree_criterion(criterion);
  c.oblique = oblique;
  c.mtry = Mtry::parse(mtry);
  c.minleaf = minleaf;
  c.split_strategy = parse_split_strategy(strategy);
  c.window = window;
  c.max_depth = max_depth;
  c.seed = seed;
  return c;
}

py::dict cv_dict(const CvReport& r) {
  py::dict d;
  d["dataset"] = r.dataset;
  d["model"] = r.model;
  d["k"] = r.k;
  d["seed"] = r.seed;
  d["fold_accuracies"] = r.fold_accuracies;
  d["mean_accuracy"] = r.mean_accuracy;
  d["train_time_ms"] = r.train_time_ms;
  py::list conf;
  for (const auto& cm : r.fold_confusion) {
    py::dict c;
    c["tp"] = cm.tp;
    c["tn"] = cm.tn;
    c["fp"] = cm.fp;
    c["fn"] = cm.fn;
    conf.append(c);
  }
  d["fold_confusion"] = conf;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gmmltree, m) {
  m.doc() = "Decision trees and forests with closed-form metric-learning splits";
  m.attr("__version__") = kVersion;

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ContractError>(m, "ContractError", error.ptr());
  py::register_exception<NoValidSplitError>(m, "NoValidSplitError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_arrays), py::arg("X"), py::arg("y"), py::arg("name") = "data",
           py::arg("feature_names") = std::vector<std::string>{})
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("d", &Dataset::d)
      .def_property_readonly("name", &Dataset::name)
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("class_names", &Dataset::class_names)
      .def_property_readonly("X", &dataset_matrix)
      .def_property_readonly("y", [](const Dataset& ds) {
        return int_array(static_cast<py::ssize_t>(ds.n()),
                         [&ds](py::ssize_t i) { return ds.label(static_cast<std::size_t>(i)); });
      })
      .def("count", &Dataset::count, py::arg("label"))
      .def("__repr__", [](const Dataset& ds) {
        return "<Dataset '" + ds.name() + "' n=" + std::to_string(ds.n()) +
               " d=" + std::to_string(ds.d()) + ">";
      });

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_column") = std::nullopt);
  m.def("parse_csv", &parse_csv, py::arg("text"), py::arg("name") = "data",
        py::arg("label_column") = std::nullopt);

  m.def(
      "gmml_weights",
      [](const Dataset& ds, std::optional<std::vector<std::size_t>> candidates) {
        std::vector<std::size_t> cand;
        if (candidates) {
          cand = *candidates;
        } else {
          cand.resize(ds.d());
          for (std::size_t j = 0; j < ds.d(); ++j) cand[j] = j;
        }
        const auto r = gmml_weights(NodeView::all(ds), cand);
        py::dict out;
        out["features"] = r.weights.candidate_indices;
        out["weights"] = r.weights.weights;
        std::vector<double> within;
        std::vector<double> between;
        for (const auto& f : r.scatter.features) {
          within.push_back(f.within_scatter);
          between.push_back(f.between_scatter);
        }
        out["within_scatter"] = within;
        out["between_scatter"] = between;
        out["best"] = best_weighted_feature(r.weights);
        return out;
      },
      py::arg("dataset"), py::arg("candidates") = std::nullopt,
      "Closed-form per-feature weights over the whole dataset.");
  m.attr("WEIGHT_MAX") = kWeightMax;

  m.def(
      "split_point",
      [](std::vector<double> pos, std::vector<double> neg, const std::string& strategy,
         std::size_t window) { return split_point(pos, neg, parse_split_strategy(strategy), window); },
      py::arg("values_pos"), py::arg("values_neg"), py::arg("strategy") = "closest_means",
      py::arg("window") = kDefaultWindow);

  py::class_<Tree>(m, "Tree")
      .def_property_readonly("d", [](const Tree& t) { return t.d; })
      .def_property_readonly("node_count", [](const Tree& t) { return t.stats.node_count; })
      .def_property_readonly("leaf_count", [](const Tree& t) { return t.stats.leaf_count; })
      .def_property_readonly("max_depth", [](const Tree& t) { return t.stats.max_depth; })
      .def("predict",
           [](const Tree& t, const Matrix& x) {
             return predict_rows(x, [&t](const std::vector<double>& r) { return predict(t, r); });
           })
      .def("to_json", [](const Tree& t) { return model_to_string(Model{t}); });

  py::class_<Forest>(m, "Forest")
      .def_property_readonly("n_trees", [](const Forest& f) { return f.trees.size(); })
      .def_property_readonly("d", [](const Forest& f) { return f.d; })
      .def("predict",
           [](const Forest& f, const Matrix& x) {
             return predict_rows(
                 x, [&f](const std::vector<double>& r) { return predict_forest(f, r); });
           })
      .def("votes",
           [](const Forest& f, std::vector<double> x) {
             const auto v = forest_votes(f, x);
             return py::make_tuple(v.pos, v.neg);
           })
      .def("to_json", [](const Forest& f) { return model_to_string(Model{f}); });

  m.def(
      "train_tree",
      [](const Dataset& ds, const std::string& criterion, bool oblique, const std::string& mtry,
         std::size_t minleaf, const std::string& strategy, std::size_t window,
         std::optional<std::size_t> max_depth, std::uint64_t seed) {
        return train_tree(ds, make_config(criterion, oblique, mtry, minleaf, strategy, window,
                                          max_depth, seed));
      },
      py::arg("dataset"), py::arg("criterion") = "dgmml", py::arg("oblique") = false,
      py::arg("mtry") = "all", py::arg("minleaf") = 1, py::arg("strategy") = "closest_means",
      py::arg("window") = kDefaultWindow, py::arg("max_depth") = std::nullopt,
      py::arg("seed") = 0);

  m.def(
      "train_forest",
      [](const Dataset& ds, std::size_t n_trees, const std::string& criterion, bool oblique,
         const std::string& mtry, std::size_t minleaf, const std::string& strategy,
         bool bootstrap, bool subspaces, std::uint64_t seed, std::size_t threads) {
        ForestConfig fc;
        fc.n_trees = n_trees;
        fc.tree_config = make_config(criterion, oblique, mtry, minleaf, strategy, kDefaultWindow,
                                     std::nullopt, seed);
        fc.seed = seed;
        fc.bootstrap = bootstrap;
        fc.subspaces = subspaces;
        fc.threads = threads;
        py::gil_scoped_release release;
        return grow_forest(ds, fc);
      },
      py::arg("dataset"), py::arg("n_trees") = 20, py::arg("criterion") = "dgmml",
      py::arg("oblique") = false, py::arg("mtry") = "sqrt", py::arg("minleaf") = 1,
      py::arg("strategy") = "closest_means", py::arg("bootstrap") = true,
      py::arg("subspaces") = true, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "load_model",
      [](const std::string& text) -> py::object {
        Model model = model_from_string(text);
        if (auto* t = std::get_if<Tree>(&model)) return py::cast(std::move(*t));
        return py::cast(std::get<Forest>(std::move(model)));
      },
      py::arg("text"), "Parse a tree or forest JSON document.");

  m.def(
      "cross_validate",
      [](const Dataset& ds, const std::string& criterion, bool oblique, bool forest,
         std::size_t n_trees, const std::string& mtry, const std::string& strategy, std::size_t k,
         std::uint64_t seed) {
        ModelConfig model;
        model.tree = make_config(criterion, oblique, mtry, 1, strategy, kDefaultWindow,
                                 std::nullopt, seed);
        model.forest = forest;
        model.n_trees = n_trees;
        CvOptions opt;
        opt.k = k;
        opt.seed = seed;
        opt.timing_reps = 1;
        return cv_dict(run_cv(ds, model, opt));
      },
      py::arg("dataset"), py::arg("criterion") = "dgmml", py::arg("oblique") = false,
      py::arg("forest") = false, py::arg("n_trees") = 20, py::arg("mtry") = "sqrt",
      py::arg("strategy") = "closest_means", py::arg("k") = 10, py::arg("seed") = 0);

  m.def(
      "weight_vs_impurity",
      [](const Dataset& ds, const std::string& strategy) {
        py::list rows;
        for (const auto& r : weight_vs_impurity(ds, parse_split_strategy(strategy))) {
          py::dict d;
          d["rank"] = r.rank;
          d["feature"] = r.feature;
          d["weight"] = r.weight;
          d["threshold"] = r.threshold;
          d["post_split_impurity"] = r.post_split_impurity;
          rows.append(d);
        }
        return rows;
      },
      py::arg("dataset"), py::arg("strategy") = "closest_means");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line tool in-process; returns (exit_code, stdout, stderr).");
}
