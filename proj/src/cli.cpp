#include "gmmltree/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "gmmltree/bench.hpp"
#include "gmmltree/errors.hpp"
#include "gmmltree/report.hpp"
#include "gmmltree/serialize.hpp"

namespace gmmltree {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::uint64_t seed = 0;
  std::string mtry;
  std::size_t minleaf = 1;
  std::string strategy = "closest_means";
  std::size_t window = kDefaultWindow;
  bool oblique = false;
  std::size_t trees = 0;
  std::string format = "csv";
  std::string timing = "on";
  std::size_t threads = 1;
  std::optional<std::size_t> max_depth;
  bool no_bootstrap = false;
  bool no_subspaces = false;
  std::string criterion = "dgmml";
  std::string label_column;

  bool timing_on() const { return timing == "on"; }
  std::optional<std::string> label() const {
    return label_column.empty() ? std::nullopt : std::optional<std::string>(label_column);
  }
};

// Single trees default to every feature; forests and the benchmark commands
// default to ceil(sqrt(d)).
ModelConfig make_model(const Flags& f, bool bench_defaults) {
  ModelConfig m;
  m.tree.criterion = parse_tree_criterion(f.criterion);
  m.tree.oblique = f.oblique;
  m.tree.minleaf = f.minleaf;
  m.tree.split_strategy = parse_split_strategy(f.strategy);
  m.tree.window = f.window;
  m.tree.max_depth = f.max_depth;
  m.tree.seed = f.seed;
  if (f.mtry.empty()) {
    m.tree.mtry = bench_defaults || f.trees > 0 ? Mtry::sqrt() : Mtry::all();
  } else {
    m.tree.mtry = Mtry::parse(f.mtry);
  }
  if (m.tree.oblique && m.tree.criterion != TreeCriterion::dgmml) {
    throw ConfigError("--oblique requires --criterion dgmml");
  }
  m.forest = f.trees > 0;
  m.n_trees = std::max<std::size_t>(f.trees, 1);
  m.bootstrap = !f.no_bootstrap;
  m.subspaces = !f.no_subspaces;
  m.threads = f.threads;
  return m;
}

json model_json(const ModelConfig& m) {
  return json{{"tree", to_json(m.tree)}, {"forest", m.forest},       {"n_trees", m.n_trees},
              {"bootstrap", m.bootstrap}, {"subspaces", m.subspaces}};
}

std::vector<std::string> expand_paths(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw IoError(fmt::format("no .csv files in '{}'", p));
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Dataset> load_all(const std::vector<std::string>& paths, const Flags& f) {
  std::vector<Dataset> out;
  for (const auto& p : expand_paths(paths)) out.push_back(load_csv(p, f.label()));
  return out;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError(fmt::format("cannot write '{}'", path));
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

ReportMeta meta_for(const std::string& command, const Flags& f, json config) {
  config["command"] = command;
  ReportMeta meta;
  meta.command = command;
  meta.seed = f.seed;
  meta.config_hash = config_hash(config);
  return meta;
}

// ---- subcommands ----------------------------------------------------------------

int run_train(const Flags& f, const std::string& data, const std::string& output,
              std::ostream& out, std::ostream& err) {
  const Dataset ds = load_csv(data, f.label());
  const ModelConfig m = make_model(f, false);
  Model model;
  std::vector<int> fitted;
  if (m.forest) {
    ForestConfig fc;
    fc.n_trees = m.n_trees;
    fc.tree_config = m.tree;
    fc.seed = f.seed;
    fc.bootstrap = m.bootstrap;
    fc.subspaces = m.subspaces;
    fc.threads = m.threads;
    Forest forest = grow_forest(ds, fc);
    if (!f.timing_on()) {
      forest.train_time_ms = 0.0;
      for (auto& t : forest.trees) t.stats.train_time_ms = 0.0;
    }
    fitted = predict_forest(forest, ds);
    model = std::move(forest);
  } else {
    Tree tree = train_tree(ds, m.tree);
    if (!f.timing_on()) tree.stats.train_time_ms = 0.0;
    fitted = predict(tree, ds);
    model = std::move(tree);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) correct += fitted[i] == ds.label(i) ? 1 : 0;
  Output dest(output, out);
  dest.get() << model_to_string(model) << '\n';
  err << "training_accuracy=" << format_fixed4(static_cast<double>(correct) / ds.n()) << '\n';
  return kExitOk;
}

int run_predict(const Flags& f, const std::string& model_path, const std::string& input,
                const std::string& output, std::ostream& out, std::ostream& err) {
  const Model model = model_from_string(read_text_file(model_path));
  const std::size_t d = std::visit([](const auto& m) { return m.d; }, model);
  const std::array<std::string, 2> classes = std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Tree>) {
          return m.class_names;
        } else {
          return m.trees.front().class_names;
        }
      },
      model);

  const auto records = read_csv_records(read_text_file(input));
  if (records.empty()) throw DataError(fmt::format("'{}' is empty", input));
  const auto& header = records.front();
  std::optional<std::size_t> label_col;
  if (header.size() == d + 1) {
    label_col = header.size() - 1;
    if (auto name = f.label()) {
      const auto it = std::find(header.begin(), header.end(), *name);
      if (it == header.end()) throw DataError(fmt::format("no column named '{}'", *name));
      label_col = static_cast<std::size_t>(it - header.begin());
    }
  } else if (header.size() != d) {
    throw DimensionError(fmt::format("model expects {} features, '{}' has {} columns", d, input,
                                     header.size()));
  }

  Output dest(output, out);
  dest.get() << "label\n";
  std::size_t correct = 0;
  std::vector<double> x(d);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& cells = records[r];
    if (cells.size() != header.size()) {
      throw ParseError(r + 1, cells.size(), fmt::format("line {}: wrong number of cells", r + 1));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_col && c == *label_col) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size() || cells[c].empty() || !std::isfinite(v)) {
        throw ParseError(r + 1, c, fmt::format("line {} column {}: '{}' is not a finite number",
                                               r + 1, c, cells[c]));
      }
      x[j++] = v;
    }
    const int label = std::visit(
        [&x](const auto& m) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Tree>) {
            return predict(m, x);
          } else {
            return predict_forest(m, x);
          }
        },
        model);
    const std::string& name = classes[label > 0 ? 1 : 0];
    dest.get() << csv_field(name) << '\n';
    if (label_col) correct += cells[*label_col] == name ? 1 : 0;
  }
  if (label_col && records.size() > 1) {
    err << "accuracy=" << format_fixed4(static_cast<double>(correct) / (records.size() - 1))
        << '\n';
  }
  return kExitOk;
}

int run_cv_command(const Flags& f, const std::vector<std::string>& paths, std::size_t k,
                   std::ostream& out) {
  const auto datasets = load_all(paths, f);
  const ModelConfig m = make_model(f, true);
  CvOptions opt;
  opt.k = k;
  opt.seed = f.seed;
  opt.timing_reps = f.timing_on() ? 5 : 1;
  std::vector<CvReport> reports;
  for (const auto& ds : datasets) reports.push_back(run_cv(ds, m, opt));

  const ReportFormat format = parse_report_format(f.format);
  json cfg = model_json(m);
  cfg["k"] = k;
  write_meta(out, format, meta_for("cv", f, cfg));
  write_cv_reports(out, format, reports, f.timing_on());
  return kExitOk;
}

int run_bench_command(const Flags& f, const std::string& path, const std::string& criteria,
                      std::size_t k, std::size_t synth_n, std::size_t synth_d,
                      std::size_t reps, std::ostream& out) {
  std::optional<Dataset> ds;
  if (!path.empty()) {
    ds = load_csv(path, f.label());
  } else if (synth_n > 0 && synth_d > 0) {
    ds = synthetic_gaussian(synth_n, synth_d, f.seed);
  } else {
    throw ConfigError("bench needs a dataset path or --synthetic-n and --synthetic-d");
  }
  std::vector<TreeCriterion> list;
  std::stringstream ss(criteria);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) list.push_back(parse_tree_criterion(item));
  }
  const ModelConfig m = make_model(f, true);
  CvOptions opt;
  opt.k = k;
  opt.seed = f.seed;
  opt.timing_reps = f.timing_on() ? reps : 1;
  const auto rows = bench_speed(*ds, list, m, opt);

  const ReportFormat format = parse_report_format(f.format);
  json cfg = model_json(m);
  cfg["k"] = k;
  cfg["criteria"] = criteria;
  ReportMeta meta = meta_for("bench", f, cfg);
  meta.extra.emplace_back("dataset", ds->name());
  meta.extra.emplace_back("timing_reps", std::to_string(opt.timing_reps));
  write_meta(out, format, meta);
  write_speed_table(out, format, rows, f.timing_on());
  return kExitOk;
}

int run_weights_command(const Flags& f, const std::string& path, std::ostream& out) {
  const Dataset ds = load_csv(path, f.label());
  const SplitStrategy strategy = parse_split_strategy(f.strategy);
  const auto rows = weight_vs_impurity(ds, strategy, f.window);
  const ReportFormat format = parse_report_format(f.format);
  ReportMeta meta = meta_for(
      "weights", f, json{{"strategy", to_string(strategy)}, {"window", f.window}});
  meta.extra.emplace_back("dataset", ds.name());
  meta.extra.emplace_back("impurity", "gini");
  write_meta(out, format, meta);
  write_weight_rows(out, format, rows, ds.feature_names());
  return kExitOk;
}

int run_strategies_command(const Flags& f, const std::vector<std::string>& paths, std::size_t k,
                           std::ostream& out) {
  const auto datasets = load_all(paths, f);
  Flags g = f;
  g.criterion = "dgmml";
  const ModelConfig m = make_model(g, true);
  CvOptions opt;
  opt.k = k;
  opt.seed = f.seed;
  opt.timing_reps = 1;
  const auto rows = compare_strategies(datasets, m, opt);
  std::vector<std::string> names;
  for (const auto& ds : datasets) names.push_back(ds.name());

  const ReportFormat format = parse_report_format(f.format);
  json cfg = model_json(m);
  cfg["k"] = k;
  write_meta(out, format, meta_for("strategies", f, cfg));
  write_strategy_rows(out, format, rows, names);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision trees and forests with closed-form metric-learning splits", "gmmltree"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Flags f;
  app.add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app.add_option("--mtry", f.mtry, "Candidate features per node: all, sqrt or a count");
  app.add_option("--minleaf", f.minleaf, "Minimum samples per leaf")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--strategy", f.strategy, "Split point: closest_means, median or mean")
      ->check(CLI::IsMember({"closest_means", "median", "mean"}))
      ->capture_default_str();
  app.add_option("--window", f.window, "Values per class for closest_means")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--oblique", f.oblique, "Oblique splits (dgmml only)");
  app.add_option("--trees", f.trees, "Forest size; 0 trains a single tree")->capture_default_str();
  app.add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--timing", f.timing, "Emit wall-clock fields (off makes reports reproducible)")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--threads", f.threads, "Threads for forest training")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-depth", f.max_depth, "Depth cap (unlimited by default)");
  app.add_flag("--no-bootstrap", f.no_bootstrap, "Forests: train every tree on all rows");
  app.add_flag("--no-subspaces", f.no_subspaces, "Forests: use every feature at every node");
  app.add_option("--criterion", f.criterion, "dgmml, info_gain, gain_ratio, gini or ihd")
      ->check(CLI::IsMember({"dgmml", "info_gain", "gain_ratio", "gini", "ihd"}))
      ->capture_default_str();
  app.add_option("--label-column", f.label_column, "Label column name (default: last)");

  std::string data, model_path, input, output;
  std::vector<std::string> paths;
  std::size_t k = 10;
  std::string criteria = "dgmml,gini,info_gain,gain_ratio,ihd";
  std::size_t synth_n = 0, synth_d = 0, reps = 5;

  auto* train = app.add_subcommand("train", "Train a tree or forest and write it as JSON");
  train->add_option("dataset", data, "Training CSV")->required();
  train->add_option("-o,--output", output, "Model file (default: standard output)");

  auto* pred = app.add_subcommand("predict", "Predict labels for a CSV with a saved model");
  pred->add_option("model", model_path, "Model JSON")->required();
  pred->add_option("input", input, "Input CSV (label column optional)")->required();
  pred->add_option("-o,--output", output, "Label CSV (default: standard output)");

  auto* cv = app.add_subcommand("cv", "Cross-validate on CSV files or directories of them");
  cv->add_option("paths", paths, "Dataset files or directories")->required();
  cv->add_option("--k", k, "Folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Training-time comparison of split criteria");
  bench->add_option("dataset", data, "Dataset CSV (or use --synthetic-n/--synthetic-d)");
  bench->add_option("--criteria", criteria, "Comma-separated criteria")->capture_default_str();
  bench->add_option("--k", k, "Folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();
  bench->add_option("--reps", reps, "Timing repetitions per fold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--synthetic-n", synth_n, "Rows of a synthetic two-Gaussian dataset");
  bench->add_option("--synthetic-d", synth_d, "Features of the synthetic dataset");

  auto* weights = app.add_subcommand("weights", "Feature weights versus post-split impurity");
  weights->add_option("dataset", data, "Dataset CSV")->required();

  auto* strat = app.add_subcommand("strategies", "Compare the three split-point strategies");
  strat->add_option("paths", paths, "Dataset files or directories")->required();
  strat->add_option("--k", k, "Folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();

  for (auto* sub : {train, pred, cv, bench, weights, strat}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return run_train(f, data, output, out, err);
    if (*pred) return run_predict(f, model_path, input, output, out, err);
    if (*cv) return run_cv_command(f, paths, k, out);
    if (*bench) {
      return run_bench_command(f, data, criteria, k, synth_n, synth_d, reps, out);
    }
    if (*weights) return run_weights_command(f, data, out);
    if (*strat) return run_strategies_command(f, paths, k, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace gmmltree
