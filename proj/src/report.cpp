#include "gmmltree/report.hpp"

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw ConfigError(fmt::format("unknown format '{}' (expected csv or json)", text));
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_fixed4(double v) { return fmt::format("{:.4f}", v); }
std::string format_sig17(double v) { return fmt::format("{:.17g}", v); }

namespace {

// JSON values carry the same decimal text the CSV shows.
json number(const std::string& text) { return json(std::stod(text)); }

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c > 0) out << ',';
    out << csv_field(cells[c]);
  }
  out << '\n';
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

}  // namespace

void write_meta(std::ostream& out, ReportFormat format, const ReportMeta& meta) {
  if (format == ReportFormat::json) {
    json m{{"library", "gmmltree"},
           {"version", kVersion},
           {"command", meta.command},
           {"seed", meta.seed},
           {"config_hash", meta.config_hash}};
    for (const auto& [k, v] : meta.extra) m[k] = v;
    out << json{{"meta", m}}.dump() << '\n';
    return;
  }
  out << "# gmmltree " << kVersion << " " << meta.command << '\n';
  out << "# seed=" << meta.seed << " config_hash=" << meta.config_hash << '\n';
  for (const auto& [k, v] : meta.extra) out << "# " << k << '=' << v << '\n';
}

void write_cv_reports(std::ostream& out, ReportFormat format, const std::vector<CvReport>& reports,
                      bool timing) {
  if (format == ReportFormat::csv) {
    write_csv_row(out, {"dataset", "model", "k", "seed", "mean_accuracy", "train_time_ms",
                        "fold_accuracies", "fold_confusion"});
  }
  for (const auto& r : reports) {
    std::vector<std::string> accs;
    std::vector<std::string> conf;
    for (std::size_t f = 0; f < r.fold_accuracies.size(); ++f) {
      accs.push_back(format_fixed4(r.fold_accuracies[f]));
      const auto& cm = r.fold_confusion[f];
      conf.push_back(fmt::format("{}:{}:{}:{}", cm.tp, cm.tn, cm.fp, cm.fn));
    }
    const std::string mean_acc = format_fixed4(r.mean_accuracy);
    const std::string time = timing ? format_fixed4(r.train_time_ms) : "NA";
    if (format == ReportFormat::csv) {
      write_csv_row(out, {r.dataset, r.model, std::to_string(r.k), std::to_string(r.seed),
                          mean_acc, time, join(accs, ';'), join(conf, ';')});
      continue;
    }
    json row{{"dataset", r.dataset},
             {"model", r.model},
             {"k", r.k},
             {"seed", r.seed},
             {"mean_accuracy", number(mean_acc)},
             {"train_time_ms", timing ? number(time) : json(nullptr)}};
    row["fold_accuracies"] = json::array();
    row["fold_confusion"] = json::array();
    for (std::size_t f = 0; f < accs.size(); ++f) {
      const auto& cm = r.fold_confusion[f];
      row["fold_accuracies"].push_back(number(accs[f]));
      row["fold_confusion"].push_back({{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}});
    }
    out << row.dump() << '\n';
  }
}

void write_speed_table(std::ostream& out, ReportFormat format, const std::vector<SpeedRow>& rows,
                       bool timing) {
  if (format == ReportFormat::csv) {
    write_csv_row(out, {"criterion", "mean_train_ms", "ratio_vs_reference", "below_resolution",
                        "mean_accuracy", "mean_node_count"});
  }
  for (const auto& r : rows) {
    const std::string ms = timing ? format_fixed4(r.mean_train_ms) : "NA";
    const std::string ratio = timing ? format_fixed4(r.ratio) : "NA";
    const std::string below = timing ? (r.below_resolution ? "true" : "false") : "NA";
    const std::string acc = format_fixed4(r.mean_accuracy);
    const std::string nodes = format_fixed4(r.mean_node_count);
    if (format == ReportFormat::csv) {
      write_csv_row(out, {r.criterion, ms, ratio, below, acc, nodes});
      continue;
    }
    json row{{"criterion", r.criterion},
             {"mean_train_ms", timing ? number(ms) : json(nullptr)},
             {"ratio_vs_reference", timing ? number(ratio) : json(nullptr)},
             {"below_resolution", timing ? json(r.below_resolution) : json(nullptr)},
             {"mean_accuracy", number(acc)},
             {"mean_node_count", number(nodes)}};
    out << row.dump() << '\n';
  }
}

void write_weight_rows(std::ostream& out, ReportFormat format,
                       const std::vector<WeightImpurityRow>& rows,
                       const std::vector<std::string>& feature_names) {
  if (format == ReportFormat::csv) {
    write_csv_row(out,
                  {"rank", "feature", "name", "weight", "threshold", "post_split_impurity"});
  }
  for (const auto& r : rows) {
    const std::string name = r.feature < feature_names.size() ? feature_names[r.feature] : "";
    const std::string w = format_sig17(r.weight);
    const std::string b = format_sig17(r.threshold);
    const std::string imp = format_fixed4(r.post_split_impurity);
    if (format == ReportFormat::csv) {
      write_csv_row(out, {std::to_string(r.rank), std::to_string(r.feature), name, w, b, imp});
      continue;
    }
    out << json{{"rank", r.rank},         {"feature", r.feature},
                {"name", name},           {"weight", number(w)},
                {"threshold", number(b)}, {"post_split_impurity", number(imp)}}
               .dump()
        << '\n';
  }
}

void write_strategy_rows(std::ostream& out, ReportFormat format,
                         const std::vector<StrategyRow>& rows,
                         const std::vector<std::string>& dataset_names) {
  if (format == ReportFormat::csv) {
    std::vector<std::string> header{"strategy", "mean_accuracy"};
    header.insert(header.end(), dataset_names.begin(), dataset_names.end());
    write_csv_row(out, header);
  }
  for (const auto& r : rows) {
    std::vector<std::string> per;
    for (double a : r.per_dataset) per.push_back(format_fixed4(a));
    const std::string acc = format_fixed4(r.mean_accuracy);
    if (format == ReportFormat::csv) {
      std::vector<std::string> cells{std::string(to_string(r.strategy)), acc};
      cells.insert(cells.end(), per.begin(), per.end());
      write_csv_row(out, cells);
      continue;
    }
    json row{{"strategy", to_string(r.strategy)}, {"mean_accuracy", number(acc)}};
    json by = json::object();
    for (std::size_t i = 0; i < per.size() && i < dataset_names.size(); ++i) {
      by[dataset_names[i]] = number(per[i]);
    }
    row["per_dataset"] = by;
    out << row.dump() << '\n';
  }
}

}  // namespace gmmltree
