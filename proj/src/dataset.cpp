#include "gmmltree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

Dataset::Dataset(std::string name, std::size_t n, std::size_t d,
                 std::vector<double> column_major, std::vector<int> labels,
                 std::vector<std::string> feature_names,
                 std::array<std::string, 2> class_names)
    : name_(std::move(name)),
      n_(n),
      d_(d),
      values_(std::move(column_major)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (n_ == 0 || d_ == 0) {
    throw DataError(fmt::format("dataset '{}' must have n >= 1 and d >= 1", name_));
  }
  if (values_.size() != n_ * d_ || labels_.size() != n_) {
    throw DataError(fmt::format("dataset '{}': shape mismatch", name_));
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < d_; ++j) feature_names_.push_back(fmt::format("x{}", j));
  }
  if (feature_names_.size() != d_) {
    throw DataError(fmt::format("dataset '{}': expected {} feature names, got {}",
                                name_, d_, feature_names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& f : feature_names_) {
    if (!seen.insert(f).second) {
      throw DataError(fmt::format("dataset '{}': duplicate feature name '{}'", name_, f));
    }
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DataError(fmt::format("dataset '{}': non-finite value at row {}, feature {}",
                                  name_, k % n_, k / n_));
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (labels_[i] != -1 && labels_[i] != 1) {
      throw LabelError(fmt::format("dataset '{}': label {} at row {} is not -1/+1",
                                   name_, labels_[i], i));
    }
  }
}

Dataset Dataset::from_rows(std::string name, const std::vector<std::vector<double>>& rows,
                           std::vector<int> labels, std::vector<std::string> feature_names) {
  const std::size_t n = rows.size();
  const std::size_t d = n == 0 ? 0 : rows.front().size();
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) throw DataError("ragged rows");
    for (std::size_t j = 0; j < d; ++j) values[j * n + i] = rows[i][j];
  }
  return Dataset(std::move(name), n, d, std::move(values), std::move(labels),
                 std::move(feature_names));
}

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out(d_);
  for (std::size_t j = 0; j < d_; ++j) out[j] = value(i, j);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows, std::string name) const {
  const std::size_t m = rows.size();
  std::vector<double> values(m * d_);
  std::vector<int> labels(m);
  for (std::size_t j = 0; j < d_; ++j) {
    const double* col = values_.data() + j * n_;
    for (std::size_t i = 0; i < m; ++i) values[j * m + i] = col[rows[i]];
  }
  for (std::size_t i = 0; i < m; ++i) labels[i] = labels_[rows[i]];
  return Dataset(std::move(name), m, d_, std::move(values), std::move(labels),
                 feature_names_, class_names_);
}

std::size_t Dataset::count(int label) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

NodeView::NodeView(const Dataset& dataset, std::vector<std::size_t> indices)
    : dataset_(&dataset), indices_(std::move(indices)) {
  if (indices_.empty()) throw ContractError("node view must not be empty");
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= dataset.n()) throw ContractError("node index out of range");
    if (k > 0 && indices_[k] < indices_[k - 1]) {
      throw ContractError("node indices must be sorted");
    }
  }
}

NodeView NodeView::all(const Dataset& dataset) {
  std::vector<std::size_t> idx(dataset.n());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return NodeView(dataset, std::move(idx));
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] != fold) out.push_back(i);
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one record, honoring RFC-4180 double quotes. Records never span
// lines in the supported dialect.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& name,
                  const std::optional<std::string>& label_column) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_record(line);
      break;
    }
  }
  if (header.empty()) throw LabelError(fmt::format("'{}': empty file", name));
  if (header.size() < 2) {
    throw DataError(fmt::format("'{}': need at least one feature and a label column", name));
  }

  std::size_t label_col = header.size() - 1;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw DataError(fmt::format("'{}': no column named '{}'", name, *label_column));
    }
    label_col = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) feature_names.push_back(header[c]);
  }
  const std::size_t d = feature_names.size();

  std::vector<std::vector<double>> columns(d);
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_record(line);
    if (cells.size() != header.size()) {
      throw ParseError(line_no, cells.size(),
                       fmt::format("'{}' line {}: expected {} cells, got {}", name, line_no,
                                   header.size(), cells.size()));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) {
        raw_labels.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ParseError(line_no, c,
                         fmt::format("'{}' line {} column {}: '{}' is not a finite number",
                                     name, line_no, c, cells[c]));
      }
      columns[j++].push_back(v);
    }
  }
  if (raw_labels.empty()) throw LabelError(fmt::format("'{}': no data rows", name));

  const std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() != 2) {
    throw LabelError(fmt::format("'{}': expected exactly 2 distinct labels, found {}", name,
                                 distinct.size()));
  }
  const std::array<std::string, 2> class_names{*distinct.begin(), *distinct.rbegin()};
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) labels.push_back(l == class_names[0] ? -1 : 1);

  const std::size_t n = labels.size();
  std::vector<double> values;
  values.reserve(n * d);
  for (auto& col : columns) values.insert(values.end(), col.begin(), col.end());
  return Dataset(name, n, d, std::move(values), std::move(labels), std::move(feature_names),
                 class_names);
}

std::vector<std::vector<std::string>> read_csv_records(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> records;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) records.push_back(split_record(line));
  }
  return records;
}

std::string read_text_file(const std::string& path) {
  if (std::filesystem::is_directory(path)) throw IoError(fmt::format("'{}' is a directory", path));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path));
  return buf.str();
}

Dataset load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  return parse_csv(read_text_file(path), std::filesystem::path(path).stem().string(),
                   label_column);
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError(fmt::format("k must be >= 2, got {}", k));
  if (k > ds.n()) throw ConfigError(fmt::format("k = {} exceeds n = {}", k, ds.n()));

  Rng rng(derive_seed(seed, 0xF01D));
  // Shuffle each class, lay the classes end to end and deal positions
  // round-robin. Each class occupies a contiguous run of positions, so its
  // per-fold counts differ by at most one, and so do the overall fold sizes.
  std::vector<std::size_t> order;
  order.reserve(ds.n());
  for (int cls : {-1, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.label(i) == cls) members.push_back(i);
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.uniform_index(i)]);
    }
    order.insert(order.end(), members.begin(), members.end());
  }
  FoldPlan plan{k, std::vector<std::size_t>(ds.n())};
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    plan.fold_assignments[order[pos]] = pos % k;
  }
  return plan;
}

NodeView bootstrap_sample(const Dataset& ds, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> idx(ds.n());
  for (auto& i : idx) i = rng.uniform_index(ds.n());
  std::sort(idx.begin(), idx.end());
  return NodeView(ds, std::move(idx));
}

std::vector<std::size_t> subsample_features(std::size_t d, std::size_t mtry, Rng& rng) {
  if (mtry < 1 || mtry > d) {
    throw ConfigError(fmt::format("mtry must be in [1, {}], got {}", d, mtry));
  }
  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first mtry slots are a uniform draw without
  // replacement.
  for (std::size_t i = 0; i < mtry; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(d - i)]);
  }
  pool.resize(mtry);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> subsample_features(std::size_t d, std::size_t mtry,
                                            std::uint64_t seed) {
  Rng rng(seed);
  return subsample_features(d, mtry, rng);
}

std::size_t sqrt_mtry(std::size_t d) noexcept {
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while (r * r > d) --r;
  while ((r + 1) * (r + 1) <= d) ++r;
  return r * r == d ? r : r + 1;
}

}  // namespace gmmltree
