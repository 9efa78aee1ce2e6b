#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmmltree/random.hpp"

namespace gmmltree {

// Immutable binary-classification table. Features are stored column-major
// because every split computation walks one feature across a node.
class Dataset {
 public:
  // `column_major` holds n*d values, feature j at [j*n, (j+1)*n).
  // `labels` must contain only -1 and +1. Throws DataError on any invariant
  // violation (non-finite value, bad label, duplicate feature name, shape).
  Dataset(std::string name, std::size_t n, std::size_t d,
          std::vector<double> column_major, std::vector<int> labels,
          std::vector<std::string> feature_names,
          std::array<std::string, 2> class_names = {"-1", "+1"});

  // Row-major convenience constructor (rows[i][j]).
  static Dataset from_rows(std::string name,
                           const std::vector<std::vector<double>>& rows,
                           std::vector<int> labels,
                           std::vector<std::string> feature_names = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& feature_names() const noexcept {
    return feature_names_;
  }
  // Raw label text for -1 (index 0) and +1 (index 1).
  const std::array<std::string, 2>& class_names() const noexcept {
    return class_names_;
  }

  double value(std::size_t row, std::size_t feature) const noexcept {
    return values_[feature * n_ + row];
  }
  std::span<const double> column(std::size_t feature) const noexcept {
    return {values_.data() + feature * n_, n_};
  }
  int label(std::size_t row) const noexcept { return labels_[row]; }
  std::span<const int> labels() const noexcept { return labels_; }
  std::vector<double> row(std::size_t i) const;

  // Copy of the selected rows, in the given order (duplicates allowed).
  Dataset subset(std::span<const std::size_t> rows, std::string name) const;

  std::size_t count(int label) const noexcept;

 private:
  std::string name_;
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  std::array<std::string, 2> class_names_;
};

// Rows of a dataset reaching one tree node. Indices are sorted; a bootstrap
// sample keeps repeated rows as repeated indices.
class NodeView {
 public:
  NodeView(const Dataset& dataset, std::vector<std::size_t> indices);
  static NodeView all(const Dataset& dataset);

  const Dataset& dataset() const noexcept { return *dataset_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }

 private:
  const Dataset* dataset_;
  std::vector<std::size_t> indices_;
};

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> fold_assignments;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Reads a comma-separated file with one header row. The label column is
// `label_column` when given, otherwise the last column. Raw labels are
// mapped so that the lexicographically smaller one becomes -1.
Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column = std::nullopt);

// Same, from an in-memory document. `name` becomes the dataset name.
Dataset parse_csv(const std::string& text, const std::string& name,
                  const std::optional<std::string>& label_column = std::nullopt);

// Raw records of a CSV document (header included), blank lines skipped.
std::vector<std::vector<std::string>> read_csv_records(const std::string& text);
std::string read_text_file(const std::string& path);

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

NodeView bootstrap_sample(const Dataset& ds, std::uint64_t seed);

std::vector<std::size_t> subsample_features(std::size_t d, std::size_t mtry,
                                            std::uint64_t seed);
std::vector<std::size_t> subsample_features(std::size_t d, std::size_t mtry,
                                            Rng& rng);

// ceil(sqrt(d)), computed exactly on integers.
std::size_t sqrt_mtry(std::size_t d) noexcept;

}  // namespace gmmltree
