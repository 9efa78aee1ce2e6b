#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmmltree/dataset.hpp"

namespace gmmltree {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;

  std::size_t total() const noexcept { return pos + neg; }
  // Majority label; ties go to -1.
  int majority() const noexcept { return pos > neg ? 1 : -1; }
  bool pure() const noexcept { return pos == 0 || neg == 0; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

ClassCounts count_classes(const NodeView& node);

// Class probabilities, {p(-1), p(+1)}.
struct ClassDistribution {
  double neg = 0.0;
  double pos = 0.0;
};
ClassDistribution distribution(const ClassCounts& c);

// ---- node impurities (all require total >= 1) ----------------------------

double entropy(const ClassCounts& c);
double gini(const ClassCounts& c);
double misclassification_error(const ClassCounts& c);

// ---- split scores --------------------------------------------------------
// All take (parent, left, right) and throw ContractError when the child
// counts do not add up to the parent's.

double info_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right);
// Information gain divided by the split information of the child sizes.
// Both children must be non-empty.
double gain_ratio(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right);
double gini_reduction(const ClassCounts& parent, const ClassCounts& left,
                      const ClassCounts& right);
double hellinger_sq(const ClassDistribution& child, const ClassDistribution& parent);
double ihd(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right);

enum class Criterion { info_gain, gain_ratio, gini_reduction, ihd };

double split_score(Criterion criterion, const ClassCounts& parent, const ClassCounts& left,
                   const ClassCounts& right);

std::string_view to_string(Criterion c) noexcept;

// ---- closed-form feature weights -----------------------------------------

// Stands in for w = +inf when a feature has zero within-class scatter but
// separated class means. Finite, so arithmetic on weights never sees inf.
inline constexpr double kWeightMax = std::numeric_limits<double>::max();

struct FeatureScatter {
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  double within_scatter = 0.0;   // sum over classes of squared deviations
  double between_scatter = 0.0;  // (mean_pos - mean_neg)^2
};

struct ScatterStats {
  std::vector<std::size_t> candidates;
  std::vector<FeatureScatter> features;  // parallel to candidates
};

struct FeatureWeights {
  std::vector<double> weights;
  std::vector<std::size_t> candidate_indices;
  // Parallel to weights; orders several kWeightMax entries.
  std::vector<double> between_scatter;
};

struct WeightResult {
  FeatureWeights weights;
  ScatterStats scatter;
};

// Diagonal minimiser of w*S_w + S_b/w for one feature:
// sqrt(between / within), with the degenerate cases
//   within == 0, between > 0  -> kWeightMax
//   within == 0, between == 0 -> 0
double weight_from_scatter(double within_scatter, double between_scatter) noexcept;

// Per-feature scatter of the node and the resulting weights. Throws
// SingleClassError unless both classes are present, ContractError on an
// empty candidate list.
WeightResult gmml_weights(const NodeView& node, std::span<const std::size_t> candidates);

// Positions into `w` ordered best first: larger weight, then (among
// kWeightMax entries) larger between-class scatter, then smaller feature
// index.
std::vector<std::size_t> rank_features(const FeatureWeights& w);

// Original feature index of the top-ranked candidate.
std::size_t best_weighted_feature(const FeatureWeights& w);

// ---- split points --------------------------------------------------------

enum class SplitStrategy { closest_means, median, mean };

std::string_view to_string(SplitStrategy s) noexcept;

inline constexpr std::size_t kDefaultWindow = 5;

// Threshold for one feature given its values in each class (any order).
//   closest_means: midpoint of the mean of the `window` largest values of the
//                  lower-mean class and the mean of the `window` smallest
//                  values of the other class
//   median:        median of all values
//   mean:          mean of all values
double split_point(std::span<const double> values_pos, std::span<const double> values_neg,
                   SplitStrategy strategy, std::size_t window = kDefaultWindow);

// ---- exhaustive search ---------------------------------------------------

struct SplitScore {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
  Criterion criterion = Criterion::gini_reduction;
};

// Midpoint used between two consecutive distinct sorted values lo < hi.
// Always satisfies lo <= m < hi so that "x <= m" separates them.
double midpoint(double lo, double hi) noexcept;

// Best (feature, threshold) over every midpoint of every candidate. Ties go
// to the smaller feature index, then the smaller threshold. Thresholds that
// leave a child with fewer than `minleaf` samples are not considered.
// Throws NoValidSplitError when no candidate admits a split.
SplitScore best_exhaustive_split(const NodeView& node, std::span<const std::size_t> candidates,
                                 Criterion criterion, std::size_t minleaf = 1);

}  // namespace gmmltree
