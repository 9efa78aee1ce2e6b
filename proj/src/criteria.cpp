#include "gmmltree/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

namespace {

void require_nonempty(const ClassCounts& c, const char* what) {
  if (c.total() == 0) throw ContractError(fmt::format("{}: class counts are empty", what));
}

void require_consistent(const ClassCounts& parent, const ClassCounts& left,
                        const ClassCounts& right) {
  require_nonempty(parent, "split score");
  if (left.pos + right.pos != parent.pos || left.neg + right.neg != parent.neg) {
    throw ContractError(fmt::format(
        "child counts ({},{}) + ({},{}) do not add up to parent ({},{})", left.pos, left.neg,
        right.pos, right.neg, parent.pos, parent.neg));
  }
}

double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double fraction(std::size_t part, std::size_t whole) {
  return static_cast<double>(part) / static_cast<double>(whole);
}

// Weighted child impurity n_l/n * I(l) + n_r/n * I(r); empty children
// contribute nothing.
template <class Impurity>
double weighted_children(const ClassCounts& parent, const ClassCounts& left,
                         const ClassCounts& right, Impurity impurity) {
  double sum = 0.0;
  if (left.total() > 0) sum += fraction(left.total(), parent.total()) * impurity(left);
  if (right.total() > 0) sum += fraction(right.total(), parent.total()) * impurity(right);
  return sum;
}

// Correctly rounded sum (Shewchuk expansion, the algorithm behind Python's
// math.fsum). The result does not depend on the order of `values`.
double exact_sum(std::span<const double> values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  // Sum the non-overlapping partials from the top, fixing the final rounding
  // the same way fsum does (half-way cases).
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double exact_mean(std::span<const double> values) {
  return exact_sum(values) / static_cast<double>(values.size());
}

}  // namespace

ClassCounts count_classes(const NodeView& node) {
  ClassCounts c;
  const Dataset& ds = node.dataset();
  for (std::size_t i : node.indices()) {
    if (ds.label(i) > 0) {
      ++c.pos;
    } else {
      ++c.neg;
    }
  }
  return c;
}

ClassDistribution distribution(const ClassCounts& c) {
  require_nonempty(c, "distribution");
  return {fraction(c.neg, c.total()), fraction(c.pos, c.total())};
}

double entropy(const ClassCounts& c) {
  require_nonempty(c, "entropy");
  const double p = fraction(c.pos, c.total());
  const double q = fraction(c.neg, c.total());
  return std::clamp(-(plog2p(p) + plog2p(q)), 0.0, 1.0);
}

double gini(const ClassCounts& c) {
  require_nonempty(c, "gini");
  const double p = fraction(c.pos, c.total());
  const double q = fraction(c.neg, c.total());
  return std::clamp(1.0 - (p * p + q * q), 0.0, 0.5);
}

double misclassification_error(const ClassCounts& c) {
  require_nonempty(c, "misclassification_error");
  return 1.0 - fraction(std::max(c.pos, c.neg), c.total());
}

double info_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right) {
  require_consistent(parent, left, right);
  const double h = entropy(parent);
  return std::clamp(h - weighted_children(parent, left, right, entropy), 0.0, h);
}

double gain_ratio(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right) {
  require_consistent(parent, left, right);
  if (left.total() == 0 || right.total() == 0) {
    throw ContractError("gain_ratio needs two non-empty children");
  }
  const double split_info = -(plog2p(fraction(left.total(), parent.total())) +
                              plog2p(fraction(right.total(), parent.total())));
  return info_gain(parent, left, right) / split_info;
}

double gini_reduction(const ClassCounts& parent, const ClassCounts& left,
                      const ClassCounts& right) {
  require_consistent(parent, left, right);
  const double g = gini(parent);
  return std::clamp(g - weighted_children(parent, left, right, gini), 0.0, g);
}

double hellinger_sq(const ClassDistribution& child, const ClassDistribution& parent) {
  for (const auto* p : {&child, &parent}) {
    if (!(p->neg >= 0.0) || !(p->pos >= 0.0) || std::abs(p->neg + p->pos - 1.0) > 1e-9) {
      throw ContractError(
          fmt::format("({}, {}) is not a probability vector", p->neg, p->pos));
    }
  }
  if (child.neg == parent.neg && child.pos == parent.pos) return 0.0;
  const double affinity = std::sqrt(child.neg * parent.neg) + std::sqrt(child.pos * parent.pos);
  return std::clamp(1.0 - affinity, 0.0, 1.0);
}

double ihd(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right) {
  require_consistent(parent, left, right);
  const ClassDistribution p = distribution(parent);
  return weighted_children(parent, left, right, [&p](const ClassCounts& child) {
    return hellinger_sq(distribution(child), p);
  });
}

double split_score(Criterion criterion, const ClassCounts& parent, const ClassCounts& left,
                   const ClassCounts& right) {
  switch (criterion) {
    case Criterion::info_gain:
      return info_gain(parent, left, right);
    case Criterion::gain_ratio:
      return gain_ratio(parent, left, right);
    case Criterion::gini_reduction:
      return gini_reduction(parent, left, right);
    case Criterion::ihd:
      return ihd(parent, left, right);
  }
  throw ContractError("unknown criterion");
}

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::info_gain:
      return "info_gain";
    case Criterion::gain_ratio:
      return "gain_ratio";
    case Criterion::gini_reduction:
      return "gini_reduction";
    case Criterion::ihd:
      return "ihd";
  }
  return "?";
}

std::string_view to_string(SplitStrategy s) noexcept {
  switch (s) {
    case SplitStrategy::closest_means:
      return "closest_means";
    case SplitStrategy::median:
      return "median";
    case SplitStrategy::mean:
      return "mean";
  }
  return "?";
}

// ---- weights ----------------------------------------------------------------

double weight_from_scatter(double within_scatter, double between_scatter) noexcept {
  if (within_scatter > 0.0) {
    const double w = std::sqrt(between_scatter / within_scatter);
    return std::isfinite(w) ? w : kWeightMax;
  }
  return between_scatter > 0.0 ? kWeightMax : 0.0;
}

WeightResult gmml_weights(const NodeView& node, std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw ContractError("gmml_weights: no candidate features");
  const Dataset& ds = node.dataset();
  const auto idx = node.indices();

  const ClassCounts counts = count_classes(node);
  if (counts.pure()) {
    throw SingleClassError("gmml_weights needs samples of both classes");
  }
  const double n_pos = static_cast<double>(counts.pos);
  const double n_neg = static_cast<double>(counts.neg);

  WeightResult out;
  auto& fw = out.weights;
  auto& st = out.scatter;
  const std::size_t m = candidates.size();
  fw.weights.resize(m);
  fw.candidate_indices.assign(candidates.begin(), candidates.end());
  fw.between_scatter.resize(m);
  st.candidates.assign(candidates.begin(), candidates.end());
  st.features.resize(m);

  const auto labels = ds.labels();
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t j = candidates[c];
    if (j >= ds.d()) throw ContractError(fmt::format("candidate feature {} out of range", j));
    const auto col = ds.column(j);

    double sum[2] = {0.0, 0.0};
    double lo[2] = {col[idx[0]], col[idx[0]]};
    double hi[2] = {lo[0], lo[0]};
    bool seen[2] = {false, false};
    for (std::size_t i : idx) {
      const int k = labels[i] > 0 ? 1 : 0;
      const double v = col[i];
      sum[k] += v;
      if (!seen[k]) {
        lo[k] = hi[k] = v;
        seen[k] = true;
      } else {
        lo[k] = std::min(lo[k], v);
        hi[k] = std::max(hi[k], v);
      }
    }
    // A class that is constant on this feature has its mean pinned to that
    // value, so its scatter is exactly zero.
    const double mean[2] = {lo[0] == hi[0] ? lo[0] : sum[0] / n_neg,
                            lo[1] == hi[1] ? lo[1] : sum[1] / n_pos};
    double within = 0.0;
    if (lo[0] != hi[0] || lo[1] != hi[1]) {
      for (std::size_t i : idx) {
        const int k = labels[i] > 0 ? 1 : 0;
        const double dev = col[i] - mean[k];
        within += dev * dev;
      }
    }
    const double gap = mean[1] - mean[0];
    FeatureScatter& fs = st.features[c];
    fs.mean_pos = mean[1];
    fs.mean_neg = mean[0];
    fs.within_scatter = within;
    fs.between_scatter = gap * gap;

    fw.weights[c] = weight_from_scatter(fs.within_scatter, fs.between_scatter);
    fw.between_scatter[c] = fs.between_scatter;
  }
  return out;
}

std::vector<std::size_t> rank_features(const FeatureWeights& w) {
  std::vector<std::size_t> order(w.weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto key = [&w](std::size_t p) {
    const double tie = w.weights[p] == kWeightMax && p < w.between_scatter.size()
                           ? w.between_scatter[p]
                           : 0.0;
    // Negated so that ascending tuple order means "better first".
    return std::make_tuple(-w.weights[p], -tie, w.candidate_indices[p]);
  };
  std::sort(order.begin(), order.end(),
            [&key](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return order;
}

std::size_t best_weighted_feature(const FeatureWeights& w) {
  if (w.weights.empty()) throw ContractError("best_weighted_feature: no weights");
  return w.candidate_indices[rank_features(w).front()];
}

// ---- split points -------------------------------------------------------------

namespace {

// Mean of the `count` largest (or smallest) entries. Only O(n) selection plus
// a sort of the selected window, so the result does not depend on input order.
double window_mean(std::span<const double> values, std::size_t count, bool largest) {
  std::vector<double> v(values.begin(), values.end());
  count = std::min(count, v.size());
  if (largest) {
    std::nth_element(v.begin(), v.end() - static_cast<std::ptrdiff_t>(count), v.end());
    v.erase(v.begin(), v.end() - static_cast<std::ptrdiff_t>(count));
  } else {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count - 1), v.end());
    v.resize(count);
  }
  return exact_mean(v);
}

}  // namespace

double split_point(std::span<const double> values_pos, std::span<const double> values_neg,
                   SplitStrategy strategy, std::size_t window) {
  if (window < 1) throw ContractError("split_point: window must be >= 1");
  switch (strategy) {
    case SplitStrategy::closest_means: {
      if (values_pos.empty() || values_neg.empty()) {
        throw ContractError("closest_means needs values from both classes");
      }
      // The class with the smaller mean sits on the low side; on equal means
      // the positive class does.
      const bool pos_low = exact_mean(values_pos) <= exact_mean(values_neg);
      const auto low = pos_low ? values_pos : values_neg;
      const auto high = pos_low ? values_neg : values_pos;
      const double b1 = window_mean(low, window, true);
      const double b2 = window_mean(high, window, false);
      return (b1 + b2) / 2.0;
    }
    case SplitStrategy::median:
    case SplitStrategy::mean: {
      std::vector<double> all(values_pos.begin(), values_pos.end());
      all.insert(all.end(), values_neg.begin(), values_neg.end());
      if (all.empty()) throw ContractError("split_point: no values");
      if (strategy == SplitStrategy::mean) return exact_mean(all);
      const std::size_t mid = all.size() / 2;
      std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid), all.end());
      const double upper = all[mid];
      if (all.size() % 2 == 1) return upper;
      const double lower = *std::max_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid));
      return (lower + upper) / 2.0;
    }
  }
  throw ContractError("unknown split strategy");
}

// ---- exhaustive search ----------------------------------------------------------

double midpoint(double lo, double hi) noexcept {
  double m = (lo + hi) / 2.0;
  if (!std::isfinite(m)) m = lo / 2.0 + hi / 2.0;
  if (!(m >= lo) || !(m < hi)) m = lo;
  return m;
}

SplitScore best_exhaustive_split(const NodeView& node, std::span<const std::size_t> candidates,
                                 Criterion criterion, std::size_t minleaf) {
  const Dataset& ds = node.dataset();
  const auto idx = node.indices();
  const ClassCounts parent = count_classes(node);
  minleaf = std::max<std::size_t>(minleaf, 1);

  bool found = false;
  SplitScore best;
  best.criterion = criterion;

  std::vector<std::pair<double, int>> sorted(idx.size());
  const auto labels = ds.labels();
  for (std::size_t j : candidates) {
    if (j >= ds.d()) throw ContractError(fmt::format("candidate feature {} out of range", j));
    const auto col = ds.column(j);
    for (std::size_t k = 0; k < idx.size(); ++k) sorted[k] = {col[idx[k]], labels[idx[k]]};
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    ClassCounts left;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      if (sorted[k].second > 0) {
        ++left.pos;
      } else {
        ++left.neg;
      }
      if (!(sorted[k].first < sorted[k + 1].first)) continue;
      const ClassCounts right{parent.pos - left.pos, parent.neg - left.neg};
      if (left.total() < minleaf || right.total() < minleaf) continue;
      const double score = split_score(criterion, parent, left, right);
      const double threshold = midpoint(sorted[k].first, sorted[k + 1].first);
      const bool better =
          !found || score > best.score ||
          (score == best.score &&
           (j < best.feature || (j == best.feature && threshold < best.threshold)));
      if (better) {
        found = true;
        best.feature = j;
        best.threshold = threshold;
        best.score = score;
      }
    }
  }
  if (!found) {
    throw NoValidSplitError("no candidate feature admits a split at this node");
  }
  return best;
}

}  // namespace gmmltree
