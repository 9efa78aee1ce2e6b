#include "gmmltree/forest.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "gmmltree/errors.hpp"

namespace gmmltree {

std::uint64_t tree_seed(std::uint64_t master, std::size_t t) noexcept {
  return derive_seed(master, 0x7EE5000000000000ULL + t);
}

namespace {

Tree grow_member(const Dataset& ds, const ForestConfig& config, std::uint64_t seed) {
  TrainConfig tc = config.tree_config;
  tc.seed = derive_seed(seed, 1);
  if (!config.subspaces) tc.mtry = Mtry::all();
  if (config.bootstrap) return grow(bootstrap_sample(ds, derive_seed(seed, 2)), tc);
  return grow(NodeView::all(ds), tc);
}

}  // namespace

Forest grow_forest(const Dataset& ds, const ForestConfig& config) {
  if (config.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (ds.count(1) == 0 || ds.count(-1) == 0) {
    throw LabelError(fmt::format("dataset '{}' has a single class", ds.name()));
  }
  config.tree_config.validate(ds.d());

  Forest f;
  f.config = config;
  f.d = ds.d();
  f.trees.resize(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    f.per_tree_seeds.push_back(tree_seed(config.seed, t));
  }

  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.n_trees);
  if (workers == 1) {
    for (std::size_t t = 0; t < config.n_trees; ++t) {
      f.trees[t] = grow_member(ds, config, f.per_tree_seeds[t]);
    }
  } else {
    // Strided assignment; each tree only depends on its own seed.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < config.n_trees; t += workers) {
            f.trees[t] = grow_member(ds, config, f.per_tree_seeds[t]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  f.train_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return f;
}

Votes forest_votes(const Forest& f, std::span<const double> x) {
  if (x.size() != f.d) {
    throw DimensionError(fmt::format("expected {} features, got {}", f.d, x.size()));
  }
  Votes v;
  for (const auto& tree : f.trees) {
    if (predict(tree, x) > 0) {
      ++v.pos;
    } else {
      ++v.neg;
    }
  }
  return v;
}

int predict_forest(const Forest& f, std::span<const double> x) {
  return forest_votes(f, x).winner();
}

std::vector<int> predict_forest(const Forest& f, const Dataset& ds) {
  if (ds.d() != f.d) {
    throw DimensionError(fmt::format("expected {} features, got {}", f.d, ds.d()));
  }
  std::vector<std::size_t> pos(ds.n(), 0);
  for (const auto& tree : f.trees) {
    const auto labels = predict(tree, ds);
    for (std::size_t i = 0; i < ds.n(); ++i) pos[i] += labels[i] > 0 ? 1 : 0;
  }
  std::vector<int> out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out[i] = Votes{pos[i], f.trees.size() - pos[i]}.winner();
  }
  return out;
}

}  // namespace gmmltree
