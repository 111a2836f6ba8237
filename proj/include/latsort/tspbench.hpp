#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latsort/latent_sort.hpp"
#include "latsort/types.hpp"

namespace latsort {

/// Total Euclidean length of the open path visiting `points` in `order`.
double path_length(const TokenSet& points, const std::vector<std::size_t>& order);

struct PathCount {
  std::uint64_t longer = 0;
  std::uint64_t shorter = 0;
  std::uint64_t total = 0;
};

/// Enumerates the M!/2 open paths (a path and its reversal counted once) and
/// counts those strictly longer / strictly shorter than `length`.
PathCount count_paths(const TokenSet& points, double length);

inline constexpr std::size_t kMaxEnumerationPoints = 10;

/// Fraction of distinct open paths strictly longer than `candidate`.
double percentile_longer(const TokenSet& points, const std::vector<std::size_t>& candidate);

/// Brute-force shortest open path (first < last orientation).
std::vector<std::size_t> shortest_path(const TokenSet& points);

struct TspBenchConfig {
  int n_points = 8;
  int n_runs = 10;
  bool with_lgp = true;
  /// Uniform 2-D training sets of n_points tokens drawn for every run.
  int corpus_size = 2000;
  TrainConfig train = default_tsp_train_config();
  std::uint64_t seed = 0;

  static TrainConfig default_tsp_train_config();
};

struct TspBenchResult {
  std::vector<double> percentiles;
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single run.
  double std = 0.0;
};

/// Per run: fresh uniform test points, a model trained on a fresh corpus,
/// latent sort, percentile_longer. Fully determined by cfg.seed.
TspBenchResult run_tsp_benchmark(const TspBenchConfig& cfg);

/// CSV "n,runs,lgp,mean,std" with a header row.
std::string tsp_csv(const TspBenchConfig& cfg, const TspBenchResult& r);

}  // namespace latsort
