#include "latsort/tspbench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latsort/datagen.hpp"
#include "latsort/io.hpp"
#include "latsort/rng.hpp"

namespace latsort {

namespace {

void check_permutation(const std::vector<std::size_t>& order, std::size_t m) {
  if (order.size() != m) throw Error("order length does not match the point count");
  std::vector<bool> seen(m, false);
  for (auto i : order) {
    if (i >= m || seen[i]) throw Error("order is not a permutation");
    seen[i] = true;
  }
}

double distance(const Token& a, const Token& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

// Edge lengths are summed in ascending order so that a path, its reversal and
// any relabeling of the points give bit-identical totals.
double sum_sorted(double* edges, std::size_t n) {
  std::sort(edges, edges + n);
  double len = 0.0;
  for (std::size_t k = 0; k < n; ++k) len += edges[k];
  return len;
}

std::vector<double> distance_matrix(const TokenSet& points) {
  const std::size_t m = points.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) d[i * m + j] = d[j * m + i] = distance(points[i], points[j]);
  return d;
}

// Calls f(perm, length) for every permutation with perm.front() < perm.back().
template <class F>
void for_each_open_path(const TokenSet& points, F&& f) {
  const std::size_t m = points.size();
  if (m > kMaxEnumerationPoints)
    throw Error("brute-force enumeration limited to " + std::to_string(kMaxEnumerationPoints) +
                " points; use a sampling estimate for larger sets");
  const auto d = distance_matrix(points);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (m == 1) {
    f(perm, 0.0);
    return;
  }
  double edges[kMaxEnumerationPoints];
  do {
    if (perm.front() > perm.back()) continue;
    for (std::size_t k = 0; k + 1 < m; ++k) edges[k] = d[perm[k] * m + perm[k + 1]];
    f(perm, sum_sorted(edges, m - 1));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

double path_length(const TokenSet& points, const std::vector<std::size_t>& order) {
  check_permutation(order, points.size());
  if (order.size() < 2) return 0.0;
  std::vector<double> edges(order.size() - 1);
  for (std::size_t k = 0; k + 1 < order.size(); ++k) edges[k] = distance(points[order[k]], points[order[k + 1]]);
  return sum_sorted(edges.data(), edges.size());
}

PathCount count_paths(const TokenSet& points, double length) {
  PathCount c;
  for_each_open_path(points, [&](const std::vector<std::size_t>&, double len) {
    ++c.total;
    if (len > length) ++c.longer;
    if (len < length) ++c.shorter;
  });
  return c;
}

double percentile_longer(const TokenSet& points, const std::vector<std::size_t>& candidate) {
  const double len = path_length(points, candidate);
  const auto c = count_paths(points, len);
  return static_cast<double>(c.longer) / static_cast<double>(c.total);
}

std::vector<std::size_t> shortest_path(const TokenSet& points) {
  std::vector<std::size_t> best;
  double best_len = INFINITY;
  for_each_open_path(points, [&](const std::vector<std::size_t>& perm, double len) {
    if (len < best_len) {
      best_len = len;
      best = perm;
    }
  });
  return best;
}

TrainConfig TspBenchConfig::default_tsp_train_config() {
  TrainConfig t;
  t.epochs = 300;
  t.batch_size = 32;
  t.peak_lr = 3e-3;
  t.hidden_sizes = {32, 32};
  t.lgp_coefficient = 0.05;
  t.lgp.beta = 0.3;
  return t;
}

TspBenchResult run_tsp_benchmark(const TspBenchConfig& cfg) {
  if (cfg.n_points < 2) throw Error("tsp benchmark needs at least 2 points");
  if (cfg.n_runs < 1) throw Error("tsp benchmark needs at least one run");
  if (cfg.corpus_size < 1) throw Error("training corpus must be non-empty");
  const auto n = static_cast<std::size_t>(cfg.n_points);

  TspBenchResult r;
  for (int run = 0; run < cfg.n_runs; ++run) {
    const auto run_seed = derive_seed(cfg.seed, "tsp-run", static_cast<std::uint64_t>(run));
    const auto corpus = generate_uniform_sets(n, 2, static_cast<std::size_t>(cfg.corpus_size),
                                              derive_seed(run_seed, "corpus"));
    const auto test = generate_uniform_sets(n, 2, 1, derive_seed(run_seed, "points")).front();
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(run_seed, "train");
    if (!cfg.with_lgp) tc.lgp_coefficient = 0.0;
    const auto model = train(corpus, tc).model;
    r.percentiles.push_back(percentile_longer(test, latent_sort(model, test).order));
  }
  const double k = static_cast<double>(r.percentiles.size());
  r.mean = std::accumulate(r.percentiles.begin(), r.percentiles.end(), 0.0) / k;
  if (r.percentiles.size() > 1) {
    double ss = 0.0;
    for (double p : r.percentiles) ss += (p - r.mean) * (p - r.mean);
    r.std = std::sqrt(ss / (k - 1.0));
  }
  return r;
}

std::string tsp_csv(const TspBenchConfig& cfg, const TspBenchResult& r) {
  return "n,runs,lgp,mean,std\n" + std::to_string(cfg.n_points) + "," +
         std::to_string(cfg.n_runs) + "," + (cfg.with_lgp ? "on" : "off") + "," +
         format_double(r.mean) + "," + format_double(r.std) + "\n";
}

}  // namespace latsort
