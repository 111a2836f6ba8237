#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latsort/types.hpp"

namespace latsort {

/// Directed mean nearest-neighbour distance from `x` to `y`.
double emd(const TokenSet& x, const TokenSet& y);

/// max_x min_y ||x - y||.
double directed_hausdorff(const TokenSet& x, const TokenSet& y);

/// Symmetric Hausdorff distance.
double ehd(const TokenSet& x, const TokenSet& y);

struct SinkhornConfig {
  double epsilon = 0.01;
  int max_iter = 1000;
  /// Stop when the L1 row-marginal violation drops below this.
  double tol = 1e-6;
  std::size_t samples = 100;

  void check() const;
};

/// `samples` points at arc-length quantiles (k + 0.5) / samples of the
/// concatenated edges of a graph with 2-D nodes.
std::vector<Token> sample_edge_points(const Graph& g, std::size_t samples);

struct SinkhornResult {
  /// Entropic objective <pi, C> + eps KL(pi | a x b) at the final plan.
  double objective = 0.0;
  /// Transport part <pi, C>.
  double transport = 0.0;
  int iterations = 0;
  double marginal_violation = 0.0;
};

/// Log-domain Sinkhorn between uniformly weighted clouds, squared Euclidean
/// cost. Throws with the final violation when `max_iter` is exhausted.
SinkhornResult sinkhorn(const std::vector<Token>& a, const std::vector<Token>& b,
                        const SinkhornConfig& cfg);

/// Debiased Sinkhorn divergence between edge-sampled point clouds:
/// OT(a, b) - OT(a, a) / 2 - OT(b, b) / 2.
double smd(const Graph& a, const Graph& b, const SinkhornConfig& cfg = {});

struct Prf {
  std::size_t tp = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Greedy one-to-one matching of pairs within `match_tol`, nearest first,
/// ties by (index in x, index in y). TP is the number of matches.
Prf set_prf(const TokenSet& x, const TokenSet& y, double match_tol = 0.0);

enum class BaseLoss { L1, L2, Elastic };

/// Elementwise mean of |a - b| (L1), (a - b)^2 (L2), or their sum (Elastic).
double base_loss(const SortedSequence& a, const SortedSequence& b, BaseLoss kind);

/// base(pred, gt) + base(pred, swap_endpoints(gt)).
double undirected_loss(const SortedSequence& pred, const SortedSequence& gt, BaseLoss kind);

/// |x| - |y|.
long size_diff(const TokenSet& x, const TokenSet& y);

struct MetricsRow {
  std::string id;
  double emd = 0.0;
  double ehd = 0.0;
  std::optional<double> smd;
  Prf prf;
  long size_diff = 0;
};

/// CSV "id,emd,ehd,smd,precision,recall,f1,size_diff"; missing smd is empty.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

}  // namespace latsort
