#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latsort/latent_sort.hpp"
#include "latsort/types.hpp"

namespace latsort {

using Groups = std::vector<std::vector<std::size_t>>;

inline constexpr double kAmbiguityTol = 1e-9;

/// Partition of 0..M-1: indices whose keys are within `tol` (transitively)
/// share a group, as do bit-identical tokens. Groups are sorted and listed by
/// their smallest index.
Groups ambiguity_sets(const TokenSet& x, const std::vector<double>& keys,
                      double tol = kAmbiguityTol);

/// Throws unless `groups` partitions 0..m-1.
void check_partition(const Groups& groups, std::size_t m);

/// Rows of the sequence as an M x N matrix.
Eigen::MatrixXd to_matrix(const SortedSequence& seq);

/// sum_i || mean(A_i) - x_i ||^2, groups indexing rows of `y_star`.
double ambiguity_error(const SortedSequence& y_star, const Groups& groups);

/// p_ij = 1/|A_i| for j in A_i, else 0.
Eigen::MatrixXd uniform_ambiguity_P(const Groups& groups, std::size_t m);

/// ||P Y* - Y*||_F^2.
double sorting_error(const Eigen::MatrixXd& P, const SortedSequence& y_star);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// P(h_i < h_j) for independent Gaussians. With both variances zero:
/// 1 if mu_i < mu_j, 0 if mu_i > mu_j, 0.5 if equal.
double swap_probability(double mu_i, double var_i, double mu_j, double var_j);

struct LatentGaussianProfile {
  std::vector<double> mean;
  std::vector<double> var;

  std::size_t size() const { return mean.size(); }
  void check() const;
};

inline constexpr std::size_t kMaxRankEnumeration = 12;

/// p[k][i]: probability that element i lands at position k when every
/// pairwise comparison is treated as independent,
///   p[k][i] = sum_{S, |S| = k} prod_{j in S} c_ij prod_{j not in S, j != i} (1 - c_ij)
/// with c_ij = P(h_i > h_j) (k is 0-based). Columns sum to one; rows need
/// not for M >= 3 unless `normalize_rows` is set.
Eigen::MatrixXd rank_probability_matrix(const LatentGaussianProfile& profile,
                                        bool normalize_rows = false);

/// Neighbour-swap approximation. Column j with x = P(h_j < h_{j-1}) and
/// y = P(h_j < h_{j+1}) (x = 0 on the first, y = 1 on the last column):
///   p_jj = x(1-y) + y(1-x),  p_{j-1,j} = xy,  p_{j+1,j} = (1-x)(1-y).
/// Requires non-decreasing means.
Eigen::MatrixXd tridiagonal_P(const LatentGaussianProfile& profile);

/// True when every entry off the three central diagonals is exactly zero.
bool is_tridiagonal(const Eigen::MatrixXd& P);

struct NeighborBound {
  /// sum_i || p_{i,i-1} (x_{i-1} - x_i) + p_{i,i+1} (x_{i+1} - x_i) ||^2,
  /// boundary rows included with their existing neighbour.
  double exact = 0.0;
  /// sum_i (||p_{i,i-1} (x_{i-1} - x_i)|| + ||p_{i,i+1} (x_{i+1} - x_i)||)^2.
  double upper = 0.0;
  /// sum_i ||p_{i,i-1} (x_{i-1} - x_i)||^2 + ||p_{i,i+1} (x_{i+1} - x_i)||^2.
  /// Bounds `exact` only when the two terms do not point the same way.
  double split = 0.0;
};

NeighborBound neighbor_error_bound(const SortedSequence& y_star, const Eigen::MatrixXd& P);

/// Largest |row sum - 1| and |column sum - 1|.
double max_row_sum_deviation(const Eigen::MatrixXd& P);
double max_col_sum_deviation(const Eigen::MatrixXd& P);

struct EmpiricalConstants {
  double k_e = 0.0;
  double k_d = 0.0;
  double b = 0.0;
};

/// K_e from sampled token pairs (|dh| / ||dx||), K_d from sampled pairs and a
/// `grid`-point sweep of the latent range (||dx_hat|| / |dh|), B as the largest
/// reconstruction error over all of `data`. Deterministic given `seed`.
EmpiricalConstants empirical_constants(const LatentSortModel& m, const std::vector<Token>& data,
                                       std::size_t samples, std::uint64_t seed,
                                       std::size_t grid = 4096);

struct BoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Smallest (bound - observed) over checked pairs; +inf when none.
  double min_slack = 0.0;
};

/// Pairs with |h_i - h_j| <= eps must satisfy ||x_i - x_j|| <= 2B + K_d eps.
BoundCheck check_bounded_distance(const LatentSortModel& m, const std::vector<Token>& data,
                                  const EmpiricalConstants& c, double eps, std::size_t samples,
                                  std::uint64_t seed);

/// Pairs with ||x_i - x_j|| >= d (d >= 2B) must satisfy |h_i - h_j| >= (d - 2B) / K_d.
BoundCheck check_bounded_latent(const LatentSortModel& m, const std::vector<Token>& data,
                                const EmpiricalConstants& c, double d, std::size_t samples,
                                std::uint64_t seed);

struct SetReport {
  std::string id;
  std::size_t m = 0;
  Groups groups;
  Eigen::MatrixXd P;
  double error = 0.0;
  std::optional<NeighborBound> neighbor;
};

/// Ambiguity analysis of one sorted sequence with keys (groups from keys,
/// uniform P, ambiguity error, neighbour bound when P is tridiagonal).
SetReport analyze_sequence(const SortedSequence& seq, const std::string& id = {});

/// {"M":..,"P":[[..]],"error":..,"bounds":{..}} plus "id" and "groups".
std::string report_json(const SetReport& r);

}  // namespace latsort
