#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "latsort/types.hpp"

namespace latsort {

enum class SchemeKind { KeyBased, TraversalBased };

/// Names accepted by the CLI and `scheme_kind`.
/// "mean-squared" | "lex" | "svd" | "sum" | "bfs" | "dfs" | "latent"
bool is_known_scheme(std::string_view name);
SchemeKind scheme_kind(std::string_view name);

/// Stable ascending sort of indices by key; ties keep input order.
std::vector<std::size_t> stable_argsort(const std::vector<double>& keys);

/// Sorts `x` ascending by `keys` (stable) and records the sorted keys.
SortedSequence sort_by_keys(const TokenSet& x, const std::vector<double>& keys);

/// Mean of squared components, the DR value behind mean-squared sort.
double mean_square(const Token& t);

/// Larger magnitudes first. Stored keys are the negated mean squares, so
/// they are non-decreasing along the sequence.
SortedSequence mean_squared_sort(const TokenSet& x);

/// Ascending lexicographic order over dimensions 1..N, stable. No keys.
SortedSequence lexicographical_sort(const TokenSet& x);

/// Sorts by the component sum h = x_1 + ... + x_N.
SortedSequence summation_sort(const TokenSet& x);

struct PowerIterationOptions {
  int max_iters = 10000;
  double tol = 1e-12;
};

/// Top principal direction of the centered tokens, by power iteration.
/// Returns an empty vector when the covariance is identically zero.
std::vector<double> principal_direction(const TokenSet& x,
                                        const PowerIterationOptions& opt = {});

/// Sorts by projection onto the direction of maximum variance.
SortedSequence svd_lowrank_sort(const TokenSet& x, const PowerIterationOptions& opt = {});

/// Edge tokens in first-traversal order of a breadth-first edge search.
/// Restarts at the smallest-index node with untraversed edges; neighbours are
/// visited in ascending index order.
SortedSequence bfs_sort(const Graph& g);

/// Depth-first counterpart of `bfs_sort` with the same tie rules.
SortedSequence dfs_sort(const Graph& g);

/// Per-token DR mapping for key-based schemes that have one
/// ("mean-squared" -> mean square, "sum" -> component sum). Used for the
/// ambiguity-grid export. Throws for schemes without a per-token mapping.
std::function<double(const Token&)> dr_mapping(std::string_view scheme);

/// Dispatch for the set-only schemes ("mean-squared", "lex", "svd", "sum").
SortedSequence sort_with_scheme(std::string_view scheme, const TokenSet& x);

}  // namespace latsort
