#pragma once

#include "latsort/types.hpp"

namespace latsort {

/// Edge token for edge `e` of `g`: features(u) followed by features(v).
/// Undirected edges are already stored in canonical endpoint order.
Token edge_token(const Graph& g, std::size_t e);

/// One token per edge, in edge-list order. Throws on an empty edge list.
TokenSet tokenize_edges(const Graph& g);

/// Exchanges the two endpoint halves of every row; row order is unchanged.
/// Keys and order are carried over. Throws on odd token dimension.
SortedSequence swap_endpoints(const SortedSequence& seq);

}  // namespace latsort
