#include "latsort/tokenize.hpp"

#include <algorithm>

namespace latsort {

Token edge_token(const Graph& g, std::size_t e) {
  const auto [u, v] = g.edges().at(e);
  Token t;
  t.reserve(2 * g.node_dim());
  t.insert(t.end(), g.nodes()[u].begin(), g.nodes()[u].end());
  t.insert(t.end(), g.nodes()[v].begin(), g.nodes()[v].end());
  return t;
}

TokenSet tokenize_edges(const Graph& g) {
  if (g.num_edges() == 0) throw Error("empty graph tokenization");
  std::vector<Token> tokens;
  tokens.reserve(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) tokens.push_back(edge_token(g, e));
  return TokenSet(std::move(tokens));
}

SortedSequence swap_endpoints(const SortedSequence& seq) {
  SortedSequence out = seq;
  for (auto& row : out.rows) {
    if (row.size() % 2 != 0) throw Error("swap_endpoints needs even token dimension");
    const auto half = static_cast<std::ptrdiff_t>(row.size() / 2);
    std::rotate(row.begin(), row.begin() + half, row.end());
  }
  return out;
}

}  // namespace latsort
