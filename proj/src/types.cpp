#include "latsort/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace latsort {

void check_token(const Token& t) {
  if (t.empty()) throw Error("token has dimension 0");
  for (double v : t) {
    if (!std::isfinite(v)) throw Error("token has a non-finite component");
  }
}

bool lex_less(const Token& a, const Token& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

TokenSet::TokenSet(std::vector<Token> tokens, std::string id)
    : tokens_(std::move(tokens)), id_(std::move(id)) {
  if (tokens_.empty()) throw Error("token set must contain at least one token");
  dim_ = tokens_.front().size();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    check_token(tokens_[i]);
    if (tokens_[i].size() != dim_) {
      std::ostringstream msg;
      msg << "ragged token set: token " << i << " has dimension " << tokens_[i].size()
          << ", expected " << dim_;
      throw Error(msg.str());
    }
  }
}

std::vector<std::vector<std::size_t>> TokenSet::duplicate_groups() const {
  std::map<Token, std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < tokens_.size(); ++i) seen[tokens_[i]].push_back(i);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [tok, idx] : seen) {
    if (idx.size() > 1) groups.push_back(idx);
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

std::vector<std::string> TokenSet::validate() const {
  std::vector<std::string> warnings;
  for (const auto& g : duplicate_groups()) {
    std::ostringstream msg;
    msg << "duplicate tokens at indices";
    for (auto i : g) msg << ' ' << i;
    warnings.push_back(msg.str());
  }
  return warnings;
}

bool operator==(const TokenSet& a, const TokenSet& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  auto x = a.tokens_;
  auto y = b.tokens_;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

void SortedSequence::check() const {
  if (!keys) return;
  if (keys->size() != rows.size()) throw Error("key count does not match row count");
  for (std::size_t i = 1; i < keys->size(); ++i) {
    if ((*keys)[i] < (*keys)[i - 1]) throw Error("sort keys are not non-decreasing");
  }
}

SortedSequence permute(const TokenSet& x, const std::vector<std::size_t>& order,
                       std::optional<std::vector<double>> keys) {
  SortedSequence out;
  out.rows.reserve(order.size());
  for (auto i : order) out.rows.push_back(x[i]);
  out.order = order;
  out.keys = std::move(keys);
  return out;
}

bool is_permutation_of(const SortedSequence& seq, const TokenSet& x) {
  if (seq.size() != x.size()) return false;
  auto a = seq.rows;
  auto b = x.tokens();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Graph::Graph(std::vector<Token> nodes, std::vector<Edge> edges, bool directed)
    : nodes_(std::move(nodes)), directed_(directed) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    check_token(nodes_[i]);
    if (nodes_[i].size() != nodes_.front().size()) {
      throw Error("node " + std::to_string(i) + " has inconsistent feature dimension");
    }
  }
  std::set<Edge> seen;
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= nodes_.size() || v >= nodes_.size()) {
      throw Error("edge (" + std::to_string(u) + "," + std::to_string(v) +
                  ") references a missing node");
    }
    if (!directed_) {
      // canonical order: lexicographic on features, index as tie-break
      bool swap = lex_less(nodes_[v], nodes_[u]) || (nodes_[u] == nodes_[v] && v < u);
      if (swap) std::swap(u, v);
      if (!seen.insert({u, v}).second) continue;
    }
    edges_.emplace_back(u, v);
  }
}

std::vector<std::vector<std::size_t>> Graph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(nodes_.size());
  for (auto [u, v] : edges_) {
    adj[u].push_back(v);
    if (!directed_) adj[v].push_back(u);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

bool Graph::has_self_loops() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.first == e.second; });
}

}  // namespace latsort
