#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latsort {

/// Raised for every contract violation inside the library. The CLI maps it
/// to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point in R^N. Components are 64-bit floats.
using Token = std::vector<double>;

/// Throws unless `t` is non-empty and every component is finite.
void check_token(const Token& t);

/// Lexicographic comparison: first differing component decides.
bool lex_less(const Token& a, const Token& b);

/// Unordered collection of M >= 1 tokens sharing dimension N.
///
/// Storage order is kept (tie-breaking in the sorters is by input index) but
/// equality is multiset equality.
class TokenSet {
 public:
  TokenSet() = default;
  explicit TokenSet(std::vector<Token> tokens, std::string id = {});

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return tokens_.empty(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::string& id() const { return id_; }

  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  /// Groups of indices holding bit-identical tokens (only groups of size > 1).
  std::vector<std::vector<std::size_t>> duplicate_groups() const;

  /// Human-readable warnings about the set (currently: duplicate tokens).
  std::vector<std::string> validate() const;

  friend bool operator==(const TokenSet& a, const TokenSet& b);

 private:
  std::vector<Token> tokens_;
  std::size_t dim_ = 0;
  std::string id_;
};

/// An ordered arrangement Y of a token set.
struct SortedSequence {
  std::vector<Token> rows;
  /// 1-D sort keys in row order; non-decreasing when present.
  std::optional<std::vector<double>> keys;
  /// order[k] is the source index of rows[k]; empty when not tracked.
  std::vector<std::size_t> order;

  std::size_t size() const { return rows.size(); }
  std::size_t dim() const { return rows.empty() ? 0 : rows.front().size(); }

  /// Throws if keys are present but decreasing or of the wrong length.
  void check() const;
};

/// Builds the sequence obtained by applying `order` to `x`.
SortedSequence permute(const TokenSet& x, const std::vector<std::size_t>& order,
                       std::optional<std::vector<double>> keys = std::nullopt);

/// True when the rows of `seq` are a multiset permutation of `x`.
bool is_permutation_of(const SortedSequence& seq, const TokenSet& x);

using Edge = std::pair<std::size_t, std::size_t>;

/// Nodes with feature vectors plus an edge list.
class Graph {
 public:
  Graph() = default;
  /// Validates endpoints and feature dimensions. Undirected edges are stored
  /// once, endpoints in lexicographic order of their node features.
  Graph(std::vector<Token> nodes, std::vector<Edge> edges, bool directed);

  const std::vector<Token>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool directed() const { return directed_; }
  std::size_t node_dim() const { return nodes_.empty() ? 0 : nodes_.front().size(); }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  /// Sorted adjacency lists (both directions for undirected graphs).
  std::vector<std::vector<std::size_t>> adjacency() const;

  bool has_self_loops() const;

 private:
  std::vector<Token> nodes_;
  std::vector<Edge> edges_;
  bool directed_ = false;
};

}  // namespace latsort
