#include "latsort/sorters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "latsort/tokenize.hpp"

namespace latsort {

namespace {

constexpr std::string_view kSchemes[] = {"mean-squared", "lex", "svd", "sum",
                                         "bfs",          "dfs", "latent"};

// Number of times the normalized covariance is squared before iterating.
// Each power-iteration step then applies C^(2^kSquarings).
constexpr int kSquarings = 8;

}  // namespace

bool is_known_scheme(std::string_view name) {
  return std::find(std::begin(kSchemes), std::end(kSchemes), name) != std::end(kSchemes);
}

SchemeKind scheme_kind(std::string_view name) {
  if (!is_known_scheme(name)) throw Error("unknown ordering scheme: " + std::string(name));
  if (name == "bfs" || name == "dfs") return SchemeKind::TraversalBased;
  return SchemeKind::KeyBased;
}

std::vector<std::size_t> stable_argsort(const std::vector<double>& keys) {
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return idx;
}

SortedSequence sort_by_keys(const TokenSet& x, const std::vector<double>& keys) {
  if (keys.size() != x.size()) throw Error("key count does not match token count");
  auto order = stable_argsort(keys);
  std::vector<double> sorted(keys.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = keys[order[k]];
  return permute(x, order, std::move(sorted));
}

double mean_square(const Token& t) {
  double s = 0.0;
  for (double v : t) s += v * v;
  return s / static_cast<double>(t.size());
}

SortedSequence mean_squared_sort(const TokenSet& x) {
  std::vector<double> keys;
  keys.reserve(x.size());
  for (const auto& t : x) keys.push_back(-mean_square(t));
  return sort_by_keys(x, keys);
}

SortedSequence lexicographical_sort(const TokenSet& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(x[a], x[b]); });
  return permute(x, order);
}

SortedSequence summation_sort(const TokenSet& x) {
  std::vector<double> keys;
  keys.reserve(x.size());
  for (const auto& t : x) keys.push_back(std::accumulate(t.begin(), t.end(), 0.0));
  return sort_by_keys(x, keys);
}

std::vector<double> principal_direction(const TokenSet& x, const PowerIterationOptions& opt) {
  const auto m = static_cast<Eigen::Index>(x.size());
  const auto n = static_cast<Eigen::Index>(x.dim());
  Eigen::MatrixXd pts(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < n; ++k) pts(i, k) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  pts.rowwise() -= mean;
  Eigen::MatrixXd cov = (pts.transpose() * pts) / static_cast<double>(m);

  double scale = cov.norm();
  if (scale == 0.0) return {};
  Eigen::MatrixXd step = cov / scale;
  for (int s = 0; s < kSquarings; ++s) {
    step = step * step;
    const double nrm = step.norm();
    if (nrm == 0.0) break;
    step /= nrm;
  }

  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1e-3);
  v(0) += 1.0;
  v.normalize();
  double residual = 0.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    Eigen::VectorXd next = step * v;
    const double nrm = next.norm();
    if (nrm == 0.0) {
      // start vector fell into the numerical null space; use plain covariance
      next = cov * v;
      if (next.norm() == 0.0) return {};
    }
    next.normalize();
    residual = (next - v).norm();
    v = next;
    if (residual < opt.tol) {
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      if (v(arg) < 0) v = -v;
      return {v.data(), v.data() + v.size()};
    }
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << opt.max_iters
      << " iterations (residual " << residual << ")";
  throw Error(msg.str());
}

SortedSequence svd_lowrank_sort(const TokenSet& x, const PowerIterationOptions& opt) {
  auto dir = principal_direction(x, opt);
  if (dir.empty()) return sort_by_keys(x, std::vector<double>(x.size(), 0.0));
  std::vector<double> mean(x.dim(), 0.0);
  for (const auto& t : x)
    for (std::size_t k = 0; k < t.size(); ++k) mean[k] += t[k];
  for (auto& v : mean) v /= static_cast<double>(x.size());
  std::vector<double> keys;
  keys.reserve(x.size());
  for (const auto& t : x) {
    double p = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) p += (t[k] - mean[k]) * dir[k];
    keys.push_back(p);
  }
  return sort_by_keys(x, keys);
}

namespace {

struct Incidence {
  std::size_t neighbor;
  std::size_t edge;
};

// Per-node incidence lists sorted by (neighbour, edge id). Undirected edges
// appear at both endpoints; directed edges only at their source.
std::vector<std::vector<Incidence>> incidence_lists(const Graph& g) {
  std::vector<std::vector<Incidence>> inc(g.num_nodes());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges()[e];
    inc[u].push_back({v, e});
    if (!g.directed() && u != v) inc[v].push_back({u, e});
  }
  for (auto& l : inc) {
    std::sort(l.begin(), l.end(), [](const Incidence& a, const Incidence& b) {
      return a.neighbor != b.neighbor ? a.neighbor < b.neighbor : a.edge < b.edge;
    });
  }
  return inc;
}

SortedSequence edges_to_sequence(const Graph& g, const std::vector<std::size_t>& edge_order) {
  SortedSequence out;
  out.order = edge_order;
  for (auto e : edge_order) out.rows.push_back(edge_token(g, e));
  return out;
}

}  // namespace

SortedSequence bfs_sort(const Graph& g) {
  if (g.num_edges() == 0) throw Error("empty graph tokenization");
  const auto inc = incidence_lists(g);
  std::vector<bool> node_seen(g.num_nodes(), false);
  std::vector<bool> edge_seen(g.num_edges(), false);
  std::vector<std::size_t> order;
  for (std::size_t start = 0; start < g.num_nodes(); ++start) {
    if (node_seen[start] || inc[start].empty()) continue;
    std::deque<std::size_t> queue{start};
    node_seen[start] = true;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto& [v, e] : inc[u]) {
        if (!edge_seen[e]) {
          edge_seen[e] = true;
          order.push_back(e);
        }
        if (!node_seen[v]) {
          node_seen[v] = true;
          queue.push_back(v);
        }
      }
    }
  }
  // directed edges unreachable from any start node's out-edges
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (!edge_seen[e]) order.push_back(e);
  return edges_to_sequence(g, order);
}

SortedSequence dfs_sort(const Graph& g) {
  if (g.num_edges() == 0) throw Error("empty graph tokenization");
  const auto inc = incidence_lists(g);
  std::vector<bool> node_seen(g.num_nodes(), false);
  std::vector<bool> edge_seen(g.num_edges(), false);
  std::vector<std::size_t> cursor(g.num_nodes(), 0);
  std::vector<std::size_t> order;
  for (std::size_t start = 0; start < g.num_nodes(); ++start) {
    if (node_seen[start] || inc[start].empty()) continue;
    std::vector<std::size_t> stack{start};
    node_seen[start] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      bool advanced = false;
      while (cursor[u] < inc[u].size()) {
        const auto [v, e] = inc[u][cursor[u]++];
        if (edge_seen[e]) continue;
        edge_seen[e] = true;
        order.push_back(e);
        node_seen[v] = true;
        stack.push_back(v);
        advanced = true;
        break;
      }
      if (!advanced) stack.pop_back();
    }
  }
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (!edge_seen[e]) order.push_back(e);
  return edges_to_sequence(g, order);
}

std::function<double(const Token&)> dr_mapping(std::string_view scheme) {
  if (scheme == "mean-squared") return [](const Token& t) { return mean_square(t); };
  if (scheme == "sum")
    return [](const Token& t) { return std::accumulate(t.begin(), t.end(), 0.0); };
  throw Error("scheme '" + std::string(scheme) + "' has no per-token DR mapping");
}

SortedSequence sort_with_scheme(std::string_view scheme, const TokenSet& x) {
  if (scheme == "mean-squared") return mean_squared_sort(x);
  if (scheme == "lex") return lexicographical_sort(x);
  if (scheme == "svd") return svd_lowrank_sort(x);
  if (scheme == "sum") return summation_sort(x);
  throw Error("scheme '" + std::string(scheme) + "' needs a graph or a model");
}

}  // namespace latsort
