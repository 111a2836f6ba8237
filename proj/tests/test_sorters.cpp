#include <Eigen/Dense>

#include "doctest.h"
#include "latsort/sorters.hpp"
#include "latsort/tokenize.hpp"
#include "support.hpp"

using namespace latsort;
using namespace testing_support;

namespace {

std::vector<Token> rows_of(const std::vector<Token>& t) { return t; }

std::vector<std::size_t> order_by(const std::vector<double>& keys) {
  std::vector<std::size_t> idx(keys.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // insertion sort: stable by construction, independent of the library
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && keys[idx[j]] < keys[idx[j - 1]]; --j) std::swap(idx[j], idx[j - 1]);
  return idx;
}

std::vector<double> independent_keys(const std::string& scheme, const TokenSet& x) {
  std::vector<double> k;
  for (const auto& t : x) {
    double s = 0.0, sq = 0.0;
    for (double v : t) {
      s += v;
      sq += v * v;
    }
    k.push_back(scheme == "sum" ? s : -sq / static_cast<double>(t.size()));
  }
  return k;
}

Token edge_of(const Graph& g, std::size_t u, std::size_t v) {
  Token t = g.nodes()[u];
  t.insert(t.end(), g.nodes()[v].begin(), g.nodes()[v].end());
  return t;
}

}  // namespace

TEST_SUITE("sorters") {

TEST_CASE("mean squared examples") {
  auto s = mean_squared_sort(TokenSet({{1, 1}, {0, 0}, {0.5, 0}}));
  CHECK(s.rows == rows_of({{1, 1}, {0.5, 0}, {0, 0}}));
  REQUIRE(s.keys);
  CHECK(*s.keys == std::vector<double>{-1.0, -0.125, 0.0});

  auto tie = mean_squared_sort(TokenSet({{0.6, 0.8}, {-1, 0}}));
  CHECK(tie.rows == rows_of({{0.6, 0.8}, {-1, 0}}));
  auto tie2 = mean_squared_sort(TokenSet({{-1, 0}, {0.6, 0.8}}));
  CHECK(tie2.rows == rows_of({{-1, 0}, {0.6, 0.8}}));

  auto one = mean_squared_sort(TokenSet({{2, 3}}));
  CHECK(one.rows == rows_of({{2, 3}}));
}

TEST_CASE("lexicographic examples") {
  CHECK(lexicographical_sort(TokenSet({{0, 1}, {0, 0}, {1, 0}})).rows == rows_of({{0, 0}, {0, 1}, {1, 0}}));
  auto same = lexicographical_sort(TokenSet({{1, 1}, {0, 0}, {1, 1}}));
  CHECK(same.order == std::vector<std::size_t>{1, 0, 2});
  CHECK(lexicographical_sort(TokenSet({{3}, {-1}, {2}})).rows == rows_of({{-1}, {2}, {3}}));
  CHECK_FALSE(lexicographical_sort(TokenSet(std::vector<Token>{Token{1}})).keys.has_value());
}

TEST_CASE("summation keys") {
  auto s = summation_sort(TokenSet({{0.3, 0.7}, {0, 0}, {1, 1}}));
  CHECK(s.order == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("svd collinear example") {
  TokenSet x({{0, 0}, {1, 1}, {2, 2}, {0.5, 0.5}});
  // 2x2 covariance of points on y = x: eigenvector (1,1)/sqrt(2) in closed form
  Eigen::Matrix2d c;
  Eigen::Vector2d mean(0.875, 0.875);
  c.setZero();
  for (const auto& t : x) {
    Eigen::Vector2d d(t[0] - mean(0), t[1] - mean(1));
    c += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
  Eigen::Vector2d top = es.eigenvectors().col(1);
  if (top(0) < 0) top = -top;
  const auto dir = principal_direction(x);
  REQUIRE(dir.size() == 2);
  CHECK(dir[0] == doctest::Approx(top(0)).epsilon(1e-9));
  CHECK(dir[1] == doctest::Approx(top(1)).epsilon(1e-9));
  auto s = svd_lowrank_sort(x);
  CHECK(s.rows == rows_of({{0, 0}, {0.5, 0.5}, {1, 1}, {2, 2}}));
}

TEST_CASE("svd degenerate cases") {
  auto same = svd_lowrank_sort(TokenSet({{1, 2}, {1, 2}, {1, 2}}));
  CHECK(same.order == std::vector<std::size_t>{0, 1, 2});
  CHECK(*same.keys == std::vector<double>{0, 0, 0});
  auto one = svd_lowrank_sort(TokenSet({{4, 5}}));
  CHECK(one.rows == rows_of({{4, 5}}));
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    auto x = random_set(rng, 3 + rng.below(20), n);
    Eigen::MatrixXd y(x.size(), n);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = 0; k < n; ++k) y(i, k) = x[i][k];
    Eigen::MatrixXd centered = y.rowwise() - y.colwise().mean();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered.transpose() * centered);
    const auto& ev = es.eigenvalues();
    if (ev(n - 1) - ev(n - 2) < 1e-6 * ev(n - 1)) continue;
    const Eigen::VectorXd top = es.eigenvectors().col(n - 1);
    const auto dir = principal_direction(x);
    double dot = 0.0;
    for (std::size_t k = 0; k < n; ++k) dot += dir[k] * top(k);
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-9));
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(dir[k]) > std::abs(dir[big])) big = k;
    CHECK(dir[big] > 0);
  }
}

TEST_CASE("bfs and dfs examples") {
  Graph path({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, false);
  CHECK(bfs_sort(path).rows == rows_of({edge_of(path, 0, 1), edge_of(path, 1, 2)}));

  Graph star({{0, 0}, {1, 0}, {0, 1}, {-1, 0}}, {{0, 1}, {0, 2}, {0, 3}}, false);
  const std::vector<Token> star_rows{tokenize_edges(star)[0], tokenize_edges(star)[1], tokenize_edges(star)[2]};
  CHECK(bfs_sort(star).rows == star_rows);
  CHECK(dfs_sort(star).rows == star_rows);

  Graph tri({{0, 0}, {1, 0}, {1, 1}}, {{0, 1}, {1, 2}, {0, 2}}, false);
  const Token e01 = edge_of(tri, 0, 1), e12 = edge_of(tri, 1, 2), e02 = edge_of(tri, 0, 2);
  CHECK(dfs_sort(tri).rows == rows_of({e01, e12, e02}));
  CHECK(bfs_sort(tri).rows == rows_of({e01, e02, e12}));
}

TEST_CASE("traversal restarts per component and skips isolated nodes") {
  Graph g({{0, 0}, {5, 5}, {1, 0}, {6, 5}, {9, 9}}, {{1, 3}, {0, 2}}, false);
  auto s = bfs_sort(g);
  REQUIRE(s.size() == 2);
  CHECK(s.rows[0] == edge_of(g, 0, 2));
  CHECK(s.rows[1] == edge_of(g, 1, 3));
  CHECK(dfs_sort(g).rows == s.rows);
}

TEST_CASE("every scheme returns a permutation of its input") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    auto x = trial % 2 ? random_set(rng, 1 + rng.below(12), 1 + rng.below(4)) : tie_heavy_set(rng, 1 + rng.below(12), 2);
    for (const char* s : {"mean-squared", "lex", "svd", "sum"}) {
      auto seq = sort_with_scheme(s, x);
      CHECK(is_permutation_of(seq, x));
      CHECK_NOTHROW(seq.check());
    }
  }
}

TEST_CASE("key-based schemes equal an independent stable sort of their keys") {
  Rng rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = trial % 2 ? random_set(rng, 2 + rng.below(10), 3) : tie_heavy_set(rng, 2 + rng.below(10), 3);
    for (const std::string s : {"mean-squared", "sum"}) {
      const auto keys = independent_keys(s, x);
      CHECK(sort_with_scheme(s, x).order == order_by(keys));
      // strictly increasing transforms leave the permutation unchanged
      std::vector<double> cubed, shifted;
      for (double k : keys) {
        cubed.push_back(k * k * k + 2.0 * k);
        shifted.push_back(std::exp(k) - 4.0);
      }
      CHECK(order_by(cubed) == order_by(keys));
      CHECK(sort_by_keys(x, shifted).order == sort_with_scheme(s, x).order);
    }
  }
}

TEST_CASE("ties resolve by input index") {
  Rng rng(80);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = tie_heavy_set(rng, 8, 2);
    auto seq = sort_with_scheme("sum", x);
    for (std::size_t k = 1; k < seq.size(); ++k)
      if ((*seq.keys)[k] == (*seq.keys)[k - 1]) CHECK(seq.order[k - 1] < seq.order[k]);
  }
}

TEST_CASE("scheme names") {
  for (const char* s : {"mean-squared", "lex", "svd", "sum", "bfs", "dfs", "latent"}) CHECK(is_known_scheme(s));
  CHECK_FALSE(is_known_scheme("random"));
  CHECK(scheme_kind("bfs") == SchemeKind::TraversalBased);
  CHECK(scheme_kind("lex") == SchemeKind::KeyBased);
  CHECK_THROWS_AS(dr_mapping("svd"), Error);
  CHECK(dr_mapping("mean-squared")({1, 1}) == 1.0);
  CHECK(dr_mapping("sum")({0.25, 0.5}) == 0.75);
}

}
