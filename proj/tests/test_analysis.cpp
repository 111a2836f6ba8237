#include <numeric>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "latsort/analysis.hpp"
#include "latsort/sorters.hpp"
#include "support.hpp"

using namespace latsort;
using namespace testing_support;

namespace {

SortedSequence seq_of(std::vector<Token> rows) {
  SortedSequence s;
  s.rows = std::move(rows);
  return s;
}

// Poisson-binomial rank distribution of element i: its position is the number
// of j with h_j < h_i, each an independent Bernoulli(c_ij).
Eigen::MatrixXd rank_dp(const LatentGaussianProfile& p) {
  const std::size_t m = p.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> dist{1.0};
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double c = swap_probability(p.mean[j], p.var[j], p.mean[i], p.var[i]);
      std::vector<double> next(dist.size() + 1, 0.0);
      for (std::size_t k = 0; k < dist.size(); ++k) {
        next[k] += dist[k] * (1.0 - c);
        next[k + 1] += dist[k] * c;
      }
      dist = next;
    }
    for (std::size_t k = 0; k < m; ++k) out(k, i) = dist[k];
  }
  return out;
}

Eigen::MatrixXd rank_monte_carlo(const LatentGaussianProfile& p, int samples, std::uint64_t seed) {
  const std::size_t m = p.size();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> h(m);
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < m; ++i) h[i] = p.mean[i] + std::sqrt(p.var[i]) * nd(gen);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t rank = 0;
      for (std::size_t j = 0; j < m; ++j) rank += h[j] < h[i];
      counts(rank, i) += 1.0;
    }
  }
  return counts / samples;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n - 1) / 2.0;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  return num / std::sqrt(da * db);
}

// Convex combination of random permutation matrices.
Eigen::MatrixXd random_doubly_stochastic(Rng& rng, std::size_t m, int terms) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const double w = rng.uniform(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) P(i, perm[i]) += w;
    total += w;
  }
  return P / total;
}

Groups random_groups(Rng& rng, std::size_t m) {
  std::vector<std::size_t> label(m);
  for (auto& l : label) l = rng.below(3);
  Groups g;
  for (std::size_t lab = 0; lab < 3; ++lab) {
    std::vector<std::size_t> grp;
    for (std::size_t i = 0; i < m; ++i)
      if (label[i] == lab) grp.push_back(i);
    if (!grp.empty()) g.push_back(grp);
  }
  return g;
}

LatentGaussianProfile ascending_profile(Rng& rng, std::size_t m, double gap, double var) {
  LatentGaussianProfile p;
  double mu = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mu += gap * rng.uniform(0.5, 1.5);
    p.mean.push_back(mu);
    p.var.push_back(var * rng.uniform(0.5, 1.5));
  }
  return p;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("ambiguity set examples") {
  CHECK(ambiguity_sets(TokenSet({{0.0}, {1.0}, {2.0}}), {0.0, 1.0, 2.0}) == Groups{{0}, {1}, {2}});
  TokenSet ms({{1, 0}, {0, 1}});
  const auto f = dr_mapping("mean-squared");
  CHECK(ambiguity_sets(ms, {f(ms[0]), f(ms[1])}) == Groups{{0, 1}});
  TokenSet sums({{0.3, 0.7}, {0.7, 0.3}, {0, 0}});
  const auto g = dr_mapping("sum");
  CHECK(ambiguity_sets(sums, {g(sums[0]), g(sums[1]), g(sums[2])}) == Groups{{0, 1}, {2}});
}

TEST_CASE("ambiguity chains are transitive and duplicates group") {
  TokenSet x({{0.0}, {1.0}, {2.0}, {3.0}});
  CHECK(ambiguity_sets(x, {0.0, 0.6e-9, 1.2e-9, 5.0}) == Groups{{0, 1, 2}, {3}});
  TokenSet dup({{1.0}, {2.0}, {1.0}});
  CHECK(ambiguity_sets(dup, {0.0, 1.0, 2.0}) == Groups{{0, 2}, {1}});
}

TEST_CASE("partition validation") {
  CHECK_NOTHROW(check_partition({{0, 2}, {1}}, 3));
  CHECK_THROWS_AS(check_partition({{0, 1}}, 3), Error);
  CHECK_THROWS_AS(check_partition({{0, 1}, {1, 2}}, 3), Error);
}

TEST_CASE("ambiguity error examples") {
  auto y = seq_of({{0.0, 0.0}, {3.0, 4.0}, {7.0, 1.0}});
  CHECK(ambiguity_error(y, {{0}, {1}, {2}}) == 0.0);
  CHECK(ambiguity_error(y, {{0, 1}, {2}}) == doctest::Approx(25.0 / 2.0));
}

TEST_CASE("ambiguity error equals the uniform P product") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto y = seq_of(random_set(rng, 6, 3).tokens());
    auto g = random_groups(rng, 6);
    Eigen::MatrixXd Y = to_matrix(y);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(6, 6);
    for (const auto& grp : g)
      for (auto i : grp)
        for (auto j : grp) P(i, j) = 1.0 / grp.size();
    const double direct = (P * Y - Y).squaredNorm();
    CHECK(std::abs(ambiguity_error(y, g) - direct) <= 1e-12 * std::max(1.0, direct));
    CHECK(std::abs(sorting_error(uniform_ambiguity_P(g, 6), y) - direct) <= 1e-12 * std::max(1.0, direct));
    CHECK(max_row_sum_deviation(uniform_ambiguity_P(g, 6)) <= 1e-12);
  }
}

TEST_CASE("uniform P examples") {
  CHECK(uniform_ambiguity_P({{0}, {1}, {2}}, 3).isIdentity());
  CHECK(uniform_ambiguity_P({{0, 1}}, 2) == Eigen::MatrixXd::Constant(2, 2, 0.5));
}

TEST_CASE("sorting error examples") {
  auto y = seq_of({{1.0, 2.0}, {4.0, 6.0}});
  CHECK(sorting_error(Eigen::MatrixXd::Identity(2, 2), y) == 0.0);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(sorting_error(swap, y) == doctest::Approx(2 * 25.0));
  CHECK_THROWS_AS(sorting_error(Eigen::MatrixXd::Identity(3, 3), y), Error);
}

TEST_CASE("error grows with distance from the identity") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    auto y = seq_of(random_set(rng, 7, 2).tokens());
    const Eigen::MatrixXd Q = random_doubly_stochastic(rng, 7, 4);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(7, 7);
    double prev_dist = -1.0, prev_err = -1.0;
    for (int s = 0; s <= 10; ++s) {
      const Eigen::MatrixXd P = (1.0 - s / 10.0) * I + (s / 10.0) * Q;
      const double dist = (P - I).squaredNorm();
      const double err = sorting_error(P, y);
      CHECK(dist >= prev_dist);
      CHECK(err >= prev_err);
      prev_dist = dist;
      prev_err = err;
    }
  }
  // unrelated doubly-stochastic draws still correlate positively
  auto y = seq_of(random_set(rng, 7, 2).tokens());
  std::vector<double> dist, err;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(7, 7);
  for (int k = 0; k < 400; ++k) {
    const double t = rng.uniform(0.0, 1.0);
    const Eigen::MatrixXd P = (1.0 - t) * I + t * random_doubly_stochastic(rng, 7, 3);
    dist.push_back((P - I).squaredNorm());
    err.push_back(sorting_error(P, y));
  }
  CHECK(spearman(dist, err) > 0.0);
}

TEST_CASE("normal cdf reference values") {
  CHECK(std::abs(normal_cdf(1.0) - 0.8413447460685429) <= 1e-12);
  CHECK(std::abs(normal_cdf(-3.0) - 0.0013498980316300946) <= 1e-12);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(std::abs(normal_cdf(-8.0) - 6.22096057427178e-16) <= 1e-12);
}

TEST_CASE("swap probability") {
  CHECK(swap_probability(0.3, 0.2, 0.3, 0.7) == 0.5);
  CHECK(std::abs(swap_probability(0.0, 0.5, 1.0, 0.5) - 0.8413447460685429) <= 1e-12);
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), va = rng.uniform(0.01, 1), vb = rng.uniform(0.01, 1);
    CHECK(swap_probability(a, va, b, vb) + swap_probability(b, vb, a, va) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(swap_probability(0.0, 0.0, 1.0, 0.0) == 1.0);
  CHECK(swap_probability(1.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(swap_probability(1.0, 0.0, 1.0, 0.0) == 0.5);
}

TEST_CASE("rank probabilities for two latents match Monte Carlo") {
  LatentGaussianProfile p{{0.0, 0.4}, {0.3, 0.2}};
  const Eigen::MatrixXd P = rank_probability_matrix(p);
  const double c01 = swap_probability(p.mean[1], p.var[1], p.mean[0], p.var[0]);
  const double c10 = 1.0 - c01;
  CHECK(P(0, 0) == doctest::Approx(1.0 - c01));
  CHECK(P(0, 1) == doctest::Approx(1.0 - c10));
  const Eigen::MatrixXd mc = rank_monte_carlo(p, 1000000, 34);
  CHECK((P - mc).cwiseAbs().maxCoeff() < 0.005);
  CHECK(max_row_sum_deviation(P) <= 1e-12);
}

TEST_CASE("rank probabilities match the independent-comparison recursion") {
  Rng rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + rng.below(8);
    LatentGaussianProfile p;
    for (std::size_t i = 0; i < m; ++i) {
      p.mean.push_back(rng.uniform(-1, 1));
      p.var.push_back(rng.uniform(0.0, 0.5));
    }
    const Eigen::MatrixXd P = rank_probability_matrix(p);
    CHECK((P - rank_dp(p)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(max_col_sum_deviation(P) <= 1e-9);
    CHECK(max_row_sum_deviation(rank_probability_matrix(p, true)) <= 1e-9);
  }
}

TEST_CASE("rank probability special cases") {
  LatentGaussianProfile collapsed{{0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}};
  CHECK(rank_probability_matrix(collapsed).isIdentity());
  LatentGaussianProfile same{{0.5, 0.5, 0.5}, {0.2, 0.2, 0.2}};
  // each of the two comparisons is a fair coin, so ranks are binomial(2, 1/2)
  Eigen::MatrixXd P = rank_probability_matrix(same);
  CHECK(P(0, 0) == doctest::Approx(0.25));
  CHECK(P(1, 0) == doctest::Approx(0.5));
  Eigen::MatrixXd N = rank_probability_matrix(same, true);
  CHECK((N.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-12);
  LatentGaussianProfile big;
  big.mean.assign(13, 0.0);
  big.var.assign(13, 1.0);
  CHECK_THROWS_AS(rank_probability_matrix(big), Error);
}

TEST_CASE("rank probabilities for three latents versus sampling") {
  // the independence approximation is reported, not asserted
  LatentGaussianProfile p{{0.0, 0.2, 0.5}, {0.1, 0.1, 0.1}};
  const Eigen::MatrixXd P = rank_probability_matrix(p);
  const Eigen::MatrixXd mc = rank_monte_carlo(p, 200000, 36);
  MESSAGE("max deviation from sampling: " << (P - mc).cwiseAbs().maxCoeff());
  CHECK(max_row_sum_deviation(P) > 0.0);
}

TEST_CASE("tridiagonal approximation") {
  LatentGaussianProfile zero{{0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 0.0, 0.0, 0.0}};
  CHECK(tridiagonal_P(zero).isIdentity());
  LatentGaussianProfile bad{{0.0, 2.0, 1.0}, {0.1, 0.1, 0.1}};
  CHECK_THROWS_AS(tridiagonal_P(bad), Error);

  Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = ascending_profile(rng, 2 + rng.below(9), 1.0, 0.3);
    const Eigen::MatrixXd P = tridiagonal_P(p);
    CHECK(is_tridiagonal(P));
    CHECK(max_col_sum_deviation(P) <= 1e-9);
    CHECK((P.array() >= 0.0).all());
    CHECK((P.array() <= 1.0).all());
    const std::size_t m = p.size();
    for (std::size_t j = 0; j < m; ++j) {
      const double x = j ? swap_probability(p.mean[j], p.var[j], p.mean[j - 1], p.var[j - 1]) : 0.0;
      const double y = j + 1 < m ? swap_probability(p.mean[j], p.var[j], p.mean[j + 1], p.var[j + 1]) : 1.0;
      CHECK(P(j, j) == doctest::Approx(x * (1 - y) + y * (1 - x)));
      if (j) CHECK(P(j - 1, j) == doctest::Approx(x * y));
      if (j + 1 < m) CHECK(P(j + 1, j) == doctest::Approx((1 - x) * (1 - y)));
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    auto tight = p;
    for (auto& v : tight.var) v /= 10.0;
    CHECK((tridiagonal_P(tight) - I).squaredNorm() < (P - I).squaredNorm());
  }
}

TEST_CASE("tridiagonal approximation collapses as variance vanishes") {
  Rng rng(38);
  auto p = ascending_profile(rng, 6, 1.0, 0.5);
  double prev = 1e9;
  for (int k = 0; k < 8; ++k) {
    const double d = (tridiagonal_P(p) - Eigen::MatrixXd::Identity(6, 6)).squaredNorm();
    CHECK(d <= prev);
    prev = d;
    for (auto& v : p.var) v /= 4.0;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("neighbour bound examples") {
  auto y = seq_of({{0.0}, {1.0}, {2.0}, {3.0}});
  auto id = neighbor_error_bound(y, Eigen::MatrixXd::Identity(4, 4));
  CHECK(id.exact == 0.0);
  CHECK(id.upper == 0.0);

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    P(i, i) = 0.6;
    if (i) P(i, i - 1) = 0.2;
    if (i < 3) P(i, i + 1) = 0.2;
  }
  auto b = neighbor_error_bound(y, P);
  CHECK(b.exact < b.upper);
  // interior rows cancel, each boundary row keeps 0.2^2
  CHECK(b.exact == doctest::Approx(2 * 0.04));
  CHECK_THROWS_AS(neighbor_error_bound(y, Eigen::MatrixXd::Constant(4, 4, 0.25)), Error);
}

TEST_CASE("neighbour bound properties") {
  Rng rng(39);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(8);
    auto y = seq_of(random_set(rng, m, 2).tokens());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = i ? rng.uniform(0, 0.5) : 0.0;
      const double hi = i + 1 < m ? rng.uniform(0, 0.5) : 0.0;
      P(i, i) = 1.0 - lo - hi;
      if (i) P(i, i - 1) = lo;
      if (i + 1 < m) P(i, i + 1) = hi;
    }
    auto b = neighbor_error_bound(y, P);
    CHECK(b.exact <= b.upper * (1 + 1e-12) + 1e-15);
    CHECK(std::abs(b.exact - sorting_error(P, y)) <= 1e-12 * std::max(1.0, b.exact));
    CHECK(b.split <= b.upper * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("literal split form can undershoot when differences align") {
  auto y = seq_of({{0.0}, {1.0}, {0.0}});
  Eigen::MatrixXd P(3, 3);
  P << 1, 0, 0, 0.5, 0, 0.5, 0, 0, 1;
  auto b = neighbor_error_bound(y, P);
  CHECK(b.exact == doctest::Approx(1.0));
  CHECK(b.split == doctest::Approx(0.5));
  CHECK(b.upper == doctest::Approx(1.0));
}

TEST_CASE("empirical constants of an identity model") {
  LatentSortModel m;
  m.token_dim = 1;
  m.encoder.layer_sizes = {1, 1};
  m.encoder.weights = {Eigen::MatrixXd::Identity(1, 1)};
  m.encoder.biases = {Eigen::VectorXd::Zero(1)};
  m.decoder = m.encoder;
  std::vector<Token> data;
  Rng rng(40);
  for (int i = 0; i < 200; ++i) data.push_back({rng.uniform(-2, 2)});
  auto c = empirical_constants(m, data, 500, 1);
  CHECK(c.k_d == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.k_e == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.b == 0.0);
  auto again = empirical_constants(m, data, 500, 1);
  CHECK(again.k_d == c.k_d);
}

TEST_CASE("bound checks on a trained model") {
  Rng rng(41);
  std::vector<TokenSet> train_sets;
  std::vector<Token> all;
  for (int s = 0; s < 8; ++s) {
    train_sets.push_back(random_set(rng, 8, 2, 0.0, 1.0));
    for (const auto& t : train_sets.back()) all.push_back(t);
  }
  TrainConfig cfg;
  cfg.epochs = 150;
  cfg.hidden_sizes = {16, 16};
  cfg.batch_size = 4;
  cfg.peak_lr = 3e-3;
  cfg.lgp.beta = 0.3;
  auto r = train(train_sets, cfg);
  auto c = empirical_constants(r.model, all, 2000, 2);
  double mean_err = 0.0;
  for (const auto& t : all) {
    const auto y = reconstruct(r.model, t);
    mean_err += std::hypot(y[0] - t[0], y[1] - t[1]);
  }
  mean_err /= static_cast<double>(all.size());
  CHECK(c.b >= mean_err);
  auto d1 = check_bounded_distance(r.model, all, c, 0.05, 5000, 3);
  CHECK(d1.violations == 0);
  auto d2 = check_bounded_latent(r.model, all, c, 2.0 * c.b + 0.05, 5000, 4);
  CHECK(d2.violations == 0);
  CHECK_THROWS_AS(check_bounded_latent(r.model, all, c, c.b, 10, 5), Error);
}

TEST_CASE("sequence reports") {
  auto seq = mean_squared_sort(TokenSet({{1, 0}, {0, 1}, {0.2, 0.1}}));
  auto r = analyze_sequence(seq, "s1");
  CHECK(r.m == 3);
  CHECK(r.groups == Groups{{0, 1}, {2}});
  CHECK(r.error == doctest::Approx(1.0));
  REQUIRE(r.neighbor);
  CHECK(r.neighbor->exact == doctest::Approx(r.error));
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["id"] == "s1");
  CHECK(j["M"] == 3);
  CHECK(j["P"][0][1] == 0.5);
  CHECK(j["error"].get<double>() == doctest::Approx(1.0));
  CHECK(j["bounds"].contains("neighbor_upper"));

  auto lex = lexicographical_sort(TokenSet({{1, 1}, {0, 0}, {1, 1}}));
  auto rl = analyze_sequence(lex);
  CHECK(rl.groups == Groups{{0}, {1, 2}});
  CHECK(rl.error == 0.0);
}

}
