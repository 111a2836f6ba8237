#include "latsort/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "latsort/io.hpp"
#include "latsort/rng.hpp"
#include "latsort/sorters.hpp"

namespace latsort {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

void unite(std::vector<std::size_t>& parent, std::size_t a, std::size_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

double norm(const Token& a, const Token& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

void check_square(const Eigen::MatrixXd& P, std::size_t m) {
  if (P.rows() != static_cast<Eigen::Index>(m) || P.cols() != static_cast<Eigen::Index>(m))
    throw Error("P must be " + std::to_string(m) + "x" + std::to_string(m));
}

}  // namespace

Groups ambiguity_sets(const TokenSet& x, const std::vector<double>& keys, double tol) {
  const std::size_t m = x.size();
  if (keys.size() != m) throw Error("key count does not match the token count");
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto order = stable_argsort(keys);
  for (std::size_t k = 1; k < m; ++k)
    if (std::abs(keys[order[k]] - keys[order[k - 1]]) <= tol) unite(parent, order[k], order[k - 1]);
  for (const auto& dup : x.duplicate_groups())
    for (std::size_t k = 1; k < dup.size(); ++k) unite(parent, dup[0], dup[k]);

  Groups groups;
  std::vector<std::size_t> slot(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = find_root(parent, i);
    if (slot[r] == m) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

void check_partition(const Groups& groups, std::size_t m) {
  std::vector<bool> seen(m, false);
  std::size_t count = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw Error("empty ambiguity group");
    for (auto i : g) {
      if (i >= m || seen[i]) throw Error("ambiguity groups do not partition the indices");
      seen[i] = true;
      ++count;
    }
  }
  if (count != m) throw Error("ambiguity groups do not cover every index");
}

Eigen::MatrixXd to_matrix(const SortedSequence& seq) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(seq.size()), static_cast<Eigen::Index>(seq.dim()));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.rows[i].size() != seq.dim()) throw Error("ragged sequence rows");
    for (std::size_t k = 0; k < seq.dim(); ++k)
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = seq.rows[i][k];
  }
  return y;
}

double ambiguity_error(const SortedSequence& y_star, const Groups& groups) {
  check_partition(groups, y_star.size());
  const std::size_t n = y_star.dim();
  double err = 0.0;
  for (const auto& g : groups) {
    Token mean(n, 0.0);
    for (auto j : g)
      for (std::size_t k = 0; k < n; ++k) mean[k] += y_star.rows[j][k];
    for (auto& v : mean) v /= static_cast<double>(g.size());
    for (auto i : g) {
      const double d = norm(mean, y_star.rows[i]);
      err += d * d;
    }
  }
  return err;
}

Eigen::MatrixXd uniform_ambiguity_P(const Groups& groups, std::size_t m) {
  check_partition(groups, m);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (const auto& g : groups) {
    const double w = 1.0 / static_cast<double>(g.size());
    for (auto i : g)
      for (auto j : g) P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
  }
  return P;
}

double sorting_error(const Eigen::MatrixXd& P, const SortedSequence& y_star) {
  check_square(P, y_star.size());
  const Eigen::MatrixXd y = to_matrix(y_star);
  return (P * y - y).squaredNorm();
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double swap_probability(double mu_i, double var_i, double mu_j, double var_j) {
  if (!std::isfinite(mu_i) || !std::isfinite(mu_j)) throw Error("latent means must be finite");
  if (!(var_i >= 0) || !(var_j >= 0)) throw Error("latent variances must be non-negative");
  const double s = var_i + var_j;
  if (s == 0.0) return mu_i < mu_j ? 1.0 : (mu_i > mu_j ? 0.0 : 0.5);
  return normal_cdf(-(mu_i - mu_j) / std::sqrt(s));
}

void LatentGaussianProfile::check() const {
  if (mean.empty()) throw Error("empty latent profile");
  if (var.size() != mean.size()) throw Error("profile means and variances differ in length");
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (!std::isfinite(mean[i])) throw Error("profile means must be finite");
    if (!(var[i] >= 0) || !std::isfinite(var[i])) throw Error("profile variances must be finite and non-negative");
  }
}

Eigen::MatrixXd rank_probability_matrix(const LatentGaussianProfile& profile, bool normalize_rows) {
  profile.check();
  const std::size_t m = profile.size();
  if (m > kMaxRankEnumeration)
    throw Error("rank probability enumeration supports at most " +
                std::to_string(kMaxRankEnumeration) + " elements");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> others;
  std::vector<double> c;
  for (std::size_t i = 0; i < m; ++i) {
    others.clear();
    c.clear();
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) {
        others.push_back(j);
        // c_ij = P(h_i > h_j) = P(h_j < h_i)
        c.push_back(swap_probability(profile.mean[j], profile.var[j], profile.mean[i], profile.var[i]));
      }
    const std::size_t subsets = std::size_t{1} << others.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      double prod = 1.0;
      for (std::size_t k = 0; k < others.size(); ++k) prod *= (mask >> k & 1U) ? c[k] : 1.0 - c[k];
      p(static_cast<Eigen::Index>(std::popcount(mask)), static_cast<Eigen::Index>(i)) += prod;
    }
  }
  if (normalize_rows)
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      const double s = p.row(k).sum();
      if (s > 0) p.row(k) /= s;
    }
  return p;
}

Eigen::MatrixXd tridiagonal_P(const LatentGaussianProfile& profile) {
  profile.check();
  const std::size_t m = profile.size();
  for (std::size_t i = 1; i < m; ++i)
    if (profile.mean[i] < profile.mean[i - 1])
      throw Error("tridiagonal P needs non-decreasing latent means");
  const auto& mu = profile.mean;
  const auto& var = profile.var;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const double x = j == 0 ? 0.0 : swap_probability(mu[j], var[j], mu[j - 1], var[j - 1]);
    const double y = j + 1 == m ? 1.0 : swap_probability(mu[j], var[j], mu[j + 1], var[j + 1]);
    const auto jj = static_cast<Eigen::Index>(j);
    P(jj, jj) = x * (1.0 - y) + y * (1.0 - x);
    if (j > 0) P(jj - 1, jj) = x * y;
    if (j + 1 < m) P(jj + 1, jj) = (1.0 - x) * (1.0 - y);
  }
  return P;
}

bool is_tridiagonal(const Eigen::MatrixXd& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j)
      if (std::abs(i - j) > 1 && P(i, j) != 0.0) return false;
  return true;
}

NeighborBound neighbor_error_bound(const SortedSequence& y_star, const Eigen::MatrixXd& P) {
  const std::size_t m = y_star.size();
  check_square(P, m);
  if (!is_tridiagonal(P)) throw Error("neighbor error bound needs a tridiagonal P");
  const Eigen::MatrixXd y = to_matrix(y_star);
  NeighborBound b;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
    Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(y.cols());
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(y.cols());
    if (i > 0) a = P(i, i - 1) * (y.row(i - 1) - y.row(i));
    if (i + 1 < static_cast<Eigen::Index>(m)) c = P(i, i + 1) * (y.row(i + 1) - y.row(i));
    const double aa = a.squaredNorm(), cc = c.squaredNorm();
    const double cross = std::sqrt(aa) * std::sqrt(cc);
    b.exact += aa + 2.0 * std::min(a.dot(c), cross) + cc;
    b.upper += aa + 2.0 * cross + cc;
    b.split += aa + cc;
  }
  return b;
}

double max_row_sum_deviation(const Eigen::MatrixXd& P) {
  return P.rows() == 0 ? 0.0 : (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double max_col_sum_deviation(const Eigen::MatrixXd& P) {
  return P.cols() == 0 ? 0.0 : (P.colwise().sum().array() - 1.0).abs().maxCoeff();
}

EmpiricalConstants empirical_constants(const LatentSortModel& m, const std::vector<Token>& data,
                                       std::size_t samples, std::uint64_t seed, std::size_t grid) {
  if (data.empty()) throw Error("empirical constants need data");
  const auto h = encode_batch(m, data);
  EmpiricalConstants c;
  std::vector<Token> recon;
  recon.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    recon.push_back(decode(m, h[i]));
    c.b = std::max(c.b, norm(data[i], recon.back()));
  }
  Rng rng(derive_seed(seed, "constants"));
  const auto n = static_cast<std::uint64_t>(data.size());
  for (std::size_t s = 0; s < samples && n > 1; ++s) {
    const auto i = rng.below(n), j = rng.below(n);
    const double dx = norm(data[i], data[j]);
    const double dh = std::abs(h[i] - h[j]);
    if (dx > 0) c.k_e = std::max(c.k_e, dh / dx);
    if (dh > 0) c.k_d = std::max(c.k_d, norm(recon[i], recon[j]) / dh);
  }
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  if (grid >= 2 && *hi > *lo) {
    Token prev = decode(m, *lo);
    const double step = (*hi - *lo) / static_cast<double>(grid - 1);
    for (std::size_t g = 1; g < grid; ++g) {
      Token cur = decode(m, *lo + step * static_cast<double>(g));
      c.k_d = std::max(c.k_d, norm(cur, prev) / step);
      prev = std::move(cur);
    }
  }
  return c;
}

namespace {

template <class Pred, class Slack>
BoundCheck check_pairs(const LatentSortModel& m, const std::vector<Token>& data, std::size_t samples,
                       std::uint64_t seed, const char* tag, Pred&& applies, Slack&& slack) {
  BoundCheck out;
  out.min_slack = std::numeric_limits<double>::infinity();
  if (data.size() < 2) return out;
  const auto h = encode_batch(m, data);
  Rng rng(derive_seed(seed, tag));
  const auto n = static_cast<std::uint64_t>(data.size());
  for (std::size_t s = 0; s < samples; ++s) {
    const auto i = rng.below(n), j = rng.below(n);
    if (i == j) continue;
    const double dx = norm(data[i], data[j]);
    const double dh = std::abs(h[i] - h[j]);
    if (!applies(dx, dh)) continue;
    ++out.checked;
    const double sl = slack(dx, dh);
    out.min_slack = std::min(out.min_slack, sl);
    if (sl < 0) ++out.violations;
  }
  return out;
}

}  // namespace

BoundCheck check_bounded_distance(const LatentSortModel& m, const std::vector<Token>& data,
                                  const EmpiricalConstants& c, double eps, std::size_t samples,
                                  std::uint64_t seed) {
  if (!(eps > 0)) throw Error("epsilon must be positive");
  return check_pairs(
      m, data, samples, seed, "bounded-distance", [&](double, double dh) { return dh <= eps; },
      [&](double dx, double) { return 2.0 * c.b + c.k_d * eps - dx; });
}

BoundCheck check_bounded_latent(const LatentSortModel& m, const std::vector<Token>& data,
                                const EmpiricalConstants& c, double d, std::size_t samples,
                                std::uint64_t seed) {
  if (d < 2.0 * c.b) throw Error("distance threshold must be at least 2B");
  if (!(c.k_d > 0)) throw Error("decoder constant must be positive");
  return check_pairs(
      m, data, samples, seed, "bounded-latent", [&](double dx, double) { return dx >= d; },
      [&](double, double dh) { return dh - (d - 2.0 * c.b) / c.k_d; });
}

SetReport analyze_sequence(const SortedSequence& seq, const std::string& id) {
  seq.check();
  SetReport r;
  r.id = id;
  r.m = seq.size();
  std::vector<double> keys;
  if (seq.keys) {
    keys = *seq.keys;
  } else {
    keys.resize(seq.size());
    std::iota(keys.begin(), keys.end(), 0.0);
  }
  r.groups = ambiguity_sets(TokenSet(seq.rows), keys);
  r.P = uniform_ambiguity_P(r.groups, r.m);
  r.error = ambiguity_error(seq, r.groups);
  if (is_tridiagonal(r.P)) r.neighbor = neighbor_error_bound(seq, r.P);
  return r;
}

std::string report_json(const SetReport& r) {
  std::string out = "{";
  if (!r.id.empty()) out += "\"id\":" + json_quote(r.id) + ",";
  out += "\"M\":" + std::to_string(r.m) + ",\"P\":[";
  for (Eigen::Index i = 0; i < r.P.rows(); ++i) {
    if (i) out += ",";
    append_array(out, std::vector<double>(r.P.row(i).begin(), r.P.row(i).end()));
  }
  out += "],\"groups\":[";
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    if (g) out += ",";
    out += "[";
    for (std::size_t k = 0; k < r.groups[g].size(); ++k) {
      if (k) out += ",";
      out += std::to_string(r.groups[g][k]);
    }
    out += "]";
  }
  out += "],\"error\":" + format_double(r.error) + ",\"bounds\":{";
  out += "\"row_sum_deviation\":" + format_double(max_row_sum_deviation(r.P));
  if (r.neighbor)
    out += ",\"neighbor_exact\":" + format_double(r.neighbor->exact) +
           ",\"neighbor_upper\":" + format_double(r.neighbor->upper) +
           ",\"neighbor_split\":" + format_double(r.neighbor->split);
  out += "}}";
  return out;
}

}  // namespace latsort
