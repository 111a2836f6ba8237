#include "latsort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "latsort/io.hpp"
#include "latsort/tokenize.hpp"

namespace latsort {

namespace {

void check_pair(const TokenSet& x, const TokenSet& y) {
  if (x.empty() || y.empty()) throw Error("metric needs non-empty sets");
  if (x.dim() != y.dim()) throw Error("metric sets differ in dimension");
}

double dist(const Token& a, const Token& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double nearest(const Token& p, const TokenSet& y) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : y) best = std::min(best, dist(p, q));
  return best;
}

double log_sum_exp(const double* v, std::size_t n) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

}  // namespace

double emd(const TokenSet& x, const TokenSet& y) {
  check_pair(x, y);
  double s = 0.0;
  for (const auto& p : x) s += nearest(p, y);
  return s / static_cast<double>(x.size());
}

double directed_hausdorff(const TokenSet& x, const TokenSet& y) {
  check_pair(x, y);
  double worst = 0.0;
  for (const auto& p : x) worst = std::max(worst, nearest(p, y));
  return worst;
}

double ehd(const TokenSet& x, const TokenSet& y) {
  return std::max(directed_hausdorff(x, y), directed_hausdorff(y, x));
}

void SinkhornConfig::check() const {
  if (!(epsilon > 0)) throw Error("Sinkhorn epsilon must be positive");
  if (samples < 1) throw Error("Sinkhorn needs at least one sample per graph");
  if (max_iter < 1) throw Error("Sinkhorn needs at least one iteration");
  if (!(tol > 0)) throw Error("Sinkhorn tolerance must be positive");
}

std::vector<Token> sample_edge_points(const Graph& g, std::size_t samples) {
  if (g.num_edges() == 0) throw Error("edge sampling needs at least one edge");
  if (g.node_dim() != 2) throw Error("edge sampling needs 2-D node coordinates");
  std::vector<double> cum{0.0};
  for (const auto& [u, v] : g.edges()) cum.push_back(cum.back() + dist(g.nodes()[u], g.nodes()[v]));
  const double total = cum.back();
  std::vector<Token> pts;
  pts.reserve(samples);
  std::size_t e = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto& [u0, v0] = g.edges()[0];
    if (total == 0.0) {
      pts.push_back(g.nodes()[u0]);
      continue;
    }
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(samples) * total;
    while (e + 1 < g.num_edges() && cum[e + 1] < t) ++e;
    const auto& a = g.nodes()[g.edges()[e].first];
    const auto& b = g.nodes()[g.edges()[e].second];
    const double len = cum[e + 1] - cum[e];
    const double s = len > 0 ? std::clamp((t - cum[e]) / len, 0.0, 1.0) : 0.0;
    pts.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
  }
  return pts;
}

SinkhornResult sinkhorn(const std::vector<Token>& a, const std::vector<Token>& b,
                        const SinkhornConfig& cfg) {
  cfg.check();
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) throw Error("Sinkhorn needs non-empty clouds");
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist(a[i], b[j]);
      cost[i * m + j] = d * d;
    }
  const double eps = cfg.epsilon;
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));
  std::vector<double> f(n, 0.0), g(m, 0.0), buf(std::max(n, m));

  SinkhornResult r;
  auto row_violation = [&] {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += std::exp((f[i] + g[j] - cost[i * m + j]) / eps + log_a + log_b);
      v += std::abs(s - std::exp(log_a));
    }
    return v;
  };
  for (r.iterations = 1; r.iterations <= cfg.max_iter; ++r.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) buf[j] = (g[j] - cost[i * m + j]) / eps + log_b;
      f[i] = -eps * log_sum_exp(buf.data(), m);
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) buf[i] = (f[i] - cost[i * m + j]) / eps + log_a;
      g[j] = -eps * log_sum_exp(buf.data(), n);
    }
    r.marginal_violation = row_violation();
    if (r.marginal_violation < cfg.tol) break;
  }
  if (r.iterations > cfg.max_iter) {
    r.iterations = cfg.max_iter;
    throw Error("Sinkhorn did not converge in " + std::to_string(cfg.max_iter) +
                " iterations (marginal violation " + format_double(r.marginal_violation) + ")");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double pi = std::exp((f[i] + g[j] - cost[i * m + j]) / eps + log_a + log_b);
      r.transport += pi * cost[i * m + j];
      r.objective += pi * (f[i] + g[j]);
    }
  return r;
}

double smd(const Graph& a, const Graph& b, const SinkhornConfig& cfg) {
  cfg.check();
  auto pa = sample_edge_points(a, cfg.samples);
  auto pb = sample_edge_points(b, cfg.samples);
  if (pb < pa) std::swap(pa, pb);
  const double ab = sinkhorn(pa, pb, cfg).objective;
  const double aa = sinkhorn(pa, pa, cfg).objective;
  const double bb = sinkhorn(pb, pb, cfg).objective;
  return ab - 0.5 * (aa + bb);
}

Prf set_prf(const TokenSet& x, const TokenSet& y, double match_tol) {
  check_pair(x, y);
  if (!(match_tol >= 0)) throw Error("match tolerance must be non-negative");
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double d = dist(x[i], y[j]);
      if (d <= match_tol) cand.emplace_back(d, i, j);
    }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_x(x.size(), false), used_y(y.size(), false);
  Prf r;
  for (const auto& [d, i, j] : cand) {
    if (used_x[i] || used_y[j]) continue;
    used_x[i] = used_y[j] = true;
    ++r.tp;
  }
  const double tp = static_cast<double>(r.tp);
  r.precision = tp / static_cast<double>(x.size());
  r.recall = tp / static_cast<double>(y.size());
  r.f1 = r.tp == 0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double base_loss(const SortedSequence& a, const SortedSequence& b, BaseLoss kind) {
  if (a.size() != b.size() || a.dim() != b.dim()) throw Error("loss operands differ in shape");
  if (a.size() == 0) throw Error("loss of empty sequences");
  double l1 = 0.0, l2 = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) throw Error("loss operands differ in shape");
    for (std::size_t k = 0; k < a.rows[i].size(); ++k) {
      const double d = a.rows[i][k] - b.rows[i][k];
      l1 += std::abs(d);
      l2 += d * d;
      ++count;
    }
  }
  l1 /= static_cast<double>(count);
  l2 /= static_cast<double>(count);
  switch (kind) {
    case BaseLoss::L1: return l1;
    case BaseLoss::L2: return l2;
    case BaseLoss::Elastic: return l1 + l2;
  }
  return l2;
}

double undirected_loss(const SortedSequence& pred, const SortedSequence& gt, BaseLoss kind) {
  return base_loss(pred, gt, kind) + base_loss(pred, swap_endpoints(gt), kind);
}

long size_diff(const TokenSet& x, const TokenSet& y) {
  return static_cast<long>(x.size()) - static_cast<long>(y.size());
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "id,emd,ehd,smd,precision,recall,f1,size_diff\n";
  for (const auto& r : rows) {
    out += r.id + "," + format_double(r.emd) + "," + format_double(r.ehd) + "," +
           (r.smd ? format_double(*r.smd) : std::string{}) + "," + format_double(r.prf.precision) +
           "," + format_double(r.prf.recall) + "," + format_double(r.prf.f1) + "," +
           std::to_string(r.size_diff) + "\n";
  }
  return out;
}

}  // namespace latsort
