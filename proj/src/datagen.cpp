#include "latsort/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "latsort/rng.hpp"

namespace latsort {

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool in_circumcircle(const Point2& a, const Point2& b, const Point2& c, const Point2& p,
                     double tol) {
  const double adx = a[0] - p[0], ady = a[1] - p[1];
  const double bdx = b[0] - p[0], bdy = b[1] - p[1];
  const double cdx = c[0] - p[0], cdy = c[1] - p[1];
  const double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                     (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                     (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  return (orient(a, b, c) > 0 ? det : -det) > tol;
}

Triangulation delaunay(const std::vector<Point2>& input) {
  Triangulation out;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!std::isfinite(input[i][0]) || !std::isfinite(input[i][1]))
      throw Error("delaunay: non-finite point");
    bool dup = false;
    for (const auto& q : out.points)
      if (dist(input[i], q) <= kPredicateTol) dup = true;
    if (dup)
      out.warnings.push_back("duplicate point " + std::to_string(i) + " dropped");
    else
      out.points.push_back(input[i]);
  }
  const auto& pts = out.points;
  const std::size_t n = pts.size();
  if (n < 3) throw Error("delaunay needs at least 3 distinct points");

  double lo_x = pts[0][0], hi_x = lo_x, lo_y = pts[0][1], hi_y = lo_y;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  bool collinear = true;
  for (std::size_t k = 2; k < n && collinear; ++k)
    if (std::abs(orient(pts[0], pts[1], pts[k])) > kPredicateTol * std::max(1.0, span * span))
      collinear = false;
  if (collinear) throw Error("delaunay: all points are collinear");

  // Super triangle appended after the real points.
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y), r = 100.0 * span;
  std::vector<Point2> all = pts;
  all.push_back({cx - 2 * r, cy - r});
  all.push_back({cx + 2 * r, cy - r});
  all.push_back({cx, cy + 2 * r});

  std::vector<Triangle> tris{{n, n + 1, n + 2}};
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = all[i];
    std::vector<Triangle> keep;
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& t : tris) {
      if (in_circumcircle(all[t[0]], all[t[1]], all[t[2]], p)) {
        for (int k = 0; k < 3; ++k) {
          const auto a = t[k], b = t[(k + 1) % 3];
          const auto key = std::minmax(a, b);
          if (edge_count[key]++ == 0) edges.emplace_back(a, b);
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [a, b] : edges) {
      if (edge_count[std::minmax(a, b)] != 1) continue;
      Triangle t{a, b, i};
      if (orient(all[a], all[b], p) < 0) std::swap(t[0], t[1]);
      keep.push_back(t);
    }
    tris = std::move(keep);
  }
  for (const auto& t : tris)
    if (t[0] < n && t[1] < n && t[2] < n) out.triangles.push_back(t);
  return out;
}

void PlanarGenConfig::check() const {
  if (n_init < 3) throw Error("n_init must be at least 3");
  if (!(collapse_distance > 0 && collapse_distance < 1))
    throw Error("collapse distance must lie in (0, 1)");
  if (!(min_edge_angle_degrees > 0 && min_edge_angle_degrees < 180))
    throw Error("minimum edge angle must lie in (0, 180) degrees");
}

namespace {

double edge_angle_degrees(const Point2& o, const Point2& a, const Point2& b) {
  const double ux = a[0] - o[0], uy = a[1] - o[1], vx = b[0] - o[0], vy = b[1] - o[1];
  return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy) * 180.0 / M_PI;
}

std::vector<Point2> to_points(const Graph& g) {
  std::vector<Point2> p;
  for (const auto& t : g.nodes()) p.push_back({t[0], t[1]});
  return p;
}

std::optional<Graph> try_planar(const PlanarGenConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> raw(static_cast<std::size_t>(cfg.n_init));
  for (auto& p : raw) p = {rng.uniform(), rng.uniform()};
  const auto tri = delaunay(raw);
  const auto& pts = tri.points;
  const std::size_t n = pts.size();

  std::set<std::pair<std::size_t, std::size_t>> edge_set;
  for (const auto& t : tri.triangles)
    for (int k = 0; k < 3; ++k) edge_set.insert(std::minmax(t[k], t[(k + 1) % 3]));

  // Merge until every pair of cluster centroids is at least collapse_distance apart.
  UnionFind uf(n);
  std::vector<Point2> centroid;
  std::vector<std::size_t> cluster(n);
  for (;;) {
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i)
      if (uf.find(i) == i) roots.push_back(i);
    centroid.assign(roots.size(), {0.0, 0.0});
    std::vector<double> count(roots.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(
          std::lower_bound(roots.begin(), roots.end(), uf.find(i)) - roots.begin());
      cluster[i] = c;
      centroid[c][0] += pts[i][0];
      centroid[c][1] += pts[i][1];
      count[c] += 1.0;
    }
    for (std::size_t c = 0; c < roots.size(); ++c) {
      centroid[c][0] /= count[c];
      centroid[c][1] /= count[c];
    }
    bool merged = false;
    for (std::size_t a = 0; a < roots.size(); ++a)
      for (std::size_t b = a + 1; b < roots.size(); ++b)
        if (dist(centroid[a], centroid[b]) < cfg.collapse_distance) {
          uf.unite(roots[a], roots[b]);
          merged = true;
        }
    if (!merged) break;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [u, v] : edge_set) {
      const auto a = cluster[u], b = cluster[v];
      if (a == b) continue;
      if (seen.insert(std::minmax(a, b)).second) edges.push_back(std::minmax(a, b));
    }
    std::sort(edges.begin(), edges.end());
  }

  const double thresh = cfg.min_edge_angle_degrees;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < centroid.size() && !changed; ++v) {
      std::vector<std::size_t> inc;
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].first == v || edges[e].second == v) inc.push_back(e);
      for (std::size_t i = 0; i < inc.size() && !changed; ++i)
        for (std::size_t j = i + 1; j < inc.size() && !changed; ++j) {
          const auto& ei = edges[inc[i]];
          const auto& ej = edges[inc[j]];
          const auto oi = ei.first == v ? ei.second : ei.first;
          const auto oj = ej.first == v ? ej.second : ej.first;
          if (edge_angle_degrees(centroid[v], centroid[oi], centroid[oj]) >= thresh) continue;
          const double li = dist(centroid[v], centroid[oi]);
          const double lj = dist(centroid[v], centroid[oj]);
          edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(li > lj ? inc[i] : inc[j]));
          changed = true;
        }
    }
  }
  if (edges.empty()) return std::nullopt;

  std::vector<Token> nodes;
  for (const auto& c : centroid) nodes.push_back({c[0], c[1]});
  return Graph(std::move(nodes), std::move(edges), false);
}

}  // namespace

Graph generate_planar_graph(const PlanarGenConfig& cfg) {
  cfg.check();
  constexpr int kRetries = 10;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    if (auto g = try_planar(cfg, derive_seed(cfg.seed, "planar", static_cast<std::uint64_t>(attempt))))
      return *std::move(g);
  }
  throw Error("planar generator produced no edges after " + std::to_string(kRetries) + " retries");
}

std::vector<TokenSet> generate_uniform_sets(std::size_t m, std::size_t n, std::size_t count,
                                            std::uint64_t seed) {
  if (m == 0 || n == 0) throw Error("uniform sets need m >= 1 and n >= 1");
  Rng rng(seed);
  std::vector<TokenSet> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<Token> tokens(m, Token(n));
    for (auto& t : tokens)
      for (auto& v : t) v = rng.uniform();
    out.emplace_back(std::move(tokens));
  }
  return out;
}

double min_incident_angle_degrees(const Graph& g) {
  const auto p = to_points(g);
  double best = 180.0;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    std::vector<std::size_t> other;
    for (const auto& [a, b] : g.edges()) {
      if (a == v) other.push_back(b);
      if (b == v) other.push_back(a);
    }
    for (std::size_t i = 0; i < other.size(); ++i)
      for (std::size_t j = i + 1; j < other.size(); ++j)
        best = std::min(best, edge_angle_degrees(p[v], p[other[i]], p[other[j]]));
  }
  return best;
}

double min_node_distance(const Graph& g) {
  const auto p = to_points(g);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, dist(p[i], p[j]));
  return best;
}

}  // namespace latsort
