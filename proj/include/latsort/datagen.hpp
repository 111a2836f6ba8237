#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "latsort/types.hpp"

namespace latsort {

using Point2 = std::array<double, 2>;
using Triangle = std::array<std::size_t, 3>;

inline constexpr double kPredicateTol = 1e-12;

struct Triangulation {
  /// Input points after removing duplicates (first occurrence kept).
  std::vector<Point2> points;
  /// Counter-clockwise vertex triples indexing `points`.
  std::vector<Triangle> triangles;
  std::vector<std::string> warnings;
};

/// Bowyer-Watson incremental Delaunay triangulation. Throws when fewer than
/// three distinct points remain or all points are collinear.
Triangulation delaunay(const std::vector<Point2>& points);

/// True when `p` lies strictly inside the circumcircle of (a, b, c) by more
/// than `tol` in the determinant predicate. (a, b, c) may have either
/// orientation.
bool in_circumcircle(const Point2& a, const Point2& b, const Point2& c, const Point2& p,
                     double tol = kPredicateTol);

struct PlanarGenConfig {
  int n_init = 15;
  double collapse_distance = 0.1;
  double min_edge_angle_degrees = 30.0;
  std::uint64_t seed = 0;

  void check() const;
};

/// Delaunay graph of uniform points followed by close-node merging, removal
/// of the longer edge of every sharp incident pair, and self-loop/duplicate
/// removal. Retries with derived seeds when no edge survives.
Graph generate_planar_graph(const PlanarGenConfig& cfg);

/// `count` sets of `m` tokens drawn uniformly from [0,1]^n.
std::vector<TokenSet> generate_uniform_sets(std::size_t m, std::size_t n, std::size_t count,
                                            std::uint64_t seed);

/// Smallest angle in degrees between two edges sharing a node; 180 when no
/// node has two incident edges.
double min_incident_angle_degrees(const Graph& g);

/// Smallest pairwise node distance; +inf with fewer than two nodes.
double min_node_distance(const Graph& g);

}  // namespace latsort
