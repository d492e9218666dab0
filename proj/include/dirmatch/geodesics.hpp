#pragma once

#include <Eigen/Core>
#include <vector>

#include "dirmatch/mesh.hpp"

namespace dirmatch {

/// Truncated single-source distances: every vertex whose edge-graph distance
/// from `center` is <= radius, with its distance. Entries sorted by vertex.
struct GeodesicBall {
  int center = 0;
  double radius = 0.0;
  std::vector<std::pair<int, double>> distances;

  /// Distance to v, or a negative value when v is outside the ball.
  double lookup(int v) const;
};

/// Distances from a source set; infinity marks unreachable vertices.
struct DistanceField {
  std::vector<int> sources;
  Eigen::VectorXd distances;
};

/// Dijkstra on the edge graph, truncated at `radius` (> 0). Ties are settled
/// by lowest vertex index, so results are reproducible bit for bit.
GeodesicBall geodesic_ball(const TriangleMesh& mesh, int i, double radius);

/// Exact multi-source Dijkstra over the whole mesh.
DistanceField multi_source_distances(const TriangleMesh& mesh, const std::vector<int>& sources);

/// Single-source distances to the given target set only; stops as soon as all
/// targets are settled. Returns distances aligned with `targets`.
std::vector<double> distances_to_targets(const TriangleMesh& mesh, int source,
                                         const std::vector<int>& targets);

/// Greedy geodesic farthest-point sample of size `count` drawn from `pool`
/// (entire vertex set when pool is empty). `seeds` are always included first.
std::vector<int> farthest_point_sample(const TriangleMesh& mesh, int count,
                                       const std::vector<int>& pool = {},
                                       const std::vector<int>& seeds = {});

/// Max single-source distance over a farthest-point sample of size 20.
/// A lower bound on the true edge-graph diameter. Throws DisconnectedMesh.
double estimate_diameter(const TriangleMesh& mesh);

void save_distance_field_csv(const std::string& path, const DistanceField& field);

}  // namespace dirmatch
