#pragma once

#include "dirmatch/mesh.hpp"

namespace dirmatch {

/// Local triangulation of a point and its k nearest neighbors, produced by
/// projecting the neighborhood onto its PCA tangent plane and running a 2D
/// Delaunay triangulation.
struct LocalMesh {
  TriangleMesh mesh;               // local triangulation (local indices)
  std::vector<int> cloud_indices;  // local index -> cloud index
  int center_local = 0;            // local index of the center point
};

/// k_local >= 6, cloud must have at least k_local + 1 points. Throws
/// DegenerateNeighborhood on coincident or collinear neighborhoods.
LocalMesh build_local_mesh(const PointCloud& cloud, int i, int k_local);

/// Union of all per-point local meshes over the cloud, as one (possibly
/// non-manifold) triangle list on the original point indices. This is the
/// connectivity used for graph distances and ring neighborhoods on raw
/// point clouds.
TriangleMesh cloud_union_mesh(const PointCloud& cloud, int k_local);

}  // namespace dirmatch
