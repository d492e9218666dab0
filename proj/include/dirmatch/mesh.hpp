#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

namespace dirmatch {

/// Immutable triangle mesh: vertex positions, faces (0-based, CCW) and
/// precomputed connectivity. Build through make_mesh so the invariants
/// (indices in range, three distinct indices per face, no isolated vertex,
/// no zero-area face) are checked once up front.
struct TriangleMesh {
  Eigen::MatrixX3d vertices;
  Eigen::MatrixX3i faces;

  // One-ring vertex lists, sorted ascending.
  std::vector<std::vector<int>> vertex_ring;
  // Edge adjacency: per vertex, (neighbor, edge length), neighbor ascending.
  std::vector<std::vector<std::pair<int, double>>> edge_adj;
  // Faces incident to each vertex, ascending.
  std::vector<std::vector<int>> vertex_faces;

  int n_vertices() const { return int(vertices.rows()); }
  int n_faces() const { return int(faces.rows()); }

  double bounding_box_diagonal() const;
};

struct MeshOptions {
  // Isolated vertices are rejected by default; with prune_isolated they are
  // dropped (remaining vertex order preserved).
  bool prune_isolated = false;
};

/// Validates invariants and builds connectivity. Throws DegenerateGeometry on
/// zero-area or repeated-index faces, IndexOutOfRange on bad face indices.
TriangleMesh make_mesh(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
                       const MeshOptions& opts = {});

/// Raw point cloud. Local triangulations are built on demand (local_mesh.hpp).
struct PointCloud {
  Eigen::MatrixX3d points;

  int n_points() const { return int(points.rows()); }
  double bounding_box_diagonal() const;

  /// Indices of the k nearest neighbors of point i (i excluded), by ascending
  /// distance, ties by index.
  std::vector<int> k_nearest(int i, int k) const;
};

/// One-third barycentric lumping of incident face areas. Sum equals total
/// surface area; all entries positive for a valid mesh.
Eigen::VectorXd vertex_areas(const TriangleMesh& mesh);

double total_area(const TriangleMesh& mesh);

/// All vertices reachable from i via <= depth edges, excluding i, sorted
/// ascending. depth >= 1.
std::vector<int> ring_neighborhood(const TriangleMesh& mesh, int i, int depth);

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c);

}  // namespace dirmatch
