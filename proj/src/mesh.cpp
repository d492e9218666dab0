#include "dirmatch/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <deque>
#include <set>

#include "dirmatch/errors.hpp"

namespace dirmatch {

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

namespace {

double bbox_diag(const Eigen::MatrixX3d& pts) {
  if (pts.rows() == 0) return 0.0;
  Eigen::Vector3d lo = pts.colwise().minCoeff();
  Eigen::Vector3d hi = pts.colwise().maxCoeff();
  return (hi - lo).norm();
}

}  // namespace

double TriangleMesh::bounding_box_diagonal() const { return bbox_diag(vertices); }
double PointCloud::bounding_box_diagonal() const { return bbox_diag(points); }

TriangleMesh make_mesh(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces,
                       const MeshOptions& opts) {
  const int n = int(vertices.rows());
  const int f = int(faces.rows());

  std::vector<int> zero_area_faces;
  for (int t = 0; t < f; ++t) {
    int a = faces(t, 0), b = faces(t, 1), c = faces(t, 2);
    if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n)
      throw IndexOutOfRange("face " + std::to_string(t) + " references vertex out of [0, " +
                            std::to_string(n) + ")");
    if (a == b || b == c || a == c)
      throw DegenerateGeometry("face " + std::to_string(t) + " repeats a vertex index");
    if (triangle_area(vertices.row(a), vertices.row(b), vertices.row(c)) == 0.0)
      zero_area_faces.push_back(t);
  }
  if (!zero_area_faces.empty()) {
    std::string msg = std::to_string(zero_area_faces.size()) + " zero-area face(s):";
    for (std::size_t i = 0; i < zero_area_faces.size() && i < 16; ++i)
      msg += " " + std::to_string(zero_area_faces[i]);
    throw DegenerateGeometry(msg);
  }

  std::vector<char> referenced(n, 0);
  for (int t = 0; t < f; ++t)
    for (int c = 0; c < 3; ++c) referenced[faces(t, c)] = 1;

  TriangleMesh mesh;
  if (std::find(referenced.begin(), referenced.end(), 0) != referenced.end()) {
    if (!opts.prune_isolated) throw DegenerateGeometry("mesh has isolated vertices");
    std::vector<int> remap(n, -1);
    int kept = 0;
    for (int i = 0; i < n; ++i)
      if (referenced[i]) remap[i] = kept++;
    mesh.vertices.resize(kept, 3);
    for (int i = 0; i < n; ++i)
      if (remap[i] >= 0) mesh.vertices.row(remap[i]) = vertices.row(i);
    mesh.faces.resize(f, 3);
    for (int t = 0; t < f; ++t)
      for (int c = 0; c < 3; ++c) mesh.faces(t, c) = remap[faces(t, c)];
  } else {
    mesh.vertices = vertices;
    mesh.faces = faces;
  }

  const int nv = mesh.n_vertices();
  std::vector<std::set<int>> ring(nv);
  mesh.vertex_faces.assign(nv, {});
  for (int t = 0; t < mesh.n_faces(); ++t) {
    for (int c = 0; c < 3; ++c) {
      int u = mesh.faces(t, c), v = mesh.faces(t, (c + 1) % 3);
      ring[u].insert(v);
      ring[v].insert(u);
      mesh.vertex_faces[u].push_back(t);
    }
  }
  mesh.vertex_ring.resize(nv);
  mesh.edge_adj.resize(nv);
  for (int i = 0; i < nv; ++i) {
    mesh.vertex_ring[i].assign(ring[i].begin(), ring[i].end());
    mesh.edge_adj[i].reserve(ring[i].size());
    for (int j : mesh.vertex_ring[i])
      mesh.edge_adj[i].emplace_back(j, (mesh.vertices.row(i) - mesh.vertices.row(j)).norm());
    std::sort(mesh.vertex_faces[i].begin(), mesh.vertex_faces[i].end());
  }
  return mesh;
}

double total_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (int t = 0; t < mesh.n_faces(); ++t)
    area += triangle_area(mesh.vertices.row(mesh.faces(t, 0)), mesh.vertices.row(mesh.faces(t, 1)),
                          mesh.vertices.row(mesh.faces(t, 2)));
  return area;
}

Eigen::VectorXd vertex_areas(const TriangleMesh& mesh) {
  Eigen::VectorXd areas = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int t = 0; t < mesh.n_faces(); ++t) {
    double a = triangle_area(mesh.vertices.row(mesh.faces(t, 0)),
                             mesh.vertices.row(mesh.faces(t, 1)),
                             mesh.vertices.row(mesh.faces(t, 2)));
    if (a == 0.0) throw DegenerateGeometry("zero-area face " + std::to_string(t));
    for (int c = 0; c < 3; ++c) areas[mesh.faces(t, c)] += a / 3.0;
  }
  return areas;
}

std::vector<int> ring_neighborhood(const TriangleMesh& mesh, int i, int depth) {
  if (i < 0 || i >= mesh.n_vertices())
    throw IndexOutOfRange("vertex " + std::to_string(i) + " out of range");
  if (depth < 1) throw IndexOutOfRange("ring depth must be >= 1");

  std::vector<int> hops(mesh.n_vertices(), -1);
  hops[i] = 0;
  std::deque<int> queue{i};
  std::vector<int> result;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (hops[u] == depth) continue;
    for (int v : mesh.vertex_ring[u]) {
      if (hops[v] >= 0) continue;
      hops[v] = hops[u] + 1;
      result.push_back(v);
      queue.push_back(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<int> PointCloud::k_nearest(int i, int k) const {
  const int n = n_points();
  std::vector<std::pair<double, int>> dist;
  dist.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    dist.emplace_back((points.row(j) - points.row(i)).squaredNorm(), j);
  }
  int take = std::min<int>(k, int(dist.size()));
  std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
  std::vector<int> out(take);
  for (int j = 0; j < take; ++j) out[j] = dist[j].second;
  return out;
}

}  // namespace dirmatch
