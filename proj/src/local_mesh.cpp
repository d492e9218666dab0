#include "dirmatch/local_mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "dirmatch/errors.hpp"

namespace dirmatch {

namespace {

struct Tri {
  int a, b, c;
};

double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a, b, c).
double incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                const Eigen::Vector2d& d) {
  double adx = a.x() - d.x(), ady = a.y() - d.y();
  double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  double ad = adx * adx + ady * ady;
  double bd = bdx * bdx + bdy * bdy;
  double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

// Bowyer-Watson over 2D points in fixed insertion order. Cocircular ties are
// excluded from the cavity (strict test against a scale-aware tolerance), so
// the diagonal of a degenerate quad is decided by insertion order.
std::vector<Tri> delaunay_2d(const std::vector<Eigen::Vector2d>& pts) {
  const int n = int(pts.size());
  Eigen::Vector2d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double span = std::max((hi - lo).maxCoeff(), 1e-300);
  Eigen::Vector2d mid = 0.5 * (lo + hi);
  double big = 64.0 * span;
  std::vector<Eigen::Vector2d> v(pts);
  v.push_back(mid + Eigen::Vector2d(-big, -big));
  v.push_back(mid + Eigen::Vector2d(big, -big));
  v.push_back(mid + Eigen::Vector2d(0.0, big));
  const double tol = 1e-11 * span * span * span * span;

  std::vector<Tri> tris{{n, n + 1, n + 2}};
  for (int p = 0; p < n; ++p) {
    std::vector<Tri> keep;
    std::map<std::pair<int, int>, std::pair<int, int>> edge_count;  // undirected -> (count, first dir a)
    for (const Tri& t : tris) {
      if (incircle(v[t.a], v[t.b], v[t.c], v[p]) > tol) {
        std::array<std::pair<int, int>, 3> edges{{{t.a, t.b}, {t.b, t.c}, {t.c, t.a}}};
        for (auto [u, w] : edges) {
          auto key = std::minmax(u, w);
          auto it = edge_count.find(key);
          if (it == edge_count.end())
            edge_count[key] = {1, u};
          else
            it->second.first++;
        }
      } else {
        keep.push_back(t);
      }
    }
    tris = std::move(keep);
    for (const auto& [key, info] : edge_count) {
      if (info.second != key.first && info.second != key.second) continue;  // unreachable guard
      if (info.first != 1) continue;
      int u = info.second;
      int w = (u == key.first) ? key.second : key.first;
      tris.push_back({u, w, p});
    }
  }

  std::vector<Tri> out;
  for (const Tri& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    Tri tt = t;
    if (orient2d(v[tt.a], v[tt.b], v[tt.c]) < 0.0) std::swap(tt.b, tt.c);
    out.push_back(tt);
  }
  return out;
}

}  // namespace

LocalMesh build_local_mesh(const PointCloud& cloud, int i, int k_local) {
  if (i < 0 || i >= cloud.n_points())
    throw IndexOutOfRange("point " + std::to_string(i) + " out of range");
  if (k_local < 6) throw Error("k_local must be >= 6");
  if (cloud.n_points() < k_local + 1)
    throw Error("cloud needs at least k_local + 1 points");

  std::vector<int> nbrs = cloud.k_nearest(i, k_local);
  std::vector<int> members{i};
  members.insert(members.end(), nbrs.begin(), nbrs.end());

  const int m = int(members.size());
  Eigen::MatrixX3d P(m, 3);
  for (int r = 0; r < m; ++r) P.row(r) = cloud.points.row(members[r]);

  double scale = (P.colwise().maxCoeff() - P.colwise().minCoeff()).norm();
  for (int r = 0; r < m; ++r)
    for (int s = r + 1; s < m; ++s)
      if ((P.row(r) - P.row(s)).norm() <= 1e-12 * std::max(scale, 1e-300))
        throw DegenerateNeighborhood("coincident points in neighborhood of " + std::to_string(i));

  Eigen::RowVector3d centroid = P.colwise().mean();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int r = 0; r < m; ++r) {
    Eigen::Vector3d d = (P.row(r) - centroid).transpose();
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // Eigenvalues ascending: columns 2, 1 span the tangent plane.
  if (es.eigenvalues()(1) <= 1e-20 * std::max(es.eigenvalues()(2), 1e-300))
    throw DegenerateNeighborhood("collinear neighborhood of point " + std::to_string(i));
  Eigen::Vector3d e1 = es.eigenvectors().col(2);
  Eigen::Vector3d e2 = es.eigenvectors().col(1);

  std::vector<Eigen::Vector2d> uv(m);
  for (int r = 0; r < m; ++r) {
    Eigen::Vector3d d = (P.row(r) - centroid).transpose();
    uv[r] = Eigen::Vector2d(d.dot(e1), d.dot(e2));
  }

  std::vector<Tri> tris = delaunay_2d(uv);
  if (tris.empty()) throw DegenerateNeighborhood("triangulation of neighborhood of " +
                                                 std::to_string(i) + " is empty");

  Eigen::MatrixX3i F(tris.size(), 3);
  for (std::size_t t = 0; t < tris.size(); ++t) F.row(t) << tris[t].a, tris[t].b, tris[t].c;

  LocalMesh lm;
  MeshOptions opts;
  opts.prune_isolated = false;
  // A Delaunay triangulation uses every input point; keep indices aligned.
  lm.mesh = make_mesh(P, F, opts);
  lm.cloud_indices = members;
  lm.center_local = 0;
  return lm;
}

TriangleMesh cloud_union_mesh(const PointCloud& cloud, int k_local) {
  std::set<std::array<int, 3>> seen;
  std::vector<Eigen::Vector3i> faces;
  for (int i = 0; i < cloud.n_points(); ++i) {
    LocalMesh lm = build_local_mesh(cloud, i, k_local);
    for (int t = 0; t < lm.mesh.n_faces(); ++t) {
      Eigen::Vector3i f(lm.cloud_indices[lm.mesh.faces(t, 0)],
                        lm.cloud_indices[lm.mesh.faces(t, 1)],
                        lm.cloud_indices[lm.mesh.faces(t, 2)]);
      std::array<int, 3> key{f[0], f[1], f[2]};
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) faces.push_back(f);
    }
  }
  Eigen::MatrixX3i F(faces.size(), 3);
  for (std::size_t t = 0; t < faces.size(); ++t) F.row(t) = faces[t];
  MeshOptions opts;
  opts.prune_isolated = false;
  return make_mesh(cloud.points, F, opts);
}

}  // namespace dirmatch
