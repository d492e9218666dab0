#include "dirmatch/descriptors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dirmatch/errors.hpp"
#include "dirmatch/geodesics.hpp"
#include "dirmatch/parallel.hpp"

namespace dirmatch {

namespace {

constexpr int kAzimuthBins = 8;
constexpr int kCosineBins = 11;
constexpr int kShotDim = kAzimuthBins * 2 * 2 * kCosineBins;  // 352
constexpr int kMinNeighbors = 5;

Eigen::MatrixX3d mesh_vertex_normals(const TriangleMesh& mesh) {
  Eigen::MatrixX3d normals = Eigen::MatrixX3d::Zero(mesh.n_vertices(), 3);
  for (int t = 0; t < mesh.n_faces(); ++t) {
    Eigen::Vector3d a = mesh.vertices.row(mesh.faces(t, 0));
    Eigen::Vector3d b = mesh.vertices.row(mesh.faces(t, 1));
    Eigen::Vector3d c = mesh.vertices.row(mesh.faces(t, 2));
    Eigen::Vector3d fn = (b - a).cross(c - a);  // area-weighted
    for (int k = 0; k < 3; ++k) normals.row(mesh.faces(t, k)) += fn.transpose();
  }
  for (int i = 0; i < normals.rows(); ++i) {
    double len = normals.row(i).norm();
    if (len > 0.0) normals.row(i) /= len;
  }
  return normals;
}

// PCA normals oriented away from the cloud centroid; the orientation rule is
// covariant with rigid motions of the whole cloud.
Eigen::MatrixX3d cloud_point_normals(const PointCloud& cloud) {
  const int n = cloud.n_points();
  const int k = std::min(16, n - 1);
  Eigen::RowVector3d centroid = cloud.points.colwise().mean();
  Eigen::MatrixX3d normals(n, 3);
  for (int i = 0; i < n; ++i) {
    std::vector<int> nbrs = cloud.k_nearest(i, k);
    Eigen::RowVector3d mean = cloud.points.row(i);
    for (int j : nbrs) mean += cloud.points.row(j);
    mean /= double(nbrs.size() + 1);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    auto add = [&](int j) {
      Eigen::Vector3d d = (cloud.points.row(j) - mean).transpose();
      cov += d * d.transpose();
    };
    add(i);
    for (int j : nbrs) add(j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    Eigen::Vector3d nrm = es.eigenvectors().col(0);
    if (nrm.dot((cloud.points.row(i) - centroid).transpose()) < 0.0) nrm = -nrm;
    normals.row(i) = nrm.transpose();
  }
  return normals;
}

struct ShotInput {
  const Eigen::MatrixX3d* points;
  const Eigen::MatrixX3d* normals;
};

DescriptorField shot_impl(const ShotInput& in, double radius) {
  if (radius <= 0.0) throw Error("SHOT support radius must be positive");
  const Eigen::MatrixX3d& P = *in.points;
  const Eigen::MatrixX3d& N = *in.normals;
  const int n = int(P.rows());
  const double r2 = radius * radius;

  DescriptorField field;
  field.kind = DescriptorKind::SHOT_LIKE;
  field.support_radius = radius;
  field.descriptors = Eigen::MatrixXd::Zero(n, kShotDim);
  std::vector<char> degenerate(n, 0);

  parallel_for(0, std::size_t(n), [&](std::size_t ip) {
    const int i = int(ip);
    Eigen::Vector3d p = P.row(i);
    std::vector<int> nbrs;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if ((P.row(j).transpose() - p).squaredNorm() <= r2) nbrs.push_back(j);
    }
    if (int(nbrs.size()) < kMinNeighbors) {
      degenerate[i] = 1;
      return;
    }

    // distance-weighted covariance local reference frame
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    double wsum = 0.0;
    for (int j : nbrs) {
      Eigen::Vector3d d = P.row(j).transpose() - p;
      double w = radius - d.norm();
      cov += w * d * d.transpose();
      wsum += w;
    }
    cov /= wsum;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    Eigen::Vector3d x_axis = es.eigenvectors().col(2);
    Eigen::Vector3d z_axis = es.eigenvectors().col(0);
    // Sign disambiguation by the weighted first moment. A discrete majority
    // vote ties on symmetric even-count neighborhoods and then inherits the
    // eigensolver's arbitrary sign; the moment is continuous in the geometry
    // and rotation-covariant.
    double x_moment = 0.0, z_moment = 0.0;
    for (int j : nbrs) {
      Eigen::Vector3d d = P.row(j).transpose() - p;
      double w = radius - d.norm();
      x_moment += w * d.dot(x_axis);
      z_moment += w * d.dot(z_axis);
    }
    if (x_moment < 0.0) x_axis = -x_axis;
    if (z_moment < 0.0) z_axis = -z_axis;
    Eigen::Vector3d y_axis = z_axis.cross(x_axis);

    Eigen::Vector3d np = N.row(i);
    auto row = field.descriptors.row(i);
    for (int j : nbrs) {
      Eigen::Vector3d d = P.row(j).transpose() - p;
      double u = d.dot(x_axis), v = d.dot(y_axis), w = d.dot(z_axis);
      double az = std::atan2(v, u);  // (-pi, pi]
      int az_bin = std::clamp(int((az + M_PI) / (2.0 * M_PI / kAzimuthBins)), 0, kAzimuthBins - 1);
      int elev_bin = w >= 0.0 ? 1 : 0;
      int rad_bin = d.norm() < 0.5 * radius ? 0 : 1;
      double cosv = std::clamp(np.dot(N.row(j).transpose()), -1.0, 1.0);
      int cos_bin = std::clamp(int((cosv + 1.0) * 0.5 * kCosineBins), 0, kCosineBins - 1);
      row[((az_bin * 2 + elev_bin) * 2 + rad_bin) * kCosineBins + cos_bin] += 1.0;
    }
    double len = row.norm();
    if (len > 0.0) row /= len;
  });

  for (int i = 0; i < n; ++i)
    if (degenerate[i]) field.degenerate_rows.push_back(i);
  return field;
}

}  // namespace

DescriptorField shot_descriptors(const TriangleMesh& mesh, double radius) {
  Eigen::MatrixX3d normals = mesh_vertex_normals(mesh);
  ShotInput in{&mesh.vertices, &normals};
  return shot_impl(in, radius);
}

DescriptorField shot_descriptors(const PointCloud& cloud, double radius) {
  Eigen::MatrixX3d normals = cloud_point_normals(cloud);
  ShotInput in{&cloud.points, &normals};
  return shot_impl(in, radius);
}

DescriptorField gds_features(const TriangleMesh& mesh, const std::vector<int>& anchors,
                             int max_anchors) {
  if (anchors.empty()) throw Error("gds_features: need at least one anchor");
  if (int(anchors.size()) > max_anchors)
    throw Error("gds_features: " + std::to_string(anchors.size()) + " anchors exceed the cap of " +
                std::to_string(max_anchors));
  DescriptorField field;
  field.kind = DescriptorKind::GDS;
  field.anchors = anchors;
  field.descriptors.resize(mesh.n_vertices(), anchors.size());
  parallel_for(0, anchors.size(), [&](std::size_t l) {
    DistanceField f = multi_source_distances(mesh, {anchors[l]});
    field.descriptors.col(Eigen::Index(l)) = f.distances;
  });
  return field;
}

std::vector<int> nn_rows(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets) {
  if (queries.cols() != targets.cols())
    throw DimensionMismatch("query dim " + std::to_string(queries.cols()) + " vs target dim " +
                            std::to_string(targets.cols()));
  const Eigen::Index n1 = queries.rows(), n2 = targets.rows();
  Eigen::VectorXd t_sq = targets.rowwise().squaredNorm();
  std::vector<int> result(std::size_t(n1), 0);

  // fixed block size keeps per-row arithmetic independent of thread count
  const Eigen::Index block = 256;
  const std::size_t n_blocks = std::size_t((n1 + block - 1) / block);
  parallel_for(0, n_blocks, [&](std::size_t bi) {
    Eigen::Index lo = Eigen::Index(bi) * block;
    Eigen::Index hi = std::min(n1, lo + block);
    Eigen::MatrixXd gram = queries.middleRows(lo, hi - lo) * targets.transpose();
    for (Eigen::Index r = 0; r < hi - lo; ++r) {
      int best = 0;
      double best_score = t_sq[0] - 2.0 * gram(r, 0);
      for (Eigen::Index q = 1; q < n2; ++q) {
        double score = t_sq[q] - 2.0 * gram(r, q);
        if (score < best_score) {
          best_score = score;
          best = int(q);
        }
      }
      result[std::size_t(lo + r)] = best;
    }
  });
  return result;
}

Correspondence nn_match(const DescriptorField& src, const DescriptorField& dst) {
  if (src.kind != dst.kind) throw DimensionMismatch("descriptor kinds differ");
  if (src.dim() != dst.dim())
    throw DimensionMismatch("descriptor dims differ: " + std::to_string(src.dim()) + " vs " +
                            std::to_string(dst.dim()));
  Correspondence corr;
  corr.map = nn_rows(src.descriptors, dst.descriptors);
  return corr;
}

}  // namespace dirmatch
