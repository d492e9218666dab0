#pragma once

#include <Eigen/Core>
#include <vector>

#include "dirmatch/correspondence.hpp"
#include "dirmatch/mesh.hpp"

namespace dirmatch {

enum class DescriptorKind { SHOT_LIKE, GDS };

struct DescriptorField {
  Eigen::MatrixXd descriptors;  // n x D
  DescriptorKind kind = DescriptorKind::SHOT_LIKE;
  double support_radius = 0.0;      // SHOT_LIKE
  std::vector<int> anchors;         // GDS reference points
  std::vector<int> degenerate_rows; // rows flagged all-zero (too few neighbors)

  int dim() const { return int(descriptors.cols()); }
};

/// Simplified SHOT-style extrinsic descriptor, 352 dimensions:
/// 8 azimuth x 2 elevation x 2 radial sectors, 11 cosine bins, no
/// interpolation, fully deterministic tie-breaks, rows L2-normalized.
/// Points with fewer than 5 neighbors inside the support get a zero row and
/// are listed in degenerate_rows.
DescriptorField shot_descriptors(const TriangleMesh& mesh, double radius);
DescriptorField shot_descriptors(const PointCloud& cloud, double radius);

/// Geodesic distance signature: column l holds single-source graph distances
/// from anchor l. At most max_anchors reference points.
DescriptorField gds_features(const TriangleMesh& mesh, const std::vector<int>& anchors,
                             int max_anchors = 800);

/// Exact nearest-neighbor assignment in descriptor space; ties go to the
/// lowest target index. Fields must agree in dimension and kind.
Correspondence nn_match(const DescriptorField& src, const DescriptorField& dst);

/// Row-wise exact nearest neighbors: for each row of queries, the index of
/// the closest row of targets (squared Euclidean, ties to lowest index).
std::vector<int> nn_rows(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets);

}  // namespace dirmatch
