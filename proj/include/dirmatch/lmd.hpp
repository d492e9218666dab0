#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dirmatch/correspondence.hpp"
#include "dirmatch/mesh.hpp"

namespace dirmatch {

/// Local mapping distortion of a correspondence: per source point, the
/// area-weighted average over its ring neighborhood of
///   |d1(i, j) - d2(T(i), T(j))| / gamma_i,
/// where gamma_i is the largest source-side graph distance inside the
/// neighborhood. Zero iff the map is locally isometric on the neighborhood.
struct LmdField {
  Eigen::VectorXd values;  // +inf at unmatched points / empty usable neighborhoods
  Eigen::VectorXd gamma;   // per-point radii used
};

/// Source-side quantities of the distortion (neighborhoods, distances,
/// gamma, area weights) depend only on mesh1; precompute once and reuse
/// across refinement iterations.
struct LmdSourceCache {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<double>> source_dist;
  Eigen::VectorXd gamma;
  Eigen::VectorXd areas;
  int ring_depth = 2;
};

LmdSourceCache build_lmd_source_cache(const TriangleMesh& mesh1, int ring_depth = 2);

// Images farther than gamma * (1 + kLmdCap) on the target contribute the
// capped term kLmdCap + d1/gamma instead of a measured distance; the cap
// exceeds every threshold in the default schedule.
constexpr double kLmdCap = 0.3;

LmdField lmd_field(const LmdSourceCache& cache, const TriangleMesh& mesh2,
                   const Correspondence& T);
LmdField lmd_field(const TriangleMesh& mesh1, const TriangleMesh& mesh2, const Correspondence& T,
                   int ring_depth = 2);

/// Anchor pairs: fixed landmarks plus every matched point whose distortion is
/// below the threshold. Duplicate source indices resolve in favor of fixed
/// pairs. Pairs are sorted by source index.
AnchorSet select_anchors(const LmdField& lmd, const Correspondence& T, double threshold,
                         const AnchorSet& fixed);

/// Partial-matching post-pass: unmatches every point at or above threshold.
Correspondence prune_by_lmd(const Correspondence& T, const LmdField& lmd, double threshold);

/// CSV export (vertex, lmd, gamma) for use as an unsupervised error metric.
void save_lmd_csv(const std::string& path, const LmdField& lmd);

}  // namespace dirmatch
