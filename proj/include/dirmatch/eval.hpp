#pragma once

#include <Eigen/Core>
#include <string>

#include "dirmatch/correspondence.hpp"
#include "dirmatch/mesh.hpp"

namespace dirmatch {

/// Cumulative geodesic-error curve of a correspondence against ground truth:
/// e(x) = d2(T(x), T_gt(x)) / diam, with unmatched points counted as +inf.
struct ErrorCurve {
  Eigen::VectorXd thresholds;  // ascending grid in [0, max_threshold]
  Eigen::VectorXd fractions;   // fraction of points with e(x) <= threshold
  double auc = 0.0;            // trapezoidal area under the curve
  Eigen::VectorXd per_point;   // e(x) per source point
  double diameter = 0.0;       // normalization used

  double mean_matched_error() const;
};

struct ErrorCurveOptions {
  double max_threshold = 0.25;
  int grid_points = 100;
};

/// Distances are exact edge-graph distances on mesh2, normalized by
/// estimate_diameter(mesh2). Throws LengthMismatch when T and T_gt differ in
/// length, DisconnectedMesh via the diameter estimate.
ErrorCurve geodesic_error(const Correspondence& T, const Correspondence& T_gt,
                          const TriangleMesh& mesh2, const ErrorCurveOptions& opts = {});

/// Two-column CSV (threshold, fraction).
void save_error_curve_csv(const std::string& path, const ErrorCurve& curve);
void save_per_point_errors(const std::string& path, const ErrorCurve& curve);

}  // namespace dirmatch
