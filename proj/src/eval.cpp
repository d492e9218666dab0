#include "dirmatch/eval.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>

#include "dirmatch/errors.hpp"
#include "dirmatch/geodesics.hpp"
#include "dirmatch/parallel.hpp"

namespace dirmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ErrorCurve::mean_matched_error() const {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < per_point.size(); ++i) {
    if (std::isfinite(per_point[i])) {
      sum += per_point[i];
      ++count;
    }
  }
  return count > 0 ? sum / double(count) : 0.0;
}

ErrorCurve geodesic_error(const Correspondence& T, const Correspondence& T_gt,
                          const TriangleMesh& mesh2, const ErrorCurveOptions& opts) {
  if (T.size() != T_gt.size())
    throw LengthMismatch("correspondence lengths differ: " + std::to_string(T.size()) + " vs " +
                         std::to_string(T_gt.size()));
  const int n1 = T.size();
  ErrorCurve curve;
  curve.diameter = estimate_diameter(mesh2);
  curve.per_point = Eigen::VectorXd::Constant(n1, kInf);

  // Distance queries grouped by canonical (min, max) endpoint pair so the
  // metric is exactly symmetric in the two arguments; one truncated Dijkstra
  // per distinct source, stopping once all of its targets settle.
  std::map<int, std::vector<std::pair<int, int>>> by_source;  // source -> (target, point)
  for (int i = 0; i < n1; ++i) {
    if (!T.matched(i) || !T_gt.matched(i)) continue;
    int a = T.map[i], b = T_gt.map[i];
    if (a < 0 || a >= mesh2.n_vertices() || b < 0 || b >= mesh2.n_vertices())
      throw IndexOutOfRange("correspondence target out of range at point " + std::to_string(i));
    if (a == b) {
      curve.per_point[i] = 0.0;
      continue;
    }
    by_source[std::min(a, b)].emplace_back(std::max(a, b), i);
  }

  std::vector<int> sources;
  sources.reserve(by_source.size());
  for (const auto& [s, _] : by_source) sources.push_back(s);
  parallel_for(0, sources.size(), [&](std::size_t si) {
    int s = sources[si];
    const auto& queries = by_source.at(s);
    std::vector<int> targets(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) targets[q] = queries[q].first;
    std::vector<double> d = distances_to_targets(mesh2, s, targets);
    for (std::size_t q = 0; q < queries.size(); ++q)
      curve.per_point[queries[q].second] = d[q] / curve.diameter;
  });

  curve.thresholds = Eigen::VectorXd::LinSpaced(opts.grid_points, 0.0, opts.max_threshold);
  curve.fractions.resize(opts.grid_points);
  for (int g = 0; g < opts.grid_points; ++g) {
    int count = 0;
    for (int i = 0; i < n1; ++i)
      if (curve.per_point[i] <= curve.thresholds[g]) ++count;
    curve.fractions[g] = n1 > 0 ? double(count) / double(n1) : 0.0;
  }
  curve.auc = 0.0;
  for (int g = 0; g + 1 < opts.grid_points; ++g)
    curve.auc += 0.5 * (curve.fractions[g] + curve.fractions[g + 1]) *
                 (curve.thresholds[g + 1] - curve.thresholds[g]);
  return curve;
}

void save_error_curve_csv(const std::string& path, const ErrorCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "threshold,fraction\n";
  for (int g = 0; g < curve.thresholds.size(); ++g)
    out << curve.thresholds[g] << "," << curve.fractions[g] << "\n";
}

void save_per_point_errors(const std::string& path, const ErrorCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "vertex,error\n";
  for (int i = 0; i < curve.per_point.size(); ++i)
    out << i << "," << curve.per_point[i] << "\n";
}

}  // namespace dirmatch
