#include "dirmatch/lmd.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "dirmatch/errors.hpp"
#include "dirmatch/geodesics.hpp"
#include "dirmatch/parallel.hpp"

namespace dirmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LmdSourceCache build_lmd_source_cache(const TriangleMesh& mesh1, int ring_depth) {
  if (ring_depth < 1) throw Error("ring_depth must be >= 1");
  const int n = mesh1.n_vertices();
  LmdSourceCache cache;
  cache.ring_depth = ring_depth;
  cache.neighbors.resize(n);
  cache.source_dist.resize(n);
  cache.gamma = Eigen::VectorXd::Zero(n);
  cache.areas = vertex_areas(mesh1);

  parallel_for(0, std::size_t(n), [&](std::size_t ip) {
    const int i = int(ip);
    std::vector<int> ring = ring_neighborhood(mesh1, i, ring_depth);
    if (ring.empty()) return;  // isolated vertices are rejected by make_mesh
    cache.neighbors[i] = std::move(ring);
    cache.source_dist[i] = distances_to_targets(mesh1, i, cache.neighbors[i]);
    double g = 0.0;
    for (double d : cache.source_dist[i]) g = std::max(g, d);
    cache.gamma[i] = g;
  });
  return cache;
}

LmdField lmd_field(const LmdSourceCache& cache, const TriangleMesh& mesh2,
                   const Correspondence& T) {
  const int n = int(cache.neighbors.size());
  if (T.size() != n) throw LengthMismatch("correspondence length " + std::to_string(T.size()) +
                                          " does not match source mesh size " + std::to_string(n));
  LmdField field;
  field.values = Eigen::VectorXd::Constant(n, kInf);
  field.gamma = cache.gamma;

  parallel_for(0, std::size_t(n), [&](std::size_t ip) {
    const int i = int(ip);
    if (!T.matched(i)) return;
    const auto& nbrs = cache.neighbors[i];
    if (nbrs.empty()) throw EmptyNeighborhood("vertex " + std::to_string(i) +
                                              " has an empty ring neighborhood");
    const double gamma = cache.gamma[i];

    GeodesicBall ball = geodesic_ball(mesh2, T.map[i], gamma * (1.0 + kLmdCap));
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (std::size_t s = 0; s < nbrs.size(); ++s) {
      int j = nbrs[s];
      if (!T.matched(j)) continue;  // unmatched neighbors are skipped
      double d1 = cache.source_dist[i][s];
      double d2 = ball.lookup(T.map[j]);
      double de = d2 >= 0.0 ? std::abs(d1 - d2) / gamma : kLmdCap + d1 / gamma;
      double area = cache.areas[j];
      weighted_sum += area * de;
      weight_total += area;
    }
    if (weight_total > 0.0) field.values[i] = weighted_sum / weight_total;
  });
  return field;
}

LmdField lmd_field(const TriangleMesh& mesh1, const TriangleMesh& mesh2, const Correspondence& T,
                   int ring_depth) {
  return lmd_field(build_lmd_source_cache(mesh1, ring_depth), mesh2, T);
}

AnchorSet select_anchors(const LmdField& lmd, const Correspondence& T, double threshold,
                         const AnchorSet& fixed) {
  if (threshold < 0.0) throw Error("threshold must be nonnegative");
  AnchorSet out;
  std::vector<char> taken(std::size_t(T.size()), 0);
  for (std::size_t p = 0; p < fixed.pairs.size(); ++p) {
    out.pairs.push_back(fixed.pairs[p]);
    out.fixed_mask.push_back(1);
    if (fixed.pairs[p].first >= 0 && fixed.pairs[p].first < T.size())
      taken[std::size_t(fixed.pairs[p].first)] = 1;
  }
  for (int i = 0; i < T.size(); ++i) {
    if (taken[std::size_t(i)] || !T.matched(i)) continue;
    if (lmd.values[i] < threshold) {
      out.pairs.emplace_back(i, T.map[i]);
      out.fixed_mask.push_back(0);
    }
  }
  // keep a deterministic order: by source index, fixed pairs first on ties
  std::vector<std::size_t> order(out.pairs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.pairs[a].first != out.pairs[b].first) return out.pairs[a].first < out.pairs[b].first;
    return out.fixed_mask[a] > out.fixed_mask[b];
  });
  AnchorSet sorted;
  sorted.pairs.reserve(out.pairs.size());
  for (std::size_t k : order) {
    sorted.pairs.push_back(out.pairs[k]);
    sorted.fixed_mask.push_back(out.fixed_mask[k]);
  }
  return sorted;
}

Correspondence prune_by_lmd(const Correspondence& T, const LmdField& lmd, double threshold) {
  if (lmd.values.size() != T.size())
    throw LengthMismatch("lmd field and correspondence lengths differ");
  Correspondence out = T;
  for (int i = 0; i < T.size(); ++i)
    if (!(lmd.values[i] < threshold)) out.map[i] = kUnmatched;
  return out;
}

void save_lmd_csv(const std::string& path, const LmdField& lmd) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "vertex,lmd,gamma\n";
  for (int i = 0; i < lmd.values.size(); ++i)
    out << i << "," << lmd.values[i] << "," << lmd.gamma[i] << "\n";
}

}  // namespace dirmatch
