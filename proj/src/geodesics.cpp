#include "dirmatch/geodesics.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>

#include "dirmatch/errors.hpp"

namespace dirmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (distance, vertex) min-heap entry; the vertex component breaks ties so the
// settle order is independent of heap internals.
using HeapEntry = std::pair<double, int>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

}  // namespace

double GeodesicBall::lookup(int v) const {
  auto it = std::lower_bound(distances.begin(), distances.end(), v,
                             [](const std::pair<int, double>& e, int key) { return e.first < key; });
  if (it != distances.end() && it->first == v) return it->second;
  return -1.0;
}

GeodesicBall geodesic_ball(const TriangleMesh& mesh, int i, double radius) {
  if (i < 0 || i >= mesh.n_vertices())
    throw IndexOutOfRange("vertex " + std::to_string(i) + " out of range");

  std::vector<double> dist(mesh.n_vertices(), kInf);
  dist[i] = 0.0;
  MinHeap heap;
  heap.push({0.0, i});
  GeodesicBall ball;
  ball.center = i;
  ball.radius = radius;
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    ball.distances.emplace_back(u, d);
    for (const auto& [v, len] : mesh.edge_adj[u]) {
      double nd = d + len;
      if (nd < dist[v] && nd <= radius) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  std::sort(ball.distances.begin(), ball.distances.end());
  return ball;
}

DistanceField multi_source_distances(const TriangleMesh& mesh, const std::vector<int>& sources) {
  if (sources.empty()) throw Error("multi_source_distances: empty source set");
  DistanceField field;
  field.sources = sources;
  field.distances = Eigen::VectorXd::Constant(mesh.n_vertices(), kInf);
  MinHeap heap;
  for (int s : sources) {
    if (s < 0 || s >= mesh.n_vertices())
      throw IndexOutOfRange("source " + std::to_string(s) + " out of range");
    field.distances[s] = 0.0;
  }
  for (int s : sources) heap.push({0.0, s});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > field.distances[u]) continue;
    for (const auto& [v, len] : mesh.edge_adj[u]) {
      double nd = d + len;
      if (nd < field.distances[v]) {
        field.distances[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return field;
}

std::vector<double> distances_to_targets(const TriangleMesh& mesh, int source,
                                         const std::vector<int>& targets) {
  std::vector<double> dist(mesh.n_vertices(), kInf);
  std::vector<char> wanted(mesh.n_vertices(), 0);
  int remaining = 0;
  for (int t : targets)
    if (!wanted[t]) {
      wanted[t] = 1;
      ++remaining;
    }
  dist[source] = 0.0;
  MinHeap heap;
  heap.push({0.0, source});
  while (!heap.empty() && remaining > 0) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (wanted[u]) {
      wanted[u] = 0;
      --remaining;
    }
    for (const auto& [v, len] : mesh.edge_adj[u]) {
      double nd = d + len;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  std::vector<double> out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) out[k] = dist[targets[k]];
  return out;
}

std::vector<int> farthest_point_sample(const TriangleMesh& mesh, int count,
                                       const std::vector<int>& pool,
                                       const std::vector<int>& seeds) {
  const int n = mesh.n_vertices();
  std::vector<int> candidates = pool;
  if (candidates.empty()) {
    candidates.resize(n);
    for (int i = 0; i < n; ++i) candidates[i] = i;
  }
  std::vector<char> selected(n, 0);
  std::vector<int> result;
  Eigen::VectorXd dmin = Eigen::VectorXd::Constant(n, kInf);

  auto add = [&](int v) {
    selected[v] = 1;
    result.push_back(v);
    DistanceField f = multi_source_distances(mesh, {v});
    dmin = dmin.cwiseMin(f.distances);
  };

  for (int s : seeds)
    if (!selected[s] && int(result.size()) < count) add(s);
  if (result.empty() && count > 0 && !candidates.empty()) add(candidates.front());

  while (int(result.size()) < count) {
    int best = -1;
    double best_d = -1.0;
    for (int v : candidates) {
      if (selected[v]) continue;
      if (dmin[v] > best_d) {
        best_d = dmin[v];
        best = v;
      }
    }
    if (best < 0) break;  // pool exhausted
    add(best);
  }
  return result;
}

double estimate_diameter(const TriangleMesh& mesh) {
  const int sample_size = std::min(20, mesh.n_vertices());
  std::vector<int> sample = farthest_point_sample(mesh, sample_size);
  double diam = 0.0;
  for (int s : sample) {
    DistanceField f = multi_source_distances(mesh, {s});
    double far = f.distances.maxCoeff();
    if (!std::isfinite(far)) throw DisconnectedMesh("mesh is not connected");
    diam = std::max(diam, far);
  }
  return diam;
}

void save_distance_field_csv(const std::string& path, const DistanceField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "vertex,distance\n";
  for (int i = 0; i < field.distances.size(); ++i) out << i << "," << field.distances[i] << "\n";
}

}  // namespace dirmatch
