#include "dirmatch/dir.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "dirmatch/descriptors.hpp"
#include "dirmatch/errors.hpp"
#include "dirmatch/geodesics.hpp"

namespace dirmatch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median_of(const Eigen::VectorXd& values) {
  if (values.size() == 0) return kNaN;
  std::vector<double> v(values.data(), values.data() + values.size());
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

void validate_init(const DirInit& init, int n1, int n2) {
  if (init.initial_map) {
    if (init.initial_map->size() != n1)
      throw LengthMismatch("initial correspondence has " +
                           std::to_string(init.initial_map->size()) + " entries, source mesh has " +
                           std::to_string(n1));
    for (int t : init.initial_map->map)
      if (t != kUnmatched && (t < 0 || t >= n2))
        throw IndexOutOfRange("initial correspondence target " + std::to_string(t) +
                              " out of range");
  } else if (init.landmarks.empty()) {
    throw EmptyAnchorSet("refinement needs an initial correspondence or at least one landmark");
  }
  for (const auto& [s, t] : init.landmarks.pairs)
    if (s < 0 || s >= n1 || t < 0 || t >= n2)
      throw IndexOutOfRange("landmark pair (" + std::to_string(s) + ", " + std::to_string(t) +
                            ") out of range");
}

// Anchor selection shared by both modes. Returns false when refinement should
// stop (empty anchor set after the first iteration).
bool pick_anchors(const LmdSourceCache& cache, const TriangleMesh& mesh2,
                  const std::optional<Correspondence>& T, const AnchorSet& fixed, double eps,
                  int iter, AnchorSet& anchors, double& lmd_median, IterationTrace& trace) {
  if (!T) {
    anchors = fixed;
    lmd_median = kNaN;
  } else {
    LmdField lmd = lmd_field(cache, mesh2, *T);
    anchors = select_anchors(lmd, *T, eps, fixed);
    lmd_median = median_of(lmd.values);
  }
  if (anchors.empty()) {
    if (iter == 1)
      throw EmptyAnchorSet("no anchor pair below threshold " + std::to_string(eps) +
                           " at iteration 1 and no landmarks given");
    trace.warnings.push_back("anchor set became empty at iteration " + std::to_string(iter) +
                             "; stopping");
    return false;
  }
  return true;
}

void track_anchor_decrease(int m, int& prev_m, int& streak, IterationTrace& trace, int iter) {
  if (prev_m >= 0 && m < prev_m)
    ++streak;
  else
    streak = 0;
  prev_m = m;
  if (streak == 3)
    trace.warnings.push_back("convergence warning: anchor count decreased 3 iterations in a row "
                             "(iteration " +
                             std::to_string(iter) + ")");
}

void post_prune_if_requested(const DirConfig& cfg, const LmdSourceCache& cache,
                             const TriangleMesh& mesh2, Correspondence& T) {
  if (!cfg.post_prune) return;
  double eps = cfg.threshold_for_iteration(cfg.max_iters);
  LmdField lmd = lmd_field(cache, mesh2, T);
  T = prune_by_lmd(T, lmd, eps);
}

}  // namespace

double DirConfig::threshold_for_iteration(int i) const {
  if (lmd_thresholds.empty()) throw Error("empty threshold schedule");
  std::size_t idx = std::min<std::size_t>(std::size_t(i - 1), lmd_thresholds.size() - 1);
  return lmd_thresholds[idx];
}

void DirConfig::validate() const {
  if (max_iters < 1) throw Error("max_iters must be >= 1");
  if (K < 1) throw Error("K must be >= 1");
  if (ring_depth < 1) throw Error("ring_depth must be >= 1");
  if (gds_anchor_cap < 1) throw Error("gds_anchor_cap must be >= 1");
  if (lmd_thresholds.empty()) throw Error("threshold schedule is empty");
  for (std::size_t i = 0; i < lmd_thresholds.size(); ++i) {
    if (lmd_thresholds[i] <= 0.0) throw Error("thresholds must be positive");
    if (i > 0 && lmd_thresholds[i] > lmd_thresholds[i - 1])
      throw Error("thresholds must be non-increasing");
  }
}

DirResult dir_spectral(const TriangleMesh& mesh1, const TriangleMesh& mesh2,
                       const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                       const DirInit& init, const DirConfig& cfg) {
  cfg.validate();
  validate_init(init, mesh1.n_vertices(), mesh2.n_vertices());
  const int K_eff = std::min({cfg.K, emb1.K, emb2.K});

  DirResult result;
  LmdSourceCache cache = build_lmd_source_cache(mesh1, cfg.ring_depth);
  std::optional<Correspondence> T = init.initial_map;
  int prev_m = -1, streak = 0;

  for (int i = 1; i <= cfg.max_iters; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    double eps = cfg.threshold_for_iteration(i);
    AnchorSet anchors;
    double lmd_median = kNaN;
    if (!pick_anchors(cache, mesh2, T, init.landmarks, eps, i, anchors, lmd_median, result.trace))
      break;

    Eigen::MatrixXd corr = anchor_correlation(emb1, emb2, anchors, K_eff);
    SingularSpectrum spectrum = singular_spectrum(corr);
    int k_i = select_dimension(spectrum, anchors.size(), K_eff);
    FunctionalMap fmap = procrustes_from_correlation(corr.topLeftCorner(k_i, k_i));
    T = recover_map(emb1, emb2, fmap);

    result.functional_maps.push_back(fmap);
    result.trace.records.push_back(
        {i, anchors.size(), k_i, eps, lmd_median, seconds_since(t0)});
    track_anchor_decrease(anchors.size(), prev_m, streak, result.trace, i);
    if (k_i >= K_eff) break;  // dimension reached the cap
  }

  result.correspondence = *T;
  post_prune_if_requested(cfg, cache, mesh2, result.correspondence);
  return result;
}

DirResult dir_gds(const TriangleMesh& mesh1, const TriangleMesh& mesh2, const DirInit& init,
                  const DirConfig& cfg) {
  cfg.validate();
  validate_init(init, mesh1.n_vertices(), mesh2.n_vertices());
  if (init.landmarks.size() > cfg.gds_anchor_cap)
    throw Error("more fixed landmarks than gds_anchor_cap");

  DirResult result;
  LmdSourceCache cache = build_lmd_source_cache(mesh1, cfg.ring_depth);
  std::optional<Correspondence> T = init.initial_map;
  std::vector<std::pair<int, int>> prev_pairs;
  int prev_m = -1, streak = 0;

  for (int i = 1; i <= cfg.max_iters; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    double eps = cfg.threshold_for_iteration(i);
    AnchorSet anchors;
    double lmd_median = kNaN;
    if (!pick_anchors(cache, mesh2, T, init.landmarks, eps, i, anchors, lmd_median, result.trace))
      break;

    if (anchors.size() > cfg.gds_anchor_cap) {
      // farthest-point subsample on the source mesh, landmarks kept
      std::vector<int> pool = anchors.sources();
      std::vector<int> seeds;
      for (std::size_t p = 0; p < anchors.pairs.size(); ++p)
        if (anchors.fixed_mask[p]) seeds.push_back(anchors.pairs[p].first);
      std::vector<int> kept = farthest_point_sample(mesh1, cfg.gds_anchor_cap, pool, seeds);
      std::sort(kept.begin(), kept.end());
      AnchorSet capped;
      for (std::size_t p = 0; p < anchors.pairs.size(); ++p) {
        if (std::binary_search(kept.begin(), kept.end(), anchors.pairs[p].first)) {
          capped.pairs.push_back(anchors.pairs[p]);
          capped.fixed_mask.push_back(anchors.fixed_mask[p]);
        }
      }
      anchors = std::move(capped);
    }

    if (i > 1 && anchors.pairs == prev_pairs) {
      result.trace.warnings.push_back("anchor set unchanged at iteration " + std::to_string(i) +
                                      "; stopping");
      break;
    }
    prev_pairs = anchors.pairs;

    DescriptorField f1 = gds_features(mesh1, anchors.sources(), cfg.gds_anchor_cap);
    DescriptorField f2 = gds_features(mesh2, anchors.targets(), cfg.gds_anchor_cap);
    T = nn_match(f1, f2);

    result.trace.records.push_back(
        {i, anchors.size(), 0, eps, lmd_median, seconds_since(t0)});
    track_anchor_decrease(anchors.size(), prev_m, streak, result.trace, i);
  }

  result.correspondence = *T;
  post_prune_if_requested(cfg, cache, mesh2, result.correspondence);
  return result;
}

void save_trace_csv(const std::string& path, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "iter,m,k,epsilon,lmd_median,seconds\n";
  for (const auto& r : trace.records)
    out << r.iteration << "," << r.anchor_count << "," << r.spectral_dim << "," << r.threshold
        << "," << r.lmd_median << "," << r.seconds << "\n";
}

}  // namespace dirmatch
