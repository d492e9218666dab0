#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirmatch/correspondence.hpp"
#include "dirmatch/fmap.hpp"
#include "dirmatch/lmd.hpp"
#include "dirmatch/mesh.hpp"
#include "dirmatch/spectral.hpp"

namespace dirmatch {

enum class DirMode { SPECTRAL, GDS };
enum class InitKind { DESCRIPTOR, LANDMARKS, FILE };

struct DirConfig {
  int max_iters = 10;
  std::vector<double> lmd_thresholds = {0.26, 0.22, 0.18, 0.14, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  int K = 500;
  int ring_depth = 2;
  DirMode mode = DirMode::SPECTRAL;
  int gds_anchor_cap = 800;
  InitKind init = InitKind::DESCRIPTOR;
  bool post_prune = false;  // prune the final map by LMD at the last threshold

  /// Threshold for 1-based iteration i; a schedule shorter than max_iters
  /// repeats its last value.
  double threshold_for_iteration(int i) const;
  /// Throws on non-positive or increasing thresholds, bad sizes.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;     // 1-based
  int anchor_count = 0;  // m_i
  int spectral_dim = 0;  // k_i (0 in GDS mode)
  double threshold = 0.0;
  double lmd_median = 0.0;  // NaN on a landmark-only first iteration
  double seconds = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;
};

/// Either a full initial correspondence, landmark pairs, or both. Landmarks
/// are fixed: they are re-added to the anchor set at every iteration.
struct DirInit {
  std::optional<Correspondence> initial_map;
  AnchorSet landmarks;
};

struct DirResult {
  Correspondence correspondence;
  IterationTrace trace;
  std::vector<FunctionalMap> functional_maps;  // one per iteration, spectral mode
};

/// Spectral-feature refinement: anchors by distortion threshold, adaptive
/// dimension from the anchor correlation's singular values, orthonormal map
/// fit on anchors only, dense KNN recovery. Stops after max_iters iterations
/// or when the selected dimension reaches the spectral cap, whichever comes
/// first.
DirResult dir_spectral(const TriangleMesh& mesh1, const TriangleMesh& mesh2,
                       const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                       const DirInit& init, const DirConfig& cfg);

/// Geodesic-distance-signature refinement for patch/partial matching: the
/// anchors themselves are the feature reference points (farthest-point
/// subsampled to gds_anchor_cap). Stops after max_iters iterations or when
/// the anchor set repeats.
DirResult dir_gds(const TriangleMesh& mesh1, const TriangleMesh& mesh2, const DirInit& init,
                  const DirConfig& cfg);

void save_trace_csv(const std::string& path, const IterationTrace& trace);

}  // namespace dirmatch
