#pragma once

#include <Eigen/Core>
#include <string>

#include "dirmatch/correspondence.hpp"
#include "dirmatch/spectral.hpp"

namespace dirmatch {

/// Orthonormal functional map between truncated spectral bases.
struct FunctionalMap {
  Eigen::MatrixXd C;  // k x k, C^T C = I within 1e-8
  int k = 0;
  bool rank_deficient = false;  // sigma_k / sigma_1 < 1e-10 on the anchor correlation
};

struct SingularSpectrum {
  Eigen::VectorXd sigma;  // descending
  Eigen::MatrixXd U, V;
};

/// Phi1[anchor sources, :K]^T * Phi2[anchor targets, :K].
Eigen::MatrixXd anchor_correlation(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                                   const AnchorSet& anchors, int K);

SingularSpectrum singular_spectrum(const Eigen::MatrixXd& correlation);

/// Data-adaptive spectral dimension: normalize singular values by the mean of
/// the 10 largest; cut where a sliding window of 10 consecutive normalized
/// values sums below 0.1 (tail windows use a proportionally scaled
/// threshold). No qualifying window means min(m, K). The result is clamped to
/// [4, min(m, K)].
int select_dimension(const SingularSpectrum& spectrum, int m, int K);

/// Orthogonal Procrustes fit on the first k spectral coordinates of the
/// anchor rows: C = U V^T from the SVD of the k x k anchor correlation, with
/// a deterministic sign convention (largest-magnitude entry of each left
/// singular vector positive).
FunctionalMap procrustes(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                         const AnchorSet& anchors, int k);

/// Same projection applied to a precomputed k x k correlation.
FunctionalMap procrustes_from_correlation(const Eigen::MatrixXd& correlation);

/// Unconstrained least-squares variant of the map fit (kept for comparison;
/// the refinement loop always uses the orthonormal form).
Eigen::MatrixXd least_squares_map(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                                  const AnchorSet& anchors, int k);

/// Dense map recovery: T(p) = argmin_q |Phi1(p, :k) C - Phi2(q, :k)|,
/// exact nearest neighbors, ties to lowest index.
Correspondence recover_map(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                           const FunctionalMap& C);

/// CSV export (k, then row-major C), one file per refinement iteration.
void save_functional_map_csv(const std::string& path, const FunctionalMap& fmap);

}  // namespace dirmatch
