#include "dirmatch/fmap.hpp"

#include <Eigen/Dense>
#include <fstream>

#include "dirmatch/descriptors.hpp"
#include "dirmatch/errors.hpp"

namespace dirmatch {

namespace {

Eigen::MatrixXd anchor_rows(const SpectralEmbedding& emb, const std::vector<int>& idx, int k) {
  Eigen::MatrixXd out(idx.size(), k);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= emb.phi.rows())
      throw IndexOutOfRange("anchor index " + std::to_string(idx[r]) + " out of range");
    out.row(Eigen::Index(r)) = emb.phi.row(idx[r]).head(k);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd anchor_correlation(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                                   const AnchorSet& anchors, int K) {
  if (anchors.empty()) throw EmptyAnchorSet("anchor_correlation: no anchor pairs");
  if (K > emb1.K || K > emb2.K)
    throw DimensionMismatch("K = " + std::to_string(K) + " exceeds embedding dimension");
  Eigen::MatrixXd X1 = anchor_rows(emb1, anchors.sources(), K);
  Eigen::MatrixXd X2 = anchor_rows(emb2, anchors.targets(), K);
  return X1.transpose() * X2;
}

SingularSpectrum singular_spectrum(const Eigen::MatrixXd& correlation) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(correlation, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularSpectrum s;
  s.sigma = svd.singularValues();
  s.U = svd.matrixU();
  s.V = svd.matrixV();
  return s;
}

int select_dimension(const SingularSpectrum& spectrum, int m, int K) {
  if (m < 1) throw Error("select_dimension: anchor count must be >= 1");
  const int len = std::min<int>(int(spectrum.sigma.size()), K);
  const int upper = std::min(m, K);
  constexpr int kWindow = 10;
  constexpr double kThreshold = 0.1;
  constexpr int kMinDim = 4;

  double mu = spectrum.sigma.head(std::min(kWindow, len)).mean();
  int k = upper;  // no qualifying window
  if (mu > 0.0) {
    for (int i = 0; i < len; ++i) {
      int w = std::min(kWindow, len - i);
      double sum = spectrum.sigma.segment(i, w).sum() / mu;
      if (sum < kThreshold * double(w) / double(kWindow)) {
        k = i;  // window starts at 1-based i+1, cut is one before it
        break;
      }
    }
  } else {
    k = 0;  // all-zero spectrum
  }
  k = std::max(k, kMinDim);
  k = std::min(k, upper);
  return k;
}

FunctionalMap procrustes_from_correlation(const Eigen::MatrixXd& correlation) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(correlation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd U = svd.matrixU();
  Eigen::MatrixXd V = svd.matrixV();
  // deterministic sign convention on the left factor
  for (int c = 0; c < U.cols(); ++c) {
    int arg = 0;
    double best = std::abs(U(0, c));
    for (int r = 1; r < U.rows(); ++r)
      if (std::abs(U(r, c)) > best) {
        best = std::abs(U(r, c));
        arg = r;
      }
    if (U(arg, c) < 0.0) {
      U.col(c) = -U.col(c);
      V.col(c) = -V.col(c);
    }
  }
  FunctionalMap fmap;
  fmap.C = U * V.transpose();
  fmap.k = int(correlation.rows());
  const auto& sig = svd.singularValues();
  fmap.rank_deficient = sig(sig.size() - 1) < 1e-10 * sig(0);
  return fmap;
}

FunctionalMap procrustes(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                         const AnchorSet& anchors, int k) {
  return procrustes_from_correlation(anchor_correlation(emb1, emb2, anchors, k));
}

Eigen::MatrixXd least_squares_map(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                                  const AnchorSet& anchors, int k) {
  if (anchors.empty()) throw EmptyAnchorSet("least_squares_map: no anchor pairs");
  Eigen::MatrixXd X1 = anchor_rows(emb1, anchors.sources(), k);
  Eigen::MatrixXd X2 = anchor_rows(emb2, anchors.targets(), k);
  return X1.colPivHouseholderQr().solve(X2);
}

Correspondence recover_map(const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
                           const FunctionalMap& fmap) {
  const int k = fmap.k;
  if (k > emb1.K || k > emb2.K)
    throw DimensionMismatch("functional map dimension " + std::to_string(k) +
                            " exceeds embedding dimension");
  Eigen::MatrixXd mapped = emb1.phi.leftCols(k) * fmap.C;
  Correspondence corr;
  corr.map = nn_rows(mapped, emb2.phi.leftCols(k));
  return corr;
}

void save_functional_map_csv(const std::string& path, const FunctionalMap& fmap) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << fmap.k << "\n";
  for (int r = 0; r < fmap.k; ++r) {
    for (int c = 0; c < fmap.k; ++c) out << (c ? "," : "") << fmap.C(r, c);
    out << "\n";
  }
}

}  // namespace dirmatch
