#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>

#include "dirmatch/mesh.hpp"

namespace dirmatch {

/// Cotangent stiffness matrix W (positive semidefinite, zero row sums) and
/// the lumped mass diagonal. The eigenproblem solved downstream is
/// W phi = lambda * diag(areas) * phi with lambda >= 0; the classical edge
/// weight (cot a + cot b)/2 for edge (i, j) is -W(i, j).
struct LaplacianPair {
  Eigen::SparseMatrix<double> W;
  Eigen::VectorXd areas;

  double edge_weight(int i, int j) const { return -W.coeff(i, j); }
};

LaplacianPair cotan_laplacian(const TriangleMesh& mesh);

/// Point-cloud variant: cotangent weights of every per-point local mesh are
/// accumulated into one global matrix (entries averaged over the local meshes
/// that contribute them), mirroring the mesh path.
LaplacianPair cloud_laplacian(const PointCloud& cloud, int k_local);

/// First K eigenpairs of W phi = lambda A phi. Columns of phi are
/// A-orthonormal, eigenvalues ascending, and each column is sign-normalized
/// so its largest-magnitude entry is positive (ties: lowest index).
struct SpectralEmbedding {
  Eigen::MatrixXd phi;     // n x K
  Eigen::VectorXd lambda;  // ascending, nonnegative
  int K = 0;
};

struct EigsOptions {
  // Relative residual each pair must meet: |W phi - lambda A phi| / |A phi|.
  double residual_tol = 1e-8;
  int max_lanczos_dim = 0;  // 0 = automatic
  // Meshes below this size use a dense solver.
  int dense_threshold = 600;
};

/// Throws ConvergenceFailure (with the converged count) if the iteration
/// budget runs out before K pairs meet the residual tolerance.
SpectralEmbedding lb_eigs(const LaplacianPair& lap, int K, const EigsOptions& opts = {});

/// Content hash used to key embedding caches: mesh vertices + faces + K.
std::uint64_t embedding_cache_key(const TriangleMesh& mesh, int K);

/// Binary sidecar (magic, key, n, K, eigenvalues, row-major phi).
void save_embedding(const std::string& path, const SpectralEmbedding& emb, std::uint64_t key);

/// Returns false when the file is absent or its key does not match.
bool load_embedding(const std::string& path, std::uint64_t key, SpectralEmbedding& out);

/// CSV export (n, K, eigenvalues, then row-major phi), for inspection.
void save_embedding_csv(const std::string& path, const SpectralEmbedding& emb);

}  // namespace dirmatch
