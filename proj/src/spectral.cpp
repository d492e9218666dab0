#include "dirmatch/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "dirmatch/errors.hpp"
#include "dirmatch/local_mesh.hpp"
#include "dirmatch/rng.hpp"
#include "dirmatch/util.hpp"

namespace dirmatch {

namespace {

double corner_cotangent(const Eigen::Vector3d& corner, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b, int face_index) {
  Eigen::Vector3d u = a - corner, v = b - corner;
  double cross = u.cross(v).norm();
  if (cross == 0.0)
    throw DegenerateGeometry("zero-area face " + std::to_string(face_index) +
                             " makes cotangent undefined");
  return u.dot(v) / cross;
}

}  // namespace

LaplacianPair cotan_laplacian(const TriangleMesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(std::size_t(mesh.n_faces()) * 12);
  for (int t = 0; t < mesh.n_faces(); ++t) {
    int idx[3] = {mesh.faces(t, 0), mesh.faces(t, 1), mesh.faces(t, 2)};
    Eigen::Vector3d p[3] = {mesh.vertices.row(idx[0]), mesh.vertices.row(idx[1]),
                            mesh.vertices.row(idx[2])};
    for (int c = 0; c < 3; ++c) {
      // half-cotangent at corner c acts on the opposite edge
      double w = 0.5 * corner_cotangent(p[c], p[(c + 1) % 3], p[(c + 2) % 3], t);
      int i = idx[(c + 1) % 3], j = idx[(c + 2) % 3];
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
    }
  }
  LaplacianPair lap;
  lap.W.resize(n, n);
  lap.W.setFromTriplets(triplets.begin(), triplets.end());
  lap.areas = vertex_areas(mesh);
  return lap;
}

LaplacianPair cloud_laplacian(const PointCloud& cloud, int k_local) {
  const int n = cloud.n_points();
  std::map<std::pair<int, int>, std::pair<double, int>> edge_acc;  // (sum, count)
  Eigen::VectorXd area_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi area_count = Eigen::VectorXi::Zero(n);

  for (int i = 0; i < n; ++i) {
    LocalMesh lm = build_local_mesh(cloud, i, k_local);
    LaplacianPair local = cotan_laplacian(lm.mesh);
    for (int col = 0; col < local.W.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(local.W, col); it; ++it) {
        if (it.row() >= it.col()) continue;
        int a = lm.cloud_indices[it.row()], b = lm.cloud_indices[it.col()];
        auto key = std::minmax(a, b);
        auto& acc = edge_acc[key];
        acc.first += -it.value();  // stored entry is minus the edge weight
        acc.second += 1;
      }
    }
    for (int r = 0; r < lm.mesh.n_vertices(); ++r) {
      area_sum[lm.cloud_indices[r]] += local.areas[r];
      area_count[lm.cloud_indices[r]] += 1;
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edge_acc.size() * 4);
  for (const auto& [key, acc] : edge_acc) {
    double w = acc.first / double(acc.second);
    triplets.emplace_back(key.first, key.second, -w);
    triplets.emplace_back(key.second, key.first, -w);
    triplets.emplace_back(key.first, key.first, w);
    triplets.emplace_back(key.second, key.second, w);
  }
  LaplacianPair lap;
  lap.W.resize(n, n);
  lap.W.setFromTriplets(triplets.begin(), triplets.end());
  lap.areas.resize(n);
  for (int i = 0; i < n; ++i) {
    if (area_count[i] == 0) throw DegenerateGeometry("point " + std::to_string(i) +
                                                     " received no local-mesh area");
    lap.areas[i] = area_sum[i] / double(area_count[i]);
  }
  return lap;
}

namespace {

void sign_normalize_columns(Eigen::MatrixXd& phi) {
  for (int c = 0; c < phi.cols(); ++c) {
    int arg = 0;
    double best = std::abs(phi(0, c));
    for (int r = 1; r < phi.rows(); ++r) {
      double v = std::abs(phi(r, c));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    if (phi(arg, c) < 0.0) phi.col(c) = -phi.col(c);
  }
}

// Relative residuals |W phi - lambda A phi| / |A phi| per column.
Eigen::VectorXd pencil_residuals(const LaplacianPair& lap, const Eigen::MatrixXd& phi,
                                 const Eigen::VectorXd& lambda) {
  Eigen::VectorXd res(phi.cols());
  for (int c = 0; c < phi.cols(); ++c) {
    Eigen::VectorXd a_phi = lap.areas.cwiseProduct(phi.col(c));
    res[c] = (lap.W * phi.col(c) - lambda[c] * a_phi).norm() / a_phi.norm();
  }
  return res;
}

SpectralEmbedding finalize_embedding(Eigen::MatrixXd phi, Eigen::VectorXd lambda) {
  double scale = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  for (int c = 0; c < lambda.size(); ++c)
    if (lambda[c] < 0.0 && lambda[c] > -1e-9 * scale) lambda[c] = 0.0;
  sign_normalize_columns(phi);
  SpectralEmbedding emb;
  emb.phi = std::move(phi);
  emb.lambda = std::move(lambda);
  emb.K = int(emb.lambda.size());
  return emb;
}

SpectralEmbedding lb_eigs_dense(const LaplacianPair& lap, int K) {
  const Eigen::VectorXd inv_sqrt = lap.areas.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B = inv_sqrt.asDiagonal() * Eigen::MatrixXd(lap.W) * inv_sqrt.asDiagonal();
  // Symmetrize against assembly roundoff before the dense solve.
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed", 0);
  Eigen::MatrixXd phi = inv_sqrt.asDiagonal() * es.eigenvectors().leftCols(K);
  return finalize_embedding(phi, es.eigenvalues().head(K));
}

class ShiftInvertOp {
 public:
  ShiftInvertOp(const Eigen::SparseMatrix<double>& B, double delta) {
    Eigen::SparseMatrix<double> ident(B.rows(), B.cols());
    ident.setIdentity();
    Eigen::SparseMatrix<double> shifted = B + delta * ident;
    solver_.compute(shifted);
    ok_ = solver_.info() == Eigen::Success;
  }
  bool ok() const { return ok_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return solver_.solve(x); }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool ok_ = false;
};

// Shift-invert Lanczos with full reorthogonalization on the mass-normalized
// operator. Finds the K smallest eigenpairs; multiplets emerge from the
// reorthogonalized iteration given enough steps, and the explicit pencil
// residual check below is the arbiter of convergence.
SpectralEmbedding lb_eigs_lanczos(const LaplacianPair& lap, int K, const EigsOptions& opts) {
  const int n = int(lap.W.rows());
  const Eigen::VectorXd inv_sqrt = lap.areas.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> B = inv_sqrt.asDiagonal() * lap.W * inv_sqrt.asDiagonal();

  double mean_diag = B.diagonal().mean();
  double delta = std::max(1e-8 * mean_diag, 1e-300);
  std::unique_ptr<ShiftInvertOp> op;
  for (int attempt = 0; attempt < 4; ++attempt) {
    op = std::make_unique<ShiftInvertOp>(B, delta);
    if (op->ok()) break;
    delta *= 1e3;
  }
  if (!op->ok()) throw ConvergenceFailure("shift factorization failed", 0);

  const int m_max = std::min(n, opts.max_lanczos_dim > 0 ? opts.max_lanczos_dim
                                                         : std::max(3 * K + 50, 120));
  const int buffer = std::min(8, std::max(2, K / 20));
  Eigen::MatrixXd V(n, m_max);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_max);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_max);

  Rng rng(0xD17EC7ULL ^ (std::uint64_t(n) << 20) ^ std::uint64_t(K));
  auto fresh_direction = [&](int j) {
    Eigen::VectorXd v(n);
    for (int r = 0; r < n; ++r) v[r] = rng.gaussian();
    if (j > 0) {
      v -= V.leftCols(j) * (V.leftCols(j).transpose() * v).eval();
      v -= V.leftCols(j) * (V.leftCols(j).transpose() * v).eval();
    }
    return (v / v.norm()).eval();
  };
  V.col(0) = fresh_direction(0);

  double inner_tol = 1e-9;
  int j = 0;
  while (true) {
    int batch_end = std::min(m_max, std::max(j + std::max(40, j / 4), K + buffer + 2));
    for (; j < batch_end; ++j) {
      Eigen::VectorXd w = op->apply(V.col(j));
      alpha[j] = V.col(j).dot(w);
      if (j + 1 >= m_max) break;
      double w_scale = w.norm();
      w -= alpha[j] * V.col(j);
      if (j > 0) w -= beta[j - 1] * V.col(j - 1);
      // two-pass full reorthogonalization
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w).eval();
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w).eval();
      double b = w.norm();
      if (b <= 1e-12 * std::max(w_scale, 1e-300)) {
        beta[j] = 0.0;
        V.col(j + 1) = fresh_direction(j + 1);
      } else {
        beta[j] = b;
        V.col(j + 1) = w / b;
      }
    }
    int dim = std::min(j + 1, m_max);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(alpha.head(dim), beta.head(dim - 1));
    if (tri.info() != Eigen::Success) throw ConvergenceFailure("tridiagonal solve failed", 0);

    // Ritz values ascending; the largest correspond to the smallest lambda.
    int wanted = std::min(dim, K + buffer);
    double theta_max = tri.eigenvalues()(dim - 1);
    bool inner_ok = dim >= K;
    double last_beta = dim >= 2 ? beta[dim - 2] : 0.0;
    for (int r = 0; r < wanted && inner_ok; ++r) {
      int col = dim - 1 - r;
      double bound = std::abs(last_beta * tri.eigenvectors()(dim - 1, col));
      if (bound > inner_tol * std::max(std::abs(theta_max), 1e-300)) inner_ok = false;
    }

    if (inner_ok || dim >= m_max) {
      int take = std::min(dim, K);
      // columns in descending theta order = ascending lambda
      Eigen::MatrixXd S = tri.eigenvectors().rightCols(take).rowwise().reverse();
      Eigen::MatrixXd ritz = V.leftCols(dim) * S;

      // Rayleigh-Ritz polish in B to refine clustered pairs.
      Eigen::MatrixXd BY = B * ritz;
      Eigen::MatrixXd H = ritz.transpose() * BY;
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(H);
      Eigen::MatrixXd Y = ritz * small.eigenvectors();
      Eigen::VectorXd lambda = small.eigenvalues();

      Eigen::MatrixXd phi = inv_sqrt.asDiagonal() * Y;
      Eigen::VectorXd res = pencil_residuals(lap, phi, lambda);
      int converged = 0;
      for (int c = 0; c < res.size(); ++c)
        if (res[c] <= opts.residual_tol) ++converged;
      if (converged == K && take == K) return finalize_embedding(phi, lambda);
      if (dim >= m_max)
        throw ConvergenceFailure("eigensolver converged " + std::to_string(converged) + " of " +
                                     std::to_string(K) + " pairs within the iteration budget",
                                 converged);
      inner_tol = std::max(inner_tol * 1e-2, 1e-15);
    }
  }
}

}  // namespace

SpectralEmbedding lb_eigs(const LaplacianPair& lap, int K, const EigsOptions& opts) {
  const int n = int(lap.W.rows());
  if (K < 1) throw Error("K must be positive");
  if (K >= n) throw Error("K must be smaller than the vertex count");
  if (K > n / 10)
    std::cerr << "[dirmatch] warning: K = " << K << " is large for n = " << n
              << " (guideline K <= n/10); nodal domains may be under-resolved\n";
  if (n <= opts.dense_threshold) return lb_eigs_dense(lap, K);
  return lb_eigs_lanczos(lap, K, opts);
}

std::uint64_t embedding_cache_key(const TriangleMesh& mesh, int K) {
  std::uint64_t h = fnv1a64(mesh.vertices.data(), sizeof(double) * mesh.vertices.size());
  h = fnv1a64(mesh.faces.data(), sizeof(int) * mesh.faces.size(), h);
  std::int64_t k64 = K;
  return fnv1a64(&k64, sizeof(k64), h);
}

namespace {
constexpr char kMagic[8] = {'D', 'I', 'R', 'M', 'E', 'I', 'G', '1'};
}

void save_embedding(const std::string& path, const SpectralEmbedding& emb, std::uint64_t key) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out.write(kMagic, 8);
  std::int64_t n = emb.phi.rows(), K = emb.K;
  out.write(reinterpret_cast<const char*>(&key), 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&K), 8);
  out.write(reinterpret_cast<const char*>(emb.lambda.data()), std::streamsize(8 * K));
  // row-major payload so the file layout is independent of Eigen's default
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = emb.phi;
  out.write(reinterpret_cast<const char*>(rm.data()), std::streamsize(8 * n * K));
}

bool load_embedding(const std::string& path, std::uint64_t key, SpectralEmbedding& out_emb) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint64_t file_key = 0;
  std::int64_t n = 0, K = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&file_key), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&K), 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0 || file_key != key) return false;
  Eigen::VectorXd lambda(K);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, K);
  in.read(reinterpret_cast<char*>(lambda.data()), std::streamsize(8 * K));
  in.read(reinterpret_cast<char*>(rm.data()), std::streamsize(8 * n * K));
  if (!in) return false;
  out_emb.phi = rm;
  out_emb.lambda = std::move(lambda);
  out_emb.K = int(K);
  return true;
}

void save_embedding_csv(const std::string& path, const SpectralEmbedding& emb) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << emb.phi.rows() << "," << emb.K << "\n";
  for (int c = 0; c < emb.K; ++c) out << (c ? "," : "") << emb.lambda[c];
  out << "\n";
  for (int r = 0; r < emb.phi.rows(); ++r) {
    for (int c = 0; c < emb.K; ++c) out << (c ? "," : "") << emb.phi(r, c);
    out << "\n";
  }
}

}  // namespace dirmatch
