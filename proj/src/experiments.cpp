#include "dirmatch/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dirmatch/errors.hpp"
#include "dirmatch/fmap.hpp"
#include "dirmatch/rng.hpp"

namespace dirmatch {

double involution_probability(int n2) {
  if (n2 < 1) throw Error("n2 must be >= 1");
  double eta = 0.0;
  for (int j = 0; j <= n2 / 2; ++j) {
    double log_term = -(double(j) * std::log(2.0) + std::lgamma(double(j) + 1.0) +
                        std::lgamma(double(n2 - 2 * j) + 1.0));
    eta += std::exp(log_term);
  }
  return eta;
}

std::int64_t count_involutions_bruteforce(int n2) {
  if (n2 < 1) throw Error("n2 must be >= 1");
  if (n2 > 10) throw BudgetExceeded("enumeration limited to n2 <= 10");
  std::vector<int> perm(n2);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t count = 0;
  do {
    bool involution = true;
    for (int i = 0; i < n2 && involution; ++i) involution = perm[perm[i]] == i;
    if (involution) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

Eigen::MatrixXd synthetic_orthonormal(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd G(n, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < n; ++r) G(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  return Q;
}

namespace {

Eigen::MatrixXd random_orthonormal_square(int k, Rng& rng) {
  Eigen::MatrixXd G(k, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < k; ++r) G(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  return qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
}

double spectral_norm(const Eigen::MatrixXd& M) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues()(0);
}

void fill_quartiles(PerturbationStats& stats) {
  std::vector<double> sorted = stats.samples;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * double(sorted.size() - 1);
    std::size_t lo = std::size_t(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  stats.min = sorted.empty() ? 0.0 : sorted.front();
  stats.max = sorted.empty() ? 0.0 : sorted.back();
  stats.q1 = quantile(0.25);
  stats.median = quantile(0.5);
  stats.q3 = quantile(0.75);
}

}  // namespace

PerturbationStats perturbation_experiment(const PerturbationParams& params,
                                          const Eigen::MatrixXd& basis) {
  if (params.k < 1 || params.n < params.k) throw Error("need n >= k >= 1");
  if (params.n2 < 0 || params.n2 > params.n) throw Error("need 0 <= n2 <= n");
  if (params.trials < 0) throw Error("trials must be nonnegative");

  Eigen::MatrixXd phi1;
  if (basis.size() == 0) {
    phi1 = synthetic_orthonormal(params.n, params.k, params.seed ^ 0xBA5E5ULL);
  } else {
    if (basis.rows() < params.n || basis.cols() < params.k)
      throw DimensionMismatch("provided basis is smaller than (n, k)");
    phi1 = basis.topLeftCorner(params.n, params.k);
  }

  PerturbationStats stats;
  stats.params = params;
  stats.samples.reserve(params.trials);
  Rng rng(params.seed);
  for (int t = 0; t < params.trials; ++t) {
    Eigen::MatrixXd c_true = random_orthonormal_square(params.k, rng);
    Eigen::MatrixXd phi2 = phi1 * c_true;

    if (params.n2 > 0 && !params.identity_sigma) {
      std::vector<int> subset = rng.sample_without_replacement(params.n, params.n2);
      std::vector<int> sigma(subset.size());
      std::iota(sigma.begin(), sigma.end(), 0);
      rng.shuffle(sigma);
      Eigen::MatrixXd shuffled(params.n2, params.k);
      for (int r = 0; r < params.n2; ++r) shuffled.row(r) = phi2.row(subset[std::size_t(sigma[r])]);
      for (int r = 0; r < params.n2; ++r) phi2.row(subset[std::size_t(r)]) = shuffled.row(r);
    }

    Eigen::MatrixXd corr = phi1.transpose() * phi2;
    FunctionalMap fit = procrustes_from_correlation(corr);
    // both factors are orthonormal, so the norm lives in [0, 2]; trim roundoff
    stats.samples.push_back(std::clamp(spectral_norm(fit.C - c_true), 0.0, 2.0));
  }
  fill_quartiles(stats);
  return stats;
}

void save_perturbation_csv(const std::string& path, const std::vector<PerturbationStats>& runs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "trial,k,n,n2,error\n";
  for (const auto& run : runs)
    for (std::size_t t = 0; t < run.samples.size(); ++t)
      out << t << "," << run.params.k << "," << run.params.n << "," << run.params.n2 << ","
          << run.samples[t] << "\n";
  out << "summary,k,n,n2,min,q1,median,q3,max\n";
  for (const auto& run : runs)
    out << "summary," << run.params.k << "," << run.params.n << "," << run.params.n2 << ","
        << run.min << "," << run.q1 << "," << run.median << "," << run.q3 << "," << run.max
        << "\n";
}

}  // namespace dirmatch
