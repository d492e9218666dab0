#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace dirmatch {

/// Probability that a uniformly random permutation of n2 elements is an
/// involution: sum_{j=0}^{floor(n2/2)} 1 / (2^j j! (n2-2j)!).
/// Evaluated with log-domain factorials so large n2 stays finite.
double involution_probability(int n2);

/// Exhaustive enumeration; throws BudgetExceeded for n2 > 10.
std::int64_t count_involutions_bruteforce(int n2);

struct PerturbationParams {
  int k = 50;           // spectral dimension
  int n = 5000;         // rows of the synthetic embedding
  int n2 = 0;           // corrupted row count
  int trials = 50;
  std::uint64_t seed = 0;
  bool identity_sigma = false;  // degenerate control: permute with identity
};

/// Alignment-error statistics under correspondence corruption: per trial a
/// random orthonormal ground-truth map is planted, a random permutation is
/// applied to a random n2-subset of rows, and the orthonormal Procrustes fit
/// over all rows is compared to the planted map in spectral norm.
struct PerturbationStats {
  PerturbationParams params;
  std::vector<double> samples;  // one spectral-norm error per trial
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Synthetic embedding: orthonormal columns from the QR of a seeded Gaussian.
Eigen::MatrixXd synthetic_orthonormal(int n, int k, std::uint64_t seed);

/// Runs the experiment on a provided basis (must have orthonormal columns and
/// at least params.k columns) or on a synthetic one when basis is empty.
PerturbationStats perturbation_experiment(const PerturbationParams& params,
                                          const Eigen::MatrixXd& basis = Eigen::MatrixXd());

/// CSV: one row per trial (trial, k, n, n2, error) then a summary block.
void save_perturbation_csv(const std::string& path, const std::vector<PerturbationStats>& runs);

}  // namespace dirmatch
