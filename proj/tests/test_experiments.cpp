#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dirmatch/errors.hpp"
#include "dirmatch/experiments.hpp"

using namespace dirmatch;

namespace {
double factorial(int n) { return std::tgamma(double(n) + 1.0); }
}  // namespace

TEST_CASE("involution probability matches exhaustive counting") {
  for (int n2 = 1; n2 <= 10; ++n2) {
    double expected = double(count_involutions_bruteforce(n2)) / factorial(n2);
    CHECK(involution_probability(n2) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("small involution values are exact") {
  CHECK(involution_probability(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(involution_probability(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(count_involutions_bruteforce(2) == 2);
  CHECK(count_involutions_bruteforce(4) == 10);
  CHECK(count_involutions_bruteforce(6) == 76);
  CHECK(involution_probability(6) == doctest::Approx(76.0 / 720.0).epsilon(1e-12));
}

TEST_CASE("eta decreases strictly for n2 >= 2") {
  double prev = involution_probability(2);
  for (int n2 = 3; n2 <= 40; ++n2) {
    double cur = involution_probability(n2);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("enumeration is budgeted") {
  CHECK_THROWS_AS(count_involutions_bruteforce(11), BudgetExceeded);
  CHECK_THROWS_AS(involution_probability(0), Error);
}

TEST_CASE("uncorrupted and identity-corrupted trials recover exactly") {
  PerturbationParams params;
  params.k = 12;
  params.n = 200;
  params.n2 = 0;
  params.trials = 8;
  params.seed = 5;
  PerturbationStats clean = perturbation_experiment(params);
  for (double e : clean.samples) CHECK(e <= 1e-10);

  params.n2 = 60;
  params.identity_sigma = true;
  PerturbationStats degenerate = perturbation_experiment(params);
  for (double e : degenerate.samples) CHECK(e <= 1e-10);
}

TEST_CASE("median error grows with the corrupted row count") {
  PerturbationParams params;
  params.k = 20;
  params.n = 800;
  params.trials = 20;
  params.seed = 11;
  double prev = -1.0;
  for (int n2 : {40, 160, 400, 640}) {
    params.n2 = n2;
    PerturbationStats stats = perturbation_experiment(params);
    CHECK(stats.median > prev);
    prev = stats.median;
    for (double e : stats.samples) {
      CHECK(e >= 0.0);
      CHECK(e <= 2.0);
    }
    CHECK(stats.min <= stats.q1);
    CHECK(stats.q1 <= stats.median);
    CHECK(stats.median <= stats.q3);
    CHECK(stats.q3 <= stats.max);
  }
}

TEST_CASE("seeded runs are bit reproducible") {
  PerturbationParams params;
  params.k = 10;
  params.n = 300;
  params.n2 = 100;
  params.trials = 10;
  params.seed = 42;
  PerturbationStats a = perturbation_experiment(params);
  PerturbationStats b = perturbation_experiment(params);
  CHECK(a.samples == b.samples);
  params.seed = 43;
  PerturbationStats c = perturbation_experiment(params);
  CHECK(a.samples != c.samples);
}

TEST_CASE("experiment accepts a provided basis") {
  Eigen::MatrixXd basis = synthetic_orthonormal(100, 8, 3);
  PerturbationParams params;
  params.k = 8;
  params.n = 100;
  params.n2 = 0;
  params.trials = 3;
  PerturbationStats stats = perturbation_experiment(params, basis);
  for (double e : stats.samples) CHECK(e <= 1e-10);
  params.n = 101;
  CHECK_THROWS_AS(perturbation_experiment(params, basis), DimensionMismatch);
}

TEST_CASE("csv export lists trials and a summary block") {
  PerturbationParams params;
  params.k = 6;
  params.n = 80;
  params.n2 = 20;
  params.trials = 4;
  PerturbationStats stats = perturbation_experiment(params);
  auto path = (std::filesystem::temp_directory_path() / "dirmatch_thm1.csv").string();
  save_perturbation_csv(path, {stats});
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  bool summary = false;
  while (std::getline(in, line)) {
    if (line.rfind("summary,", 0) == 0 && line.find("min") == std::string::npos) summary = true;
    ++rows;
  }
  CHECK(rows == 1 + 4 + 1 + 1);  // header, trials, summary header, summary row
  CHECK(summary);
}
