#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dirmatch/errors.hpp"
#include "dirmatch/eval.hpp"
#include "dirmatch/geodesics.hpp"
#include "support/testshapes.hpp"

using namespace dirmatch;
namespace ts = dirmatch::testshapes;

namespace {
Correspondence identity_map(int n) {
  Correspondence corr;
  corr.map.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) corr.map[std::size_t(i)] = i;
  return corr;
}
}  // namespace

TEST_CASE("perfect maps give a full curve and auc 0.25") {
  TriangleMesh sphere = ts::icosphere(2);
  Correspondence gt = identity_map(sphere.n_vertices());
  ErrorCurve curve = geodesic_error(gt, gt, sphere);
  CHECK(curve.per_point.maxCoeff() == 0.0);
  CHECK(curve.fractions.minCoeff() == 1.0);
  CHECK(curve.auc == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("collapse-to-one-vertex errors match the distance field oracle") {
  TriangleMesh sphere = ts::icosphere(2);
  const int v = 11;
  const int n = sphere.n_vertices();
  Correspondence collapsed;
  collapsed.map.assign(std::size_t(n), v);
  Correspondence gt = identity_map(n);
  ErrorCurve curve = geodesic_error(collapsed, gt, sphere);
  DistanceField oracle = multi_source_distances(sphere, {v});
  double diam = estimate_diameter(sphere);
  for (int i = 0; i < n; ++i)
    CHECK(curve.per_point[i] == doctest::Approx(oracle.distances[i] / diam).epsilon(1e-12));
}

TEST_CASE("unmatched points never pass a threshold") {
  TriangleMesh torus = ts::torus_mesh(10, 8);
  const int n = torus.n_vertices();
  Correspondence half = identity_map(n);
  for (int i = 0; i < n; i += 2) half.map[std::size_t(i)] = kUnmatched;
  ErrorCurve curve = geodesic_error(half, identity_map(n), torus);
  CHECK(curve.fractions.maxCoeff() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(!std::isfinite(curve.per_point[0]));
}

TEST_CASE("length mismatch is rejected") {
  TriangleMesh torus = ts::torus_mesh(8, 6);
  Correspondence good = identity_map(torus.n_vertices());
  Correspondence bad = identity_map(torus.n_vertices() - 1);
  CHECK_THROWS_AS(geodesic_error(good, bad, torus), LengthMismatch);
}

TEST_CASE("swapping the computed and true maps gives identical errors") {
  TriangleMesh sphere = ts::bumpy_sphere(2);
  const int n = sphere.n_vertices();
  Correspondence gt = identity_map(n);
  Correspondence noisy = identity_map(n);
  for (int i = 0; i < n; i += 3) noisy.map[std::size_t(i)] = (i * 7 + 13) % n;
  ErrorCurve ab = geodesic_error(noisy, gt, sphere);
  ErrorCurve ba = geodesic_error(gt, noisy, sphere);
  CHECK(ab.per_point == ba.per_point);
}

TEST_CASE("curves are invariant under rigid motion of the target") {
  TriangleMesh mesh = ts::bumpy_sphere(2);
  const int n = mesh.n_vertices();
  Correspondence gt = identity_map(n);
  Correspondence noisy = identity_map(n);
  for (int i = 0; i < n; i += 4) noisy.map[std::size_t(i)] = (i * 5 + 2) % n;
  ErrorCurve a = geodesic_error(noisy, gt, mesh);
  ErrorCurve b = geodesic_error(noisy, gt, ts::rigidly_moved(mesh));
  CHECK((a.per_point - b.per_point).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(a.fractions == b.fractions);
}

TEST_CASE("fractions equal an independent re-binning of the per-point errors") {
  TriangleMesh torus = ts::bumpy_torus(10, 8);
  const int n = torus.n_vertices();
  Correspondence gt = identity_map(n);
  Correspondence noisy = identity_map(n);
  for (int i = 0; i < n; i += 2) noisy.map[std::size_t(i)] = (i + 9) % n;
  ErrorCurve curve = geodesic_error(noisy, gt, torus);
  for (int g = 0; g < curve.thresholds.size(); ++g) {
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (curve.per_point[i] <= curve.thresholds[g]) ++count;
    CHECK(curve.fractions[g] == double(count) / double(n));
  }
  // fractions are monotone and inside [0, 1]
  for (int g = 1; g < curve.fractions.size(); ++g)
    CHECK(curve.fractions[g] >= curve.fractions[g - 1]);
  CHECK(curve.fractions.minCoeff() >= 0.0);
  CHECK(curve.fractions.maxCoeff() <= 1.0);
}
