#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dirmatch/errors.hpp"
#include "dirmatch/local_mesh.hpp"
#include "dirmatch/mesh.hpp"
#include "dirmatch/mesh_io.hpp"
#include "support/testshapes.hpp"

using namespace dirmatch;
namespace ts = dirmatch::testshapes;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "dirmatch_geom_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("load OFF tetrahedron") {
  fs::path path = temp_dir() / "tetra.off";
  {
    std::ofstream out(path);
    out << "OFF\n4 4 0\n";
    out << "0 0 0\n1 0 0\n0 1 0\n0 0 1\n";
    out << "3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
  }
  LoadedShape shape = load_shape(path.string(), ShapeFormat::OFF);
  REQUIRE(std::holds_alternative<TriangleMesh>(shape));
  const auto& mesh = std::get<TriangleMesh>(shape);
  CHECK(mesh.n_vertices() == 4);
  CHECK(mesh.n_faces() == 4);
  CHECK(mesh.vertices(1, 0) == 1.0);  // vertex order preserved
}

TEST_CASE("load XYZ cloud") {
  fs::path path = temp_dir() / "cloud.xyz";
  {
    std::ofstream out(path);
    for (int i = 0; i < 100; ++i) out << i << " " << 2 * i << " " << 0.5 * i << "\n";
  }
  LoadedShape shape = load_shape(path.string());
  REQUIRE(std::holds_alternative<PointCloud>(shape));
  CHECK(std::get<PointCloud>(shape).n_points() == 100);
}

TEST_CASE("face index out of range is a parse error") {
  fs::path path = temp_dir() / "bad.off";
  {
    std::ofstream out(path);
    out << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n";  // index 3 == n
  }
  CHECK_THROWS_AS(load_shape(path.string()), ParseError);
}

TEST_CASE("degenerate faces are rejected") {
  fs::path path = temp_dir() / "degen.off";
  {
    std::ofstream out(path);
    out << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n";  // repeated index
  }
  CHECK_THROWS_AS(load_shape(path.string()), DegenerateGeometry);

  // geometrically zero area
  Eigen::MatrixX3d V(3, 3);
  V << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  Eigen::MatrixX3i F(1, 3);
  F << 0, 1, 2;
  CHECK_THROWS_AS(make_mesh(V, F), DegenerateGeometry);
}

TEST_CASE("isolated vertices rejected or pruned per options") {
  Eigen::MatrixX3d V(4, 3);
  V << 0, 0, 0, 1, 0, 0, 0, 1, 0, 9, 9, 9;
  Eigen::MatrixX3i F(1, 3);
  F << 0, 1, 2;
  CHECK_THROWS_AS(make_mesh(V, F), DegenerateGeometry);
  MeshOptions opts;
  opts.prune_isolated = true;
  TriangleMesh pruned = make_mesh(V, F, opts);
  CHECK(pruned.n_vertices() == 3);
  CHECK(pruned.vertices(2, 1) == 1.0);  // remaining order preserved
}

TEST_CASE("vertex areas: unit right triangle") {
  TriangleMesh tri = ts::single_triangle();
  Eigen::VectorXd areas = vertex_areas(tri);
  for (int i = 0; i < 3; ++i) CHECK(areas[i] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("vertex areas: regular tetrahedron") {
  TriangleMesh tet = ts::regular_tetrahedron(1.0);
  Eigen::VectorXd areas = vertex_areas(tet);
  const double expected = std::sqrt(3.0) / 4.0;  // 4 faces, each sqrt(3)/4, split 3 ways x3
  for (int i = 0; i < 4; ++i) CHECK(areas[i] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("vertex areas scale quadratically and sum to total area") {
  for (const TriangleMesh& mesh : {ts::torus_mesh(12, 10), ts::icosphere(2), ts::grid_mesh(5, 4)}) {
    Eigen::VectorXd areas = vertex_areas(mesh);
    CHECK((areas.array() > 0).all());
    CHECK(areas.sum() == doctest::Approx(total_area(mesh)).epsilon(1e-10));
    TriangleMesh big = ts::scaled(mesh, 3.0);
    Eigen::VectorXd big_areas = vertex_areas(big);
    for (int i = 0; i < areas.size(); ++i)
      CHECK(big_areas[i] == doctest::Approx(9.0 * areas[i]).epsilon(1e-12));
  }
}

TEST_CASE("ring neighborhood on the tetrahedron") {
  TriangleMesh tet = ts::regular_tetrahedron();
  std::vector<int> ring = ring_neighborhood(tet, 0, 1);
  CHECK(ring == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(ring_neighborhood(tet, 4, 1), IndexOutOfRange);
  CHECK_THROWS_AS(ring_neighborhood(tet, 0, 0), IndexOutOfRange);
}

TEST_CASE("ring depth 2 equals the 1-ring plus its 1-rings") {
  TriangleMesh strip = ts::strip_mesh(8);
  int center = 4;
  std::vector<int> two_ring = ring_neighborhood(strip, center, 2);
  std::set<int> expected;
  for (int u : ring_neighborhood(strip, center, 1)) {
    expected.insert(u);
    for (int v : ring_neighborhood(strip, u, 1))
      if (v != center) expected.insert(v);
  }
  CHECK(two_ring == std::vector<int>(expected.begin(), expected.end()));
}

TEST_CASE("ring neighborhoods are monotone in depth") {
  TriangleMesh torus = ts::torus_mesh(14, 10);
  for (int i : {0, 7, 33, 91, 139}) {
    std::vector<int> prev;
    for (int depth = 1; depth <= 4; ++depth) {
      std::vector<int> cur = ring_neighborhood(torus, i, depth);
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = std::move(cur);
    }
  }
}

TEST_CASE("mesh save/load round trip is exact") {
  TriangleMesh mesh = ts::bumpy_torus(8, 6);
  for (ShapeFormat fmt : {ShapeFormat::OFF, ShapeFormat::OBJ, ShapeFormat::PLY}) {
    fs::path path = temp_dir() / (std::string("roundtrip.") +
                                  (fmt == ShapeFormat::OFF   ? "off"
                                   : fmt == ShapeFormat::OBJ ? "obj"
                                                             : "ply"));
    save_mesh(path.string(), mesh, fmt);
    LoadedShape shape = load_shape(path.string());
    const auto& re = std::get<TriangleMesh>(shape);
    CHECK(re.vertices == mesh.vertices);
    CHECK(re.faces == mesh.faces);
  }
  PointCloud cloud = ts::fibonacci_sphere_cloud(40);
  fs::path path = temp_dir() / "roundtrip.xyz";
  save_point_cloud(path.string(), cloud);
  CHECK(std::get<PointCloud>(load_shape(path.string())).points == cloud.points);
}

TEST_CASE("local mesh on a planar grid contains the center and is planar") {
  PointCloud cloud = ts::planar_grid_cloud(8, 8);
  int center = 3 * 8 + 4;
  LocalMesh lm = build_local_mesh(cloud, center, 8);
  CHECK(lm.cloud_indices[lm.center_local] == center);
  CHECK(lm.mesh.n_faces() >= 6);
  // center should be interior: its ring has at least 4 members
  CHECK(lm.mesh.vertex_ring[lm.center_local].size() >= 4);
  for (int t = 0; t < lm.mesh.n_faces(); ++t) {
    for (int c = 0; c < 3; ++c) CHECK(lm.mesh.vertices(lm.mesh.faces(t, c), 2) == 0.0);
  }
}

TEST_CASE("local mesh edges on a sphere stay close to ambient chords") {
  PointCloud cloud = ts::fibonacci_sphere_cloud(400);
  for (int i : {0, 57, 200, 399}) {
    LocalMesh lm = build_local_mesh(cloud, i, 8);
    // projected (tangent-plane) edge length vs ambient chord, within 5%
    for (int v = 0; v < lm.mesh.n_vertices(); ++v) {
      for (const auto& [w, len3d] : lm.mesh.edge_adj[v]) {
        if (w < v) continue;
        Eigen::Vector3d a = cloud.points.row(lm.cloud_indices[v]);
        Eigen::Vector3d b = cloud.points.row(lm.cloud_indices[w]);
        double chord = (a - b).norm();
        CHECK(len3d == doctest::Approx(chord).epsilon(1e-12));
        CHECK(std::abs(len3d - chord) <= 0.05 * chord);
      }
    }
  }
}

TEST_CASE("coincident neighbors raise DegenerateNeighborhood") {
  PointCloud cloud = ts::planar_grid_cloud(4, 4, 1.0);
  cloud.points.row(5) = cloud.points.row(6);
  cloud.points.row(9) = cloud.points.row(6);
  CHECK_THROWS_AS(build_local_mesh(cloud, 6, 8), DegenerateNeighborhood);
}

TEST_CASE("collinear neighborhood raises DegenerateNeighborhood") {
  PointCloud cloud;
  cloud.points.resize(10, 3);
  for (int i = 0; i < 10; ++i) cloud.points.row(i) << double(i), 0.0, 0.0;
  CHECK_THROWS_AS(build_local_mesh(cloud, 4, 6), DegenerateNeighborhood);
}

TEST_CASE("cloud union mesh references every point") {
  PointCloud cloud = ts::fibonacci_sphere_cloud(120);
  TriangleMesh mesh = cloud_union_mesh(cloud, 8);
  CHECK(mesh.n_vertices() == 120);
  for (int i = 0; i < mesh.n_vertices(); ++i) CHECK(!mesh.vertex_ring[i].empty());
}
