// Python bindings for the core operations. Meshes and fields cross the
// boundary as numpy arrays; heavier state (meshes, embeddings) stays in
// opaque handle classes.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirmatch/descriptors.hpp"
#include "dirmatch/errors.hpp"
#include "dirmatch/dir.hpp"
#include "dirmatch/eval.hpp"
#include "dirmatch/experiments.hpp"
#include "dirmatch/fmap.hpp"
#include "dirmatch/geodesics.hpp"
#include "dirmatch/lmd.hpp"
#include "dirmatch/local_mesh.hpp"
#include "dirmatch/mesh_io.hpp"
#include "dirmatch/parallel.hpp"
#include "dirmatch/pipeline.hpp"
#include "dirmatch/spectral.hpp"

namespace py = pybind11;
using namespace dirmatch;

namespace {

Correspondence correspondence_from(const std::vector<int>& map) {
  Correspondence corr;
  corr.map = map;
  return corr;
}

AnchorSet anchors_from(const std::vector<std::pair<int, int>>& pairs,
                       const std::vector<bool>& fixed) {
  AnchorSet set;
  set.pairs = pairs;
  if (fixed.empty()) {
    set.fixed_mask.assign(pairs.size(), 0);
  } else {
    if (fixed.size() != pairs.size())
      throw LengthMismatch("fixed mask length does not match the pair list");
    for (bool f : fixed) set.fixed_mask.push_back(f ? 1 : 0);
  }
  return set;
}

DirInit init_from(const std::optional<std::vector<int>>& initial_map,
                  const std::vector<std::pair<int, int>>& landmarks) {
  DirInit init;
  if (initial_map) init.initial_map = correspondence_from(*initial_map);
  init.landmarks = make_fixed_anchors(landmarks);
  return init;
}

py::dict trace_to_dict(const IterationTrace& trace) {
  py::list records;
  for (const auto& r : trace.records) {
    py::dict d;
    d["iteration"] = r.iteration;
    d["anchor_count"] = r.anchor_count;
    d["spectral_dim"] = r.spectral_dim;
    d["threshold"] = r.threshold;
    d["lmd_median"] = r.lmd_median;
    d["seconds"] = r.seconds;
    records.append(d);
  }
  py::dict out;
  out["records"] = records;
  out["warnings"] = trace.warnings;
  return out;
}

DirConfig config_from_kwargs(int max_iters, std::vector<double> thresholds, int K, int ring_depth,
                             const std::string& mode, int gds_anchor_cap, bool post_prune) {
  DirConfig cfg;
  cfg.max_iters = max_iters;
  if (!thresholds.empty()) cfg.lmd_thresholds = std::move(thresholds);
  cfg.K = K;
  cfg.ring_depth = ring_depth;
  cfg.mode = mode == "gds" ? DirMode::GDS : DirMode::SPECTRAL;
  cfg.gds_anchor_cap = gds_anchor_cap;
  cfg.post_prune = post_prune;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_dirmatch, m) {
  m.doc() = "Dense shape correspondence via dual iterative refinement";

  py::register_exception<Error>(m, "DirmatchError");

  py::class_<TriangleMesh>(m, "TriangleMesh")
      .def(py::init([](const Eigen::MatrixX3d& V, const Eigen::MatrixX3i& F) {
             return make_mesh(V, F);
           }),
           py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices",
                             [](const TriangleMesh& mesh) { return mesh.vertices; })
      .def_property_readonly("faces", [](const TriangleMesh& mesh) { return mesh.faces; })
      .def("n_vertices", &TriangleMesh::n_vertices)
      .def("n_faces", &TriangleMesh::n_faces)
      .def("bounding_box_diagonal", &TriangleMesh::bounding_box_diagonal);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const Eigen::MatrixX3d& P) {
             PointCloud cloud;
             cloud.points = P;
             return cloud;
           }),
           py::arg("points"))
      .def_property_readonly("points", [](const PointCloud& c) { return c.points; })
      .def("n_points", &PointCloud::n_points);

  py::class_<SpectralEmbedding>(m, "SpectralEmbedding")
      .def_property_readonly("phi", [](const SpectralEmbedding& e) { return e.phi; })
      .def_property_readonly("eigenvalues", [](const SpectralEmbedding& e) { return e.lambda; })
      .def_readonly("K", &SpectralEmbedding::K);

  m.def("set_threads", &set_thread_cap, py::arg("threads"),
        "Cap worker threads (0 = hardware concurrency)");

  m.def(
      "load_shape",
      [](const std::string& path) -> py::object {
        LoadedShape shape = load_shape(path);
        if (std::holds_alternative<TriangleMesh>(shape))
          return py::cast(std::get<TriangleMesh>(shape));
        return py::cast(std::get<PointCloud>(shape));
      },
      py::arg("path"));
  m.def(
      "save_shape",
      [](const std::string& path, const TriangleMesh& mesh) {
        save_mesh(path, mesh, format_from_path(path));
      },
      py::arg("path"), py::arg("mesh"));

  m.def("vertex_areas", &vertex_areas, py::arg("mesh"));
  m.def("ring_neighborhood", &ring_neighborhood, py::arg("mesh"), py::arg("vertex"),
        py::arg("depth"));
  m.def(
      "build_local_mesh",
      [](const PointCloud& cloud, int i, int k_local) {
        LocalMesh lm = build_local_mesh(cloud, i, k_local);
        return py::make_tuple(lm.mesh, lm.cloud_indices);
      },
      py::arg("cloud"), py::arg("index"), py::arg("k_local"));
  m.def("cloud_union_mesh", &cloud_union_mesh, py::arg("cloud"), py::arg("k_local") = 12);

  m.def(
      "cotan_laplacian",
      [](const TriangleMesh& mesh) {
        LaplacianPair lap = cotan_laplacian(mesh);
        const auto& W = lap.W;
        std::vector<int> rows, cols;
        std::vector<double> vals;
        rows.reserve(W.nonZeros());
        cols.reserve(W.nonZeros());
        vals.reserve(W.nonZeros());
        for (int c = 0; c < W.outerSize(); ++c)
          for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it) {
            rows.push_back(int(it.row()));
            cols.push_back(int(it.col()));
            vals.push_back(it.value());
          }
        return py::make_tuple(rows, cols, vals, lap.areas);
      },
      py::arg("mesh"),
      "Stiffness matrix as COO triplets (rows, cols, values) plus the mass diagonal");

  m.def(
      "lb_eigs",
      [](const TriangleMesh& mesh, int K) { return lb_eigs(cotan_laplacian(mesh), K); },
      py::arg("mesh"), py::arg("K"));
  m.def(
      "lb_eigs_cloud",
      [](const PointCloud& cloud, int K, int k_local) {
        return lb_eigs(cloud_laplacian(cloud, k_local), K);
      },
      py::arg("cloud"), py::arg("K"), py::arg("k_local") = 12);

  m.def(
      "geodesic_ball",
      [](const TriangleMesh& mesh, int center, double radius) {
        GeodesicBall ball = geodesic_ball(mesh, center, radius);
        std::vector<int> verts;
        std::vector<double> dists;
        for (const auto& [v, d] : ball.distances) {
          verts.push_back(v);
          dists.push_back(d);
        }
        return py::make_tuple(verts, dists);
      },
      py::arg("mesh"), py::arg("center"), py::arg("radius"));
  m.def(
      "multi_source_distances",
      [](const TriangleMesh& mesh, const std::vector<int>& sources) {
        return multi_source_distances(mesh, sources).distances;
      },
      py::arg("mesh"), py::arg("sources"));
  m.def("estimate_diameter", &estimate_diameter, py::arg("mesh"));
  m.def("farthest_point_sample", &farthest_point_sample, py::arg("mesh"), py::arg("count"),
        py::arg("pool") = std::vector<int>{}, py::arg("seeds") = std::vector<int>{});

  m.def(
      "shot_descriptors",
      [](const TriangleMesh& mesh, double radius) {
        return shot_descriptors(mesh, radius).descriptors;
      },
      py::arg("mesh"), py::arg("radius"));
  m.def(
      "gds_features",
      [](const TriangleMesh& mesh, const std::vector<int>& anchors, int cap) {
        return gds_features(mesh, anchors, cap).descriptors;
      },
      py::arg("mesh"), py::arg("anchors"), py::arg("max_anchors") = 800);
  m.def("nn_rows", &nn_rows, py::arg("queries"), py::arg("targets"),
        "Exact nearest target row per query row (ties to the lowest index)");

  m.def(
      "lmd_field",
      [](const TriangleMesh& mesh1, const TriangleMesh& mesh2, const std::vector<int>& map,
         int ring_depth) {
        LmdField field = lmd_field(mesh1, mesh2, correspondence_from(map), ring_depth);
        return py::make_tuple(field.values, field.gamma);
      },
      py::arg("mesh1"), py::arg("mesh2"), py::arg("correspondence"), py::arg("ring_depth") = 2);
  m.def(
      "select_anchors",
      [](const Eigen::VectorXd& values, const std::vector<int>& map, double threshold,
         const std::vector<std::pair<int, int>>& fixed) {
        LmdField field;
        field.values = values;
        field.gamma = Eigen::VectorXd::Ones(values.size());
        return select_anchors(field, correspondence_from(map), threshold,
                              make_fixed_anchors(fixed))
            .pairs;
      },
      py::arg("lmd_values"), py::arg("correspondence"), py::arg("threshold"),
      py::arg("fixed") = std::vector<std::pair<int, int>>{});
  m.def(
      "prune_by_lmd",
      [](const std::vector<int>& map, const Eigen::VectorXd& values, double threshold) {
        LmdField field;
        field.values = values;
        field.gamma = Eigen::VectorXd::Ones(values.size());
        return prune_by_lmd(correspondence_from(map), field, threshold).map;
      },
      py::arg("correspondence"), py::arg("lmd_values"), py::arg("threshold"));

  m.def(
      "anchor_correlation",
      [](const SpectralEmbedding& emb1, const SpectralEmbedding& emb2,
         const std::vector<std::pair<int, int>>& pairs, int K) {
        return anchor_correlation(emb1, emb2, anchors_from(pairs, {}), K);
      },
      py::arg("emb1"), py::arg("emb2"), py::arg("anchors"), py::arg("K"));
  m.def(
      "select_dimension",
      [](const Eigen::MatrixXd& correlation, int m, int K) {
        return select_dimension(singular_spectrum(correlation), m, K);
      },
      py::arg("correlation"), py::arg("anchor_count"), py::arg("K"));
  m.def(
      "procrustes",
      [](const Eigen::MatrixXd& correlation) {
        return procrustes_from_correlation(correlation).C;
      },
      py::arg("correlation"), "Nearest orthonormal matrix U V^T of the given correlation");
  m.def(
      "recover_map",
      [](const SpectralEmbedding& emb1, const SpectralEmbedding& emb2, const Eigen::MatrixXd& C) {
        FunctionalMap fmap;
        fmap.C = C;
        fmap.k = int(C.rows());
        return recover_map(emb1, emb2, fmap).map;
      },
      py::arg("emb1"), py::arg("emb2"), py::arg("C"));

  m.def(
      "dir_spectral",
      [](const TriangleMesh& mesh1, const TriangleMesh& mesh2, const SpectralEmbedding& emb1,
         const SpectralEmbedding& emb2, const std::optional<std::vector<int>>& initial_map,
         const std::vector<std::pair<int, int>>& landmarks, int max_iters,
         std::vector<double> thresholds, int K, int ring_depth, int gds_anchor_cap,
         bool post_prune) {
        DirConfig cfg = config_from_kwargs(max_iters, std::move(thresholds), K, ring_depth,
                                           "spectral", gds_anchor_cap, post_prune);
        DirResult result =
            dir_spectral(mesh1, mesh2, emb1, emb2, init_from(initial_map, landmarks), cfg);
        return py::make_tuple(result.correspondence.map, trace_to_dict(result.trace));
      },
      py::arg("mesh1"), py::arg("mesh2"), py::arg("emb1"), py::arg("emb2"),
      py::arg("initial_map") = std::nullopt,
      py::arg("landmarks") = std::vector<std::pair<int, int>>{}, py::arg("max_iters") = 10,
      py::arg("thresholds") = std::vector<double>{}, py::arg("K") = 500, py::arg("ring_depth") = 2,
      py::arg("gds_anchor_cap") = 800, py::arg("post_prune") = false);

  m.def(
      "dir_gds",
      [](const TriangleMesh& mesh1, const TriangleMesh& mesh2,
         const std::optional<std::vector<int>>& initial_map,
         const std::vector<std::pair<int, int>>& landmarks, int max_iters,
         std::vector<double> thresholds, int ring_depth, int gds_anchor_cap, bool post_prune) {
        DirConfig cfg = config_from_kwargs(max_iters, std::move(thresholds), 500, ring_depth,
                                           "gds", gds_anchor_cap, post_prune);
        DirResult result = dir_gds(mesh1, mesh2, init_from(initial_map, landmarks), cfg);
        return py::make_tuple(result.correspondence.map, trace_to_dict(result.trace));
      },
      py::arg("mesh1"), py::arg("mesh2"), py::arg("initial_map") = std::nullopt,
      py::arg("landmarks") = std::vector<std::pair<int, int>>{}, py::arg("max_iters") = 10,
      py::arg("thresholds") = std::vector<double>{}, py::arg("ring_depth") = 2,
      py::arg("gds_anchor_cap") = 800, py::arg("post_prune") = false);

  m.def(
      "geodesic_error",
      [](const std::vector<int>& map, const std::vector<int>& gt, const TriangleMesh& mesh2,
         double max_threshold, int grid_points) {
        ErrorCurveOptions opts;
        opts.max_threshold = max_threshold;
        opts.grid_points = grid_points;
        ErrorCurve curve =
            geodesic_error(correspondence_from(map), correspondence_from(gt), mesh2, opts);
        py::dict out;
        out["thresholds"] = curve.thresholds;
        out["fractions"] = curve.fractions;
        out["auc"] = curve.auc;
        out["per_point"] = curve.per_point;
        out["diameter"] = curve.diameter;
        out["mean_error"] = curve.mean_matched_error();
        return out;
      },
      py::arg("map"), py::arg("ground_truth"), py::arg("mesh2"), py::arg("max_threshold") = 0.25,
      py::arg("grid_points") = 100);

  m.def("involution_probability", &involution_probability, py::arg("n2"));
  m.def("count_involutions_bruteforce", &count_involutions_bruteforce, py::arg("n2"));
  m.def("synthetic_orthonormal", &synthetic_orthonormal, py::arg("n"), py::arg("k"),
        py::arg("seed"));
  m.def(
      "perturbation_experiment",
      [](int k, int n, int n2, int trials, std::uint64_t seed) {
        PerturbationParams params;
        params.k = k;
        params.n = n;
        params.n2 = n2;
        params.trials = trials;
        params.seed = seed;
        PerturbationStats stats = perturbation_experiment(params);
        py::dict out;
        out["samples"] = stats.samples;
        out["median"] = stats.median;
        out["q1"] = stats.q1;
        out["q3"] = stats.q3;
        out["min"] = stats.min;
        out["max"] = stats.max;
        return out;
      },
      py::arg("k"), py::arg("n"), py::arg("n2"), py::arg("trials") = 50, py::arg("seed") = 0);

  m.def(
      "run_pipeline",
      [](const std::string& src, const std::string& dst, const std::string& out_dir,
         const std::map<std::string, std::string>& config) {
        PipelineConfig cfg;
        for (const auto& [k, v] : config) apply_config_entry(k, v, cfg);
        PipelineResult result = run_pipeline(src, dst, cfg, out_dir);
        return py::make_tuple(result.correspondence.map, trace_to_dict(result.trace),
                              result.output_files);
      },
      py::arg("src"), py::arg("dst"), py::arg("out_dir"),
      py::arg("config") = std::map<std::string, std::string>{});

  m.attr("UNMATCHED") = kUnmatched;
  m.attr("__version__") = "0.1.0";
}
