// Command line front end: match / eval / eigs / lmd / thm1 subcommands.
// Exit codes: 0 success, 1 argument or config errors, 2 runtime errors.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "dirmatch/errors.hpp"
#include "dirmatch/eval.hpp"
#include "dirmatch/experiments.hpp"
#include "dirmatch/mesh_io.hpp"
#include "dirmatch/parallel.hpp"
#include "dirmatch/pipeline.hpp"

namespace fs = std::filesystem;
using namespace dirmatch;

namespace {

const TriangleMesh& require_mesh(const LoadedShape& shape, const std::string& path) {
  if (!std::holds_alternative<TriangleMesh>(shape))
    throw Error(path + ": expected a triangle mesh");
  return std::get<TriangleMesh>(shape);
}

int cmd_match(const std::string& src, const std::string& dst, const std::string& out_dir,
              PipelineConfig cfg) {
  if (cfg.dir.init == InitKind::LANDMARKS && cfg.landmarks.empty()) {
    std::cerr << "error: --init landmarks requires --landmarks FILE\n"
              << "usage: dirmatch match --src A --dst B --init landmarks --landmarks PAIRS\n";
    return 1;
  }
  if (cfg.dir.init == InitKind::FILE && cfg.init_file.empty()) {
    std::cerr << "error: --init file requires --init-file FILE\n"
              << "usage: dirmatch match --src A --dst B --init file --init-file MAP\n";
    return 1;
  }
  PipelineResult result = run_pipeline(src, dst, cfg, out_dir);
  std::cout << "wrote " << result.output_files.size() << " file(s) to " << out_dir << "\n";
  for (const auto& w : result.trace.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_eval(const std::string& map_path, const std::string& gt_path, const std::string& dst_path,
             const std::string& out_dir) {
  Correspondence T = load_correspondence(map_path);
  Correspondence gt = load_correspondence(gt_path);
  LoadedShape shape = load_shape(dst_path);
  const TriangleMesh& mesh2 = require_mesh(shape, dst_path);
  ErrorCurve curve = geodesic_error(T, gt, mesh2);
  fs::create_directories(out_dir);
  save_error_curve_csv((fs::path(out_dir) / "curve.csv").string(), curve);
  save_per_point_errors((fs::path(out_dir) / "errors.csv").string(), curve);
  std::cout.precision(12);
  std::cout << "auc " << curve.auc << "\n";
  std::cout << "mean_error " << curve.mean_matched_error() << "\n";
  return 0;
}

int cmd_eigs(const std::string& mesh_path, int K, const std::string& out_path) {
  LoadedShape shape = load_shape(mesh_path);
  const TriangleMesh& mesh = require_mesh(shape, mesh_path);
  LaplacianPair lap = cotan_laplacian(mesh);
  int K_eff = std::min(K, mesh.n_vertices() - 1);
  SpectralEmbedding emb = lb_eigs(lap, K_eff);
  save_embedding(out_path, emb, embedding_cache_key(mesh, K_eff));
  std::cout << "computed " << emb.K << " eigenpairs for n = " << mesh.n_vertices() << "\n";
  return 0;
}

int cmd_lmd(const std::string& src, const std::string& dst, const std::string& map_path,
            int ring_depth, const std::string& out_path) {
  LoadedShape s1 = load_shape(src), s2 = load_shape(dst);
  const TriangleMesh& mesh1 = require_mesh(s1, src);
  const TriangleMesh& mesh2 = require_mesh(s2, dst);
  Correspondence T = load_correspondence(map_path);
  if (T.size() != mesh1.n_vertices())
    throw LengthMismatch("correspondence length does not match the source mesh");
  LmdField field = lmd_field(mesh1, mesh2, T, ring_depth);
  save_lmd_csv(out_path, field);
  double finite_max = 0.0;
  int unmatched = 0;
  for (int i = 0; i < field.values.size(); ++i) {
    if (std::isfinite(field.values[i]))
      finite_max = std::max(finite_max, field.values[i]);
    else
      ++unmatched;
  }
  std::cout << "max_lmd " << finite_max << " unmatched " << unmatched << "\n";
  return 0;
}

int cmd_thm1(int n2, int k, int n, int trials, std::uint64_t seed, const std::string& out_path) {
  if (n2 < 1 || k < 1 || n < k || trials < 0) {
    std::cerr << "error: need n2 >= 1, k >= 1, n >= k, trials >= 0\n";
    return 1;
  }
  double eta = involution_probability(n2);
  std::cout.precision(12);
  std::cout << "eta " << eta << "\n";
  if (trials > 0) {
    PerturbationParams params;
    params.k = k;
    params.n = n;
    params.n2 = n2;
    params.trials = trials;
    params.seed = seed;
    PerturbationStats stats = perturbation_experiment(params);
    if (!out_path.empty()) save_perturbation_csv(out_path, {stats});
    std::cout << "median_error " << stats.median << "\n";
  } else if (!out_path.empty()) {
    save_perturbation_csv(out_path, {});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dirmatch: dense correspondence between nearly isometric shapes"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = auto)");

  // match
  auto* match = app.add_subcommand("match", "compute a dense correspondence");
  std::string src, dst, out_dir = "out", config_path, mode = "spectral", init = "shot";
  PipelineConfig cfg;
  match->add_option("--src", src, "source shape (off/obj/ply/xyz)")->required();
  match->add_option("--dst", dst, "target shape")->required();
  match->add_option("--out", out_dir, "output directory");
  match->add_option("--config", config_path, "flat key-value config file");
  match->add_option("--mode", mode, "spectral | gds");
  match->add_option("--init", init, "shot | landmarks | file");
  match->add_option("--landmarks", cfg.landmarks, "landmark pair file (src dst per line)");
  match->add_option("--init-file", cfg.init_file, "initial correspondence file");
  int k_max = -1, max_iters = -1, ring_depth = -1, gds_cap = -1;
  bool post_prune = false;
  match->add_option("--k-max", k_max, "spectral cap K");
  match->add_option("--max-iters", max_iters, "iteration cap N");
  match->add_option("--ring-depth", ring_depth, "LMD ring depth");
  match->add_option("--gds-anchor-cap", gds_cap, "max GDS reference anchors");
  match->add_flag("--post-prune", post_prune, "prune final map by LMD (partial matching)");

  // eval
  auto* eval = app.add_subcommand("eval", "geodesic-error curve against ground truth");
  std::string map_path, gt_path, eval_dst, eval_out = "out";
  eval->add_option("--map", map_path, "computed correspondence file")->required();
  eval->add_option("--gt", gt_path, "ground-truth correspondence file")->required();
  eval->add_option("--dst", eval_dst, "target mesh")->required();
  eval->add_option("--out", eval_out, "output directory");

  // eigs
  auto* eigs = app.add_subcommand("eigs", "precompute an embedding cache");
  std::string eigs_mesh, eigs_out = "embedding.eigs";
  int eigs_k = 100;
  eigs->add_option("--mesh", eigs_mesh, "input mesh")->required();
  eigs->add_option("--k", eigs_k, "number of eigenpairs");
  eigs->add_option("--out", eigs_out, "output cache file");

  // lmd
  auto* lmd = app.add_subcommand("lmd", "export the distortion field of a correspondence");
  std::string lmd_src, lmd_dst, lmd_map, lmd_out = "lmd.csv";
  int lmd_ring = 2;
  lmd->add_option("--src", lmd_src, "source mesh")->required();
  lmd->add_option("--dst", lmd_dst, "target mesh")->required();
  lmd->add_option("--map", lmd_map, "correspondence file")->required();
  lmd->add_option("--ring-depth", lmd_ring, "ring depth");
  lmd->add_option("--out", lmd_out, "output CSV");

  // thm1
  auto* thm1 = app.add_subcommand("thm1", "involution probability and perturbation study");
  int t_n2 = 0, t_k = 50, t_n = 5000, t_trials = 50;
  std::uint64_t t_seed = 0;
  std::string t_out;
  thm1->add_option("--n2", t_n2, "corrupted row count")->required();
  thm1->add_option("--k", t_k, "spectral dimension");
  thm1->add_option("--n", t_n, "embedding rows");
  thm1->add_option("--trials", t_trials, "Monte-Carlo trials");
  thm1->add_option("--seed", t_seed, "RNG seed");
  thm1->add_option("--out", t_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // prints usage; nonzero on errors
  }

  try {
    set_thread_cap(threads);
    if (*match) {
      if (!config_path.empty()) apply_config_file(config_path, cfg);
      // flags override the config file
      apply_config_entry("mode", mode, cfg);
      apply_config_entry("init", init, cfg);
      if (k_max > 0) cfg.dir.K = k_max;
      if (max_iters > 0) cfg.dir.max_iters = max_iters;
      if (ring_depth > 0) cfg.dir.ring_depth = ring_depth;
      if (gds_cap > 0) cfg.dir.gds_anchor_cap = gds_cap;
      if (post_prune) cfg.dir.post_prune = true;
      cfg.threads = threads;
      return cmd_match(src, dst, out_dir, cfg);
    }
    if (*eval) return cmd_eval(map_path, gt_path, eval_dst, eval_out);
    if (*eigs) return cmd_eigs(eigs_mesh, eigs_k, eigs_out);
    if (*lmd) return cmd_lmd(lmd_src, lmd_dst, lmd_map, lmd_ring, lmd_out);
    if (*thm1) return cmd_thm1(t_n2, t_k, t_n, t_trials, t_seed, t_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const LengthMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
