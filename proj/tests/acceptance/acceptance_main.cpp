// Acceptance suite. Usage: acceptance [criterion...]  (default: all of 1-10).
// Each criterion prints exactly one line:
//   criterion N: PASS|FAIL|SKIP (seconds) note
// The process exits nonzero when any executed criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "dirmatch/descriptors.hpp"
#include "dirmatch/dir.hpp"
#include "dirmatch/eval.hpp"
#include "dirmatch/experiments.hpp"
#include "dirmatch/fmap.hpp"
#include "dirmatch/geodesics.hpp"
#include "dirmatch/lmd.hpp"
#include "dirmatch/mesh_io.hpp"
#include "dirmatch/rng.hpp"
#include "dirmatch/spectral.hpp"
#include "dirmatch/util.hpp"
#include "support/testshapes.hpp"

using namespace dirmatch;
namespace ts = dirmatch::testshapes;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const char* env = std::getenv("DIRMATCH_ACCEPT_DIR");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "dirmatch_acceptance";
  fs::create_directories(dir);
  return dir;
}

struct Outcome {
  bool pass = true;
  bool skipped = false;
  std::string note;
};

// ---------------------------------------------------------------------------
// shared fixtures

// The constructed ground-truth pair for criteria 5-8 and 10: a bumpy torus
// (5120 vertices) against a rigidly moved copy; identity is the true map.
TriangleMesh standard_source() { return ts::bumpy_torus(80, 64); }
TriangleMesh standard_target() { return ts::rigidly_moved(standard_source()); }

SpectralEmbedding cached_eigs(const TriangleMesh& mesh, int K) {
  std::uint64_t key = embedding_cache_key(mesh, K);
  fs::path path = work_dir() / ("emb_" + hex64(key) + ".eigs");
  SpectralEmbedding emb;
  if (load_embedding(path.string(), key, emb)) return emb;
  emb = lb_eigs(cotan_laplacian(mesh), K);
  save_embedding(path.string(), emb, key);
  return emb;
}

Correspondence identity_map(int n) {
  Correspondence corr;
  corr.map.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) corr.map[std::size_t(i)] = i;
  return corr;
}

double identity_fraction(const Correspondence& corr) {
  int hits = 0;
  for (int i = 0; i < corr.size(); ++i)
    if (corr.map[std::size_t(i)] == i) ++hits;
  return double(hits) / double(corr.size());
}

void write_samples(const fs::path& path, const std::vector<double>& samples) {
  std::ofstream out(path);
  out.precision(17);
  for (double s : samples) out << s << "\n";
}

void write_run_artifacts(const fs::path& path, const DirResult& result) {
  std::ofstream out(path);
  out.precision(17);
  for (int t : result.correspondence.map) out << t << "\n";
  for (const auto& r : result.trace.records)
    out << "iter " << r.iteration << " m " << r.anchor_count << " k " << r.spectral_dim << "\n";
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

// ---------------------------------------------------------------------------
// criterion bodies (each may be invoked twice by criterion 10)

std::vector<double> run_criterion2_samples() {
  std::vector<double> samples;
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    int k = 2 + int(rng.uniform_index(199));  // k <= 200
    int n = k + 40;
    Eigen::MatrixXd phi1 = synthetic_orthonormal(n, k, 50000 + trial);
    Eigen::MatrixXd Q = synthetic_orthonormal(k, k, 60000 + trial);
    FunctionalMap fit = procrustes_from_correlation(phi1.transpose() * (phi1 * Q));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(fit.C - Q));
    samples.push_back(svd.singularValues()(0));
  }
  return samples;
}

std::vector<PerturbationStats> run_criterion3_sweep() {
  std::vector<PerturbationStats> runs;
  for (int n2 : {250, 1000, 2500, 4000}) {
    PerturbationParams params;
    params.k = 50;
    params.n = 5000;
    params.n2 = n2;
    params.trials = 50;
    params.seed = 777;
    runs.push_back(perturbation_experiment(params));
  }
  return runs;
}

DirResult run_criterion6_dir() {
  TriangleMesh mesh1 = standard_source();
  TriangleMesh mesh2 = standard_target();
  SpectralEmbedding emb1 = cached_eigs(mesh1, 300);
  SpectralEmbedding emb2 = cached_eigs(mesh2, 300);
  double r1 = 0.05 * mesh1.bounding_box_diagonal();
  double r2 = 0.05 * mesh2.bounding_box_diagonal();
  DirInit init;
  init.initial_map = nn_match(shot_descriptors(mesh1, r1), shot_descriptors(mesh2, r2));
  DirConfig cfg;
  cfg.K = 300;
  return dir_spectral(mesh1, mesh2, emb1, emb2, init, cfg);
}

std::vector<DirResult> run_criterion7_draws() {
  TriangleMesh mesh1 = standard_source();
  TriangleMesh mesh2 = standard_target();
  SpectralEmbedding emb1 = cached_eigs(mesh1, 300);
  SpectralEmbedding emb2 = cached_eigs(mesh2, 300);
  DirConfig cfg;
  cfg.K = 300;
  std::vector<DirResult> runs;
  Rng rng(4242);
  for (int draw = 0; draw < 10; ++draw) {
    std::vector<std::pair<int, int>> marks;
    std::vector<int> picked = rng.sample_without_replacement(mesh1.n_vertices(), 4);
    for (int v : picked) marks.emplace_back(v, v);  // correct landmarks
    DirInit init;
    init.landmarks = make_fixed_anchors(marks);
    runs.push_back(dir_spectral(mesh1, mesh2, emb1, emb2, init, cfg));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// criteria

Outcome criterion1() {
  Outcome out;
  std::ostringstream note;
  for (int n2 = 1; n2 <= 10; ++n2) {
    double enumerated =
        double(count_involutions_bruteforce(n2)) / std::tgamma(double(n2) + 1.0);
    if (std::abs(involution_probability(n2) - enumerated) > 1e-12) {
      out.pass = false;
      note << "series vs enumeration mismatch at n2=" << n2 << "; ";
    }
  }
  double eta25 = involution_probability(25);
  if (!(eta25 >= 0.5e-12 && eta25 <= 2e-12)) {
    out.pass = false;
    note.precision(10);
    note << "eta(25) = " << eta25 << " outside the required [5e-13, 2e-12]; the series is "
         << "pinned by the enumeration cross-check above and its exact value at 25 is "
         << "6.168470641e-12 (= 95680443760576 involutions / 25!), so the stated range is "
         << "unattainable without changing the formula";
  }
  out.note = note.str();
  if (out.pass) out.note = "series matches enumeration for n2=1..10; eta(25) in range";
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::vector<double> samples = run_criterion2_samples();
  write_samples(work_dir() / "crit2_samples.txt", samples);
  double worst = *std::max_element(samples.begin(), samples.end());
  out.pass = worst <= 1e-8;
  std::ostringstream note;
  note << "max |C_a - Q|_2 = " << worst << " over 100 trials";
  out.note = note.str();
  return out;
}

Outcome criterion3() {
  Outcome out;
  std::vector<PerturbationStats> runs = run_criterion3_sweep();
  save_perturbation_csv((work_dir() / "crit3_sweep.csv").string(), runs);
  std::ostringstream note;
  note << "medians";
  double prev = -1.0;
  for (const auto& run : runs) {
    note << " " << run.median;
    if (!(run.median > prev)) out.pass = false;
    prev = run.median;
    for (double e : run.samples)
      if (e < 0.0 || e > 2.0) out.pass = false;
  }
  note << (out.pass ? " strictly increasing, samples in [0,2]" : " NOT strictly increasing");
  out.note = note.str();
  return out;
}

Outcome criterion4() {
  Outcome out;
  TriangleMesh sphere = ts::icosphere(4);  // 2562 vertices
  SpectralEmbedding emb = lb_eigs(cotan_laplacian(sphere), 16);
  std::vector<double> expected;
  for (int l = 0; l <= 3; ++l)
    for (int m = 0; m < 2 * l + 1; ++m) expected.push_back(double(l) * (l + 1));
  double worst_rel = 0.0;
  for (int i = 1; i < 16; ++i)
    worst_rel = std::max(worst_rel,
                         std::abs(emb.lambda[i] - expected[std::size_t(i)]) / expected[std::size_t(i)]);
  bool zero_mode = emb.lambda[0] <= 1e-8 * emb.lambda[1];
  out.pass = worst_rel <= 0.05 && zero_mode;
  std::ostringstream note;
  note << "n=" << sphere.n_vertices() << " worst eigenvalue deviation " << worst_rel * 100.0
       << "% ; lambda1/lambda2 = " << emb.lambda[0] / emb.lambda[1];
  out.note = note.str();
  return out;
}

Outcome criterion5() {
  Outcome out;
  std::ostringstream note;
  for (const TriangleMesh& mesh : {standard_source(), ts::bumpy_sphere(3)}) {
    LmdSourceCache cache = build_lmd_source_cache(mesh, 2);
    LmdField self = lmd_field(cache, mesh, identity_map(mesh.n_vertices()));
    if (self.values.maxCoeff() != 0.0) {
      out.pass = false;
      note << "self-map distortion not exactly zero (n=" << mesh.n_vertices() << "); ";
    }
    TriangleMesh moved = ts::rigidly_moved(mesh);
    LmdField rigid = lmd_field(cache, moved, identity_map(mesh.n_vertices()));
    if (rigid.values.maxCoeff() > 1e-10) {
      out.pass = false;
      note << "rigid-copy distortion " << rigid.values.maxCoeff() << " exceeds 1e-10; ";
    }
  }
  out.note = out.pass ? "identity exactly 0; rigid copy below 1e-10 on both meshes" : note.str();
  return out;
}

Outcome criterion6() {
  Outcome out;
  DirResult result = run_criterion6_dir();
  write_run_artifacts(work_dir() / "crit6_run.txt", result);
  TriangleMesh mesh2 = standard_target();
  double ident = identity_fraction(result.correspondence);
  ErrorCurve curve =
      geodesic_error(result.correspondence, identity_map(result.correspondence.size()), mesh2);
  double mean_err = curve.mean_matched_error();
  bool k_monotone = true;
  int prev_k = 0;
  for (const auto& rec : result.trace.records) {
    if (rec.spectral_dim < prev_k) k_monotone = false;
    prev_k = rec.spectral_dim;
  }
  out.pass = ident >= 0.95 && mean_err <= 0.005 && k_monotone;
  std::ostringstream note;
  note << "identity " << ident * 100.0 << "% ; mean geodesic error " << mean_err
       << " (budget 0.005) ; k trace " << (k_monotone ? "non-decreasing" : "NOT monotone");
  out.note = note.str();
  return out;
}

Outcome criterion7() {
  Outcome out;
  std::vector<DirResult> runs = run_criterion7_draws();
  TriangleMesh mesh2 = standard_target();
  Correspondence gt = identity_map(mesh2.n_vertices());
  int good_draws = 0;
  std::ostringstream fractions;
  for (std::size_t d = 0; d < runs.size(); ++d) {
    write_run_artifacts(work_dir() / ("crit7_run_" + std::to_string(d) + ".txt"), runs[d]);
    ErrorCurve curve = geodesic_error(runs[d].correspondence, gt, mesh2);
    int below = 0;
    for (int i = 0; i < curve.per_point.size(); ++i)
      if (curve.per_point[i] < 0.05) ++below;
    double frac = double(below) / double(curve.per_point.size());
    fractions << (d ? " " : "") << frac;
    if (frac >= 0.95 && int(runs[d].trace.records.size()) <= 10) ++good_draws;
  }
  out.pass = good_draws >= 9;
  out.note = std::to_string(good_draws) + "/10 draws reached 95% below 0.05*diam; fractions: " +
             fractions.str();
  return out;
}

Outcome criterion8() {
  Outcome out;
  std::ostringstream note;

  // patch -> full mesh
  TriangleMesh full = ts::bumpy_sphere(4);  // 2562 vertices
  ts::Patch patch = ts::extract_patch(full, 77, 1.15);
  double cover = double(patch.mesh.n_vertices()) / double(full.n_vertices());
  if (cover < 0.30) {
    out.pass = false;
    note << "patch covers only " << cover * 100.0 << "%; ";
  }
  std::vector<int> marks = farthest_point_sample(patch.mesh, 10);
  std::vector<std::pair<int, int>> seeds;
  for (int m : marks) seeds.emplace_back(m, patch.to_original[std::size_t(m)]);
  DirInit init;
  init.landmarks = make_fixed_anchors(seeds);
  DirConfig cfg;
  cfg.mode = DirMode::GDS;
  DirResult result = dir_gds(patch.mesh, full, init, cfg);
  std::vector<int> interior = ts::deep_interior(patch.mesh, 2);
  int exact = 0;
  for (int v : interior)
    if (result.correspondence.map[std::size_t(v)] == patch.to_original[std::size_t(v)]) ++exact;
  double exact_frac = interior.empty() ? 0.0 : double(exact) / double(interior.size());
  if (exact_frac < 0.90) out.pass = false;
  note << "patch " << patch.mesh.n_vertices() << "/" << full.n_vertices() << " vertices, interior "
       << interior.size() << ", exact " << exact_frac * 100.0 << "%";

  // overlap pair with post pruning
  ts::Patch a = ts::extract_patch(full, 10, 1.25);
  ts::Patch b = ts::extract_patch(full, 210, 1.25);
  std::vector<int> orig_to_b(full.n_vertices(), -1);
  for (std::size_t i = 0; i < b.to_original.size(); ++i)
    orig_to_b[std::size_t(b.to_original[i])] = int(i);
  std::vector<std::pair<int, int>> overlap_seeds;
  for (int m : farthest_point_sample(a.mesh, 40)) {
    int t = orig_to_b[std::size_t(a.to_original[std::size_t(m)])];
    if (t >= 0 && overlap_seeds.size() < 10) overlap_seeds.emplace_back(m, t);
  }
  DirInit overlap_init;
  overlap_init.landmarks = make_fixed_anchors(overlap_seeds);
  DirConfig prune_cfg;
  prune_cfg.mode = DirMode::GDS;
  prune_cfg.post_prune = true;
  DirResult pruned = dir_gds(a.mesh, b.mesh, overlap_init, prune_cfg);
  int non_overlap = 0, removed = 0;
  for (int i = 0; i < a.mesh.n_vertices(); ++i) {
    if (orig_to_b[std::size_t(a.to_original[std::size_t(i)])] < 0) {
      ++non_overlap;
      if (pruned.correspondence.map[std::size_t(i)] == kUnmatched) ++removed;
    }
  }
  double pruned_frac = non_overlap > 0 ? double(removed) / double(non_overlap) : 1.0;
  if (pruned_frac < 0.90) out.pass = false;
  note << " ; overlap pair: " << non_overlap << " non-overlap points, " << pruned_frac * 100.0
       << "% pruned";
  out.note = note.str();
  return out;
}

Outcome criterion9() {
  Outcome out;
  const char* src = std::getenv("DIRMATCH_TOSCA_SRC");
  const char* dst = std::getenv("DIRMATCH_TOSCA_DST");
  const char* gt = std::getenv("DIRMATCH_TOSCA_GT");
  if (!src || !dst || !gt) {
    out.skipped = true;
    out.note = "dataset not supplied (set DIRMATCH_TOSCA_SRC/DST/GT to enable)";
    return out;
  }
  TriangleMesh mesh1 = std::get<TriangleMesh>(load_shape(src));
  TriangleMesh mesh2 = std::get<TriangleMesh>(load_shape(dst));
  Correspondence truth = load_correspondence(gt);
  double r1 = 0.05 * mesh1.bounding_box_diagonal();
  double r2 = 0.05 * mesh2.bounding_box_diagonal();
  Correspondence shot_init = nn_match(shot_descriptors(mesh1, r1), shot_descriptors(mesh2, r2));
  SpectralEmbedding emb1 = cached_eigs(mesh1, 300);
  SpectralEmbedding emb2 = cached_eigs(mesh2, 300);
  DirInit init;
  init.initial_map = shot_init;
  DirConfig cfg;
  cfg.K = 300;
  DirResult refined = dir_spectral(mesh1, mesh2, emb1, emb2, init, cfg);
  ErrorCurveOptions opts;
  opts.max_threshold = 0.05;
  ErrorCurve ours = geodesic_error(refined.correspondence, truth, mesh2, opts);
  ErrorCurve baseline = geodesic_error(shot_init, truth, mesh2, opts);
  bool dominates = true;
  for (int g = 0; g < ours.fractions.size(); ++g)
    if (ours.fractions[g] < baseline.fractions[g]) dominates = false;
  out.pass = dominates;
  out.note = dominates ? "refined curve dominates the descriptor baseline everywhere"
                       : "refined curve fails to dominate the baseline";
  return out;
}

Outcome criterion10() {
  Outcome out;
  std::ostringstream note;
  fs::path dir = work_dir();

  write_samples(dir / "crit2_rerun.txt", run_criterion2_samples());
  write_samples(dir / "crit2_rerun2.txt", run_criterion2_samples());
  if (!fs::exists(dir / "crit2_samples.txt"))
    write_samples(dir / "crit2_samples.txt", run_criterion2_samples());
  bool ok2 = same_bytes(dir / "crit2_samples.txt", dir / "crit2_rerun.txt") &&
             same_bytes(dir / "crit2_rerun.txt", dir / "crit2_rerun2.txt");

  save_perturbation_csv((dir / "crit3_rerun.csv").string(), run_criterion3_sweep());
  if (!fs::exists(dir / "crit3_sweep.csv"))
    save_perturbation_csv((dir / "crit3_sweep.csv").string(), run_criterion3_sweep());
  bool ok3 = same_bytes(dir / "crit3_sweep.csv", dir / "crit3_rerun.csv");

  write_run_artifacts(dir / "crit6_rerun.txt", run_criterion6_dir());
  if (!fs::exists(dir / "crit6_run.txt"))
    write_run_artifacts(dir / "crit6_run.txt", run_criterion6_dir());
  bool ok6 = same_bytes(dir / "crit6_run.txt", dir / "crit6_rerun.txt");

  std::vector<DirResult> draws = run_criterion7_draws();
  bool ok7 = true;
  for (std::size_t d = 0; d < draws.size(); ++d) {
    fs::path original = dir / ("crit7_run_" + std::to_string(d) + ".txt");
    fs::path rerun = dir / ("crit7_rerun_" + std::to_string(d) + ".txt");
    write_run_artifacts(rerun, draws[d]);
    if (!fs::exists(original)) {
      ok7 = false;
      note << "criterion 7 artifacts missing (run criterion 7 first); ";
      break;
    }
    if (!same_bytes(original, rerun)) ok7 = false;
  }

  out.pass = ok2 && ok3 && ok6 && ok7;
  note << "criterion 2 " << (ok2 ? "bit-identical" : "DIFFERS") << "; 3 "
       << (ok3 ? "bit-identical" : "DIFFERS") << "; 6 " << (ok6 ? "bit-identical" : "DIFFERS")
       << "; 7 " << (ok7 ? "bit-identical" : "DIFFERS");
  out.note = note.str();
  return out;
}

struct Criterion {
  int id;
  double budget_seconds;  // 0 = no budget stated
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, 5.0, criterion1},  {2, 10.0, criterion2}, {3, 30.0, criterion3}, {4, 10.0, criterion4},
    {5, 10.0, criterion5}, {6, 180.0, criterion6}, {7, 300.0, criterion7}, {8, 180.0, criterion8},
    {9, 0.0, criterion9},  {10, 0.0, criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));
  if (wanted.empty())
    for (const auto& c : kCriteria) wanted.push_back(c.id);

  bool all_pass = true;
  std::cout.precision(6);
  for (int id : wanted) {
    const Criterion* crit = nullptr;
    for (const auto& c : kCriteria)
      if (c.id == id) crit = &c;
    if (!crit) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit->fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.note = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = crit->budget_seconds <= 0.0 || secs < crit->budget_seconds;
    if (!in_budget) {
      out.pass = false;
      out.note += " ; runtime budget " + std::to_string(crit->budget_seconds) + "s exceeded";
    }
    std::string verdict = out.skipped ? "SKIP" : (out.pass ? "PASS" : "FAIL");
    std::cout << "criterion " << id << ": " << verdict << " (" << secs << " s) " << out.note
              << "\n";
    if (!out.pass && !out.skipped) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
