#include "dirmatch/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirmatch/descriptors.hpp"
#include "dirmatch/errors.hpp"
#include "dirmatch/local_mesh.hpp"
#include "dirmatch/mesh_io.hpp"
#include "dirmatch/parallel.hpp"
#include "dirmatch/util.hpp"

namespace dirmatch {

namespace {

namespace fs = std::filesystem;

std::string mode_name(DirMode m) { return m == DirMode::SPECTRAL ? "spectral" : "gds"; }
std::string init_name(InitKind k) {
  switch (k) {
    case InitKind::DESCRIPTOR: return "shot";
    case InitKind::LANDMARKS: return "landmarks";
    case InitKind::FILE: return "file";
  }
  return "shot";
}

std::string join_thresholds(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError("bad boolean value '" + v + "'");
}

// Graph-bearing view of an input shape: meshes as-is, clouds through the
// union of their local triangulations.
struct PreparedShape {
  TriangleMesh mesh;
  bool from_cloud = false;
  PointCloud cloud;  // populated when from_cloud
};

PreparedShape prepare_shape(const LoadedShape& shape, int k_local) {
  PreparedShape prepared;
  if (std::holds_alternative<TriangleMesh>(shape)) {
    prepared.mesh = std::get<TriangleMesh>(shape);
  } else {
    prepared.cloud = std::get<PointCloud>(shape);
    prepared.from_cloud = true;
    prepared.mesh = cloud_union_mesh(prepared.cloud, k_local);
  }
  return prepared;
}

SpectralEmbedding embed_shape(const PreparedShape& shape, int K, int k_local, bool use_cache,
                              const fs::path& out_dir, std::vector<std::string>& outputs) {
  LaplacianPair lap =
      shape.from_cloud ? cloud_laplacian(shape.cloud, k_local) : cotan_laplacian(shape.mesh);
  int K_eff = std::min(K, shape.mesh.n_vertices() - 1);
  std::uint64_t key = embedding_cache_key(shape.mesh, K_eff);
  std::string cache_name = "emb_" + hex64(key) + ".eigs";
  fs::path cache_path = out_dir / cache_name;
  SpectralEmbedding emb;
  if (use_cache && load_embedding(cache_path.string(), key, emb)) return emb;
  emb = lb_eigs(lap, K_eff);
  if (use_cache) {
    save_embedding(cache_path.string(), emb, key);
    outputs.push_back(cache_name);
  }
  return emb;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> PipelineConfig::resolved_entries() const {
  return {
      {"max_iters", std::to_string(dir.max_iters)},
      {"lmd_thresholds", join_thresholds(dir.lmd_thresholds)},
      {"K", std::to_string(dir.K)},
      {"ring_depth", std::to_string(dir.ring_depth)},
      {"mode", mode_name(dir.mode)},
      {"gds_anchor_cap", std::to_string(dir.gds_anchor_cap)},
      {"init", init_name(dir.init)},
      {"post_prune", dir.post_prune ? "true" : "false"},
      {"landmarks", landmarks},
      {"init_file", init_file},
      {"shot_radius_frac", std::to_string(shot_radius_frac)},
      {"k_local", std::to_string(k_local)},
      {"threads", std::to_string(threads)},
      {"cache_embeddings", cache_embeddings ? "true" : "false"},
  };
}

void apply_config_entry(const std::string& key, const std::string& value, PipelineConfig& cfg) {
  try {
    if (key == "max_iters") {
      cfg.dir.max_iters = std::stoi(value);
    } else if (key == "lmd_thresholds") {
      std::vector<double> thresholds;
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) thresholds.push_back(std::stod(tok));
      }
      cfg.dir.lmd_thresholds = thresholds;
    } else if (key == "K") {
      cfg.dir.K = std::stoi(value);
    } else if (key == "ring_depth") {
      cfg.dir.ring_depth = std::stoi(value);
    } else if (key == "mode") {
      if (value == "spectral")
        cfg.dir.mode = DirMode::SPECTRAL;
      else if (value == "gds")
        cfg.dir.mode = DirMode::GDS;
      else
        throw ParseError("mode must be 'spectral' or 'gds'");
    } else if (key == "gds_anchor_cap") {
      cfg.dir.gds_anchor_cap = std::stoi(value);
    } else if (key == "init") {
      if (value == "shot")
        cfg.dir.init = InitKind::DESCRIPTOR;
      else if (value == "landmarks")
        cfg.dir.init = InitKind::LANDMARKS;
      else if (value == "file")
        cfg.dir.init = InitKind::FILE;
      else
        throw ParseError("init must be 'shot', 'landmarks' or 'file'");
    } else if (key == "post_prune") {
      cfg.dir.post_prune = parse_bool(value);
    } else if (key == "landmarks") {
      cfg.landmarks = value;
    } else if (key == "init_file") {
      cfg.init_file = value;
    } else if (key == "shot_radius_frac") {
      cfg.shot_radius_frac = std::stod(value);
    } else if (key == "k_local") {
      cfg.k_local = std::stoi(value);
    } else if (key == "threads") {
      cfg.threads = std::stoi(value);
    } else if (key == "cache_embeddings") {
      cfg.cache_embeddings = parse_bool(value);
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad value '" + value + "' for config key '" + key + "'");
  }
}

void apply_config_file(const std::string& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::string body = line;
    auto eq = body.find('=');
    if (eq != std::string::npos) body[eq] = ' ';
    std::istringstream row(body);
    std::string key, value;
    if (!(row >> key >> value))
      throw ParseError(path + ": bad config line " + std::to_string(lineno));
    apply_config_entry(key, value, cfg);
  }
}

PipelineResult run_pipeline(const std::string& src_path, const std::string& dst_path,
                            const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.dir.validate();
  set_thread_cap(cfg.threads);
  fs::create_directories(out_dir);
  fs::path out(out_dir);

  using clock = std::chrono::steady_clock;
  auto elapsed = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> outputs;

  auto t_load = clock::now();
  PreparedShape src = prepare_shape(load_shape(src_path), cfg.k_local);
  PreparedShape dst = prepare_shape(load_shape(dst_path), cfg.k_local);
  stage_seconds.emplace_back("load", elapsed(t_load));

  SpectralEmbedding emb1, emb2;
  if (cfg.dir.mode == DirMode::SPECTRAL) {
    auto t_embed = clock::now();
    emb1 = embed_shape(src, cfg.dir.K, cfg.k_local, cfg.cache_embeddings, out, outputs);
    emb2 = embed_shape(dst, cfg.dir.K, cfg.k_local, cfg.cache_embeddings, out, outputs);
    stage_seconds.emplace_back("embed", elapsed(t_embed));
  }

  auto t_init = clock::now();
  DirInit init;
  if (!cfg.landmarks.empty()) init.landmarks = make_fixed_anchors(load_landmarks(cfg.landmarks));
  switch (cfg.dir.init) {
    case InitKind::DESCRIPTOR: {
      double r1 = cfg.shot_radius_frac * src.mesh.bounding_box_diagonal();
      double r2 = cfg.shot_radius_frac * dst.mesh.bounding_box_diagonal();
      DescriptorField d1 = src.from_cloud ? shot_descriptors(src.cloud, r1)
                                          : shot_descriptors(src.mesh, r1);
      DescriptorField d2 = dst.from_cloud ? shot_descriptors(dst.cloud, r2)
                                          : shot_descriptors(dst.mesh, r2);
      init.initial_map = nn_match(d1, d2);
      break;
    }
    case InitKind::LANDMARKS: {
      if (init.landmarks.empty())
        throw Error("init=landmarks requires a non-empty landmark file");
      break;
    }
    case InitKind::FILE: {
      if (cfg.init_file.empty()) throw Error("init=file requires init_file");
      Correspondence loaded = load_correspondence(cfg.init_file);
      if (loaded.size() != src.mesh.n_vertices())
        throw LengthMismatch("init correspondence has " + std::to_string(loaded.size()) +
                             " lines, source shape has " +
                             std::to_string(src.mesh.n_vertices()));
      init.initial_map = std::move(loaded);
      break;
    }
  }
  stage_seconds.emplace_back("init", elapsed(t_init));

  auto t_refine = clock::now();
  DirResult dres = cfg.dir.mode == DirMode::SPECTRAL
                       ? dir_spectral(src.mesh, dst.mesh, emb1, emb2, init, cfg.dir)
                       : dir_gds(src.mesh, dst.mesh, init, cfg.dir);
  stage_seconds.emplace_back("refine", elapsed(t_refine));

  auto t_write = clock::now();
  save_correspondence((out / "correspondence.txt").string(), dres.correspondence);
  outputs.push_back("correspondence.txt");
  save_trace_csv((out / "trace.csv").string(), dres.trace);
  outputs.push_back("trace.csv");
  for (std::size_t i = 0; i < dres.functional_maps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "fmap_iter_%02zu.csv", i + 1);
    save_functional_map_csv((out / name).string(), dres.functional_maps[i]);
    outputs.push_back(name);
  }
  {
    LmdField final_lmd = lmd_field(src.mesh, dst.mesh, dres.correspondence, cfg.dir.ring_depth);
    save_lmd_csv((out / "lmd_final.csv").string(), final_lmd);
    outputs.push_back("lmd_final.csv");
  }
  stage_seconds.emplace_back("write", elapsed(t_write));

  std::ostringstream manifest;
  manifest.precision(6);
  manifest << "tool = dirmatch " << "0.1.0" << "\n";
  manifest << "src = " << src_path << "\n";
  manifest << "src_hash = " << hex64(fnv1a64_file(src_path)) << "\n";
  manifest << "dst = " << dst_path << "\n";
  manifest << "dst_hash = " << hex64(fnv1a64_file(dst_path)) << "\n";
  for (const auto& [k, v] : cfg.resolved_entries()) manifest << k << " = " << v << "\n";
  for (const auto& [stage, secs] : stage_seconds)
    manifest << "stage." << stage << ".seconds = " << secs << "\n";
  for (const auto& f : outputs) manifest << "output = " << f << "\n";
  manifest << "output = manifest.txt\n";
  atomic_write((out / "manifest.txt").string(), manifest.str());

  PipelineResult result;
  result.correspondence = std::move(dres.correspondence);
  result.trace = std::move(dres.trace);
  result.output_files = std::move(outputs);
  result.output_files.push_back("manifest.txt");
  return result;
}

}  // namespace dirmatch
