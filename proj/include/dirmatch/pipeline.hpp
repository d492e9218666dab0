#pragma once

#include <string>
#include <vector>

#include "dirmatch/dir.hpp"

namespace dirmatch {

/// End-to-end configuration: the refinement settings plus ingestion and
/// initialization knobs. Config files are flat "key value" (or "key = value")
/// text with keys named exactly like the fields below.
struct PipelineConfig {
  DirConfig dir;
  std::string landmarks;         // landmark pair file (optional unless init=landmarks)
  std::string init_file;         // correspondence file for init=file
  double shot_radius_frac = 0.05;  // SHOT support as a fraction of the bbox diagonal
  int k_local = 12;                // local-mesh size for raw point clouds
  int threads = 0;                 // 0 = auto
  bool cache_embeddings = true;

  std::vector<std::pair<std::string, std::string>> resolved_entries() const;
};

/// Parses a config file into cfg (unknown keys are errors).
void apply_config_file(const std::string& path, PipelineConfig& cfg);
void apply_config_entry(const std::string& key, const std::string& value, PipelineConfig& cfg);

struct PipelineResult {
  Correspondence correspondence;
  IterationTrace trace;
  std::vector<std::string> output_files;  // relative to out_dir
};

/// Loads the two shapes, prepares embeddings (spectral mode, cached by
/// content hash), initializes per cfg, runs the refinement, and writes
/// correspondence.txt, trace.csv, per-iteration functional maps, the final
/// distortion field, and manifest.txt under out_dir.
PipelineResult run_pipeline(const std::string& src_path, const std::string& dst_path,
                            const PipelineConfig& cfg, const std::string& out_dir);

}  // namespace dirmatch
