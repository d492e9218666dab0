#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dirmatch {

constexpr int kUnmatched = -1;

/// Dense point-to-point map: one target index (or kUnmatched) per source
/// vertex. Not required to be injective or surjective.
struct Correspondence {
  std::vector<int> map;
  std::string source_id;
  std::string target_id;

  int size() const { return int(map.size()); }
  bool matched(int i) const { return map[i] != kUnmatched; }
  int matched_count() const;
};

/// Selected anchor pairs (source, target), unique in source index.
/// Fixed pairs are user landmarks that persist across refinement iterations.
struct AnchorSet {
  std::vector<std::pair<int, int>> pairs;
  std::vector<char> fixed_mask;  // parallel to pairs

  int size() const { return int(pairs.size()); }
  bool empty() const { return pairs.empty(); }
  int fixed_count() const;
  std::vector<int> sources() const;
  std::vector<int> targets() const;
  bool contains_pair(int src, int dst) const;
};

AnchorSet make_fixed_anchors(const std::vector<std::pair<int, int>>& landmarks);

/// Plain text: one 0-based target index per line, -1 for unmatched.
void save_correspondence(const std::string& path, const Correspondence& corr);
Correspondence load_correspondence(const std::string& path);

/// Landmark files: two 0-based indices (source target) per line.
std::vector<std::pair<int, int>> load_landmarks(const std::string& path);

}  // namespace dirmatch
