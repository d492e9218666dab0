#include "dirmatch/correspondence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dirmatch/errors.hpp"

namespace dirmatch {

int Correspondence::matched_count() const {
  return int(std::count_if(map.begin(), map.end(), [](int t) { return t != kUnmatched; }));
}

int AnchorSet::fixed_count() const {
  return int(std::count(fixed_mask.begin(), fixed_mask.end(), char(1)));
}

std::vector<int> AnchorSet::sources() const {
  std::vector<int> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].first;
  return out;
}

std::vector<int> AnchorSet::targets() const {
  std::vector<int> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].second;
  return out;
}

bool AnchorSet::contains_pair(int src, int dst) const {
  for (const auto& p : pairs)
    if (p.first == src && p.second == dst) return true;
  return false;
}

AnchorSet make_fixed_anchors(const std::vector<std::pair<int, int>>& landmarks) {
  AnchorSet set;
  for (const auto& p : landmarks) {
    bool dup = false;
    for (const auto& q : set.pairs)
      if (q.first == p.first) dup = true;
    if (dup) continue;
    set.pairs.push_back(p);
    set.fixed_mask.push_back(1);
  }
  return set;
}

void save_correspondence(const std::string& path, const Correspondence& corr) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  for (int t : corr.map) out << t << "\n";
}

Correspondence load_correspondence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  Correspondence corr;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream row(line);
    int t = 0;
    if (!(row >> t) || t < kUnmatched)
      throw ParseError(path + ": bad index at line " + std::to_string(lineno));
    corr.map.push_back(t);
  }
  return corr;
}

std::vector<std::pair<int, int>> load_landmarks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::pair<int, int>> pairs;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream row(line);
    int s = 0, t = 0;
    if (!(row >> s >> t) || s < 0 || t < 0)
      throw ParseError(path + ": bad landmark pair at line " + std::to_string(lineno));
    pairs.emplace_back(s, t);
  }
  return pairs;
}

}  // namespace dirmatch
