#pragma once

// Exhaustive references shared by the tests: every labelled graph (or
// bipartite adjacency matrix) is visited once.

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace brute {

using Edge = std::pair<int, int>;

inline std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> out;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) out.emplace_back(j, k);
  return out;
}

// Calls visit(edge list) for each graph on the candidate pairs whose degrees
// match d, contains every pair in plus and none in minus.
template <typename F>
std::uint64_t enumerate(const std::vector<int>& d, const std::vector<Edge>& pairs, const std::vector<Edge>& plus,
                        const std::vector<Edge>& minus, F&& visit) {
  const int n = static_cast<int>(d.size());
  const std::set<Edge> P(plus.begin(), plus.end()), M(minus.begin(), minus.end());
  const std::size_t m = pairs.size();
  std::uint64_t count = 0;
  std::vector<int> deg(n);
  std::vector<Edge> g;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    std::fill(deg.begin(), deg.end(), 0);
    bool ok = true;
    g.clear();
    for (std::size_t e = 0; e < m && ok; ++e) {
      const bool on = mask >> e & 1ull;
      if (on && M.count(pairs[e])) ok = false;
      if (!on && P.count(pairs[e])) ok = false;
      if (on) {
        ++deg[pairs[e].first];
        ++deg[pairs[e].second];
        g.push_back(pairs[e]);
      }
    }
    if (ok && deg == d) {
      ++count;
      visit(g);
    }
  }
  return count;
}

inline std::uint64_t count(const std::vector<int>& d, const std::vector<Edge>& plus = {},
                           const std::vector<Edge>& minus = {}) {
  return enumerate(d, all_pairs(static_cast<int>(d.size())), plus, minus, [](const auto&) {});
}

inline std::uint64_t count_bipartite(const std::vector<int>& d, int n1, const std::vector<Edge>& plus = {},
                                     const std::vector<Edge>& minus = {}) {
  std::vector<Edge> cross;
  for (int j = 0; j < n1; ++j)
    for (int k = n1; k < static_cast<int>(d.size()); ++k) cross.emplace_back(j, k);
  return enumerate(d, cross, plus, minus, [](const auto&) {});
}

}  // namespace brute
