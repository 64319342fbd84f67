#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>
#include <vector>

#include "cm/tournaments.hpp"

namespace cm::tour {

namespace {

void require_odd(int n, const char* who) {
  require(n >= 1 && n % 2 == 1, std::string(who) + ": n must be odd and positive (even n has no regular tournament)");
}

class Recursion {
 public:
  explicit Recursion(std::uint64_t max_states) : max_states_(max_states) {}

  // need is sorted descending. The first vertex beats need[0] of the rest;
  // every vertex it does not beat spends one unit of its own need on it.
  BigInt count(const std::vector<int>& need) {
    if (need.empty()) return 1;
    if (auto it = memo_.find(need); it != memo_.end()) return it->second;
    if (memo_.size() >= max_states_)
      throw BudgetExceeded("rt_exact: memo table reached " + std::to_string(max_states_) + " states");
    const int wins = need[0];
    const int m = static_cast<int>(need.size()) - 1;
    // Classes of equal need among the others, in order.
    std::vector<std::pair<int, int>> cls;  // (value, multiplicity)
    for (int i = 1; i <= m; ++i) {
      if (!cls.empty() && cls.back().first == need[i])
        ++cls.back().second;
      else
        cls.emplace_back(need[i], 1);
    }
    BigInt total = 0;
    if (wins <= m) {
      std::vector<int> beaten(cls.size(), 0);
      recurse(cls, beaten, 0, wins, 1, total);
    }
    memo_.emplace(need, total);
    return total;
  }

 private:
  void recurse(const std::vector<std::pair<int, int>>& cls, std::vector<int>& beaten, std::size_t ci, int left,
               const BigInt& mult, BigInt& total) {
    if (ci == cls.size()) {
      if (left != 0) return;
      std::vector<int> next;
      for (std::size_t c = 0; c < cls.size(); ++c) {
        const auto [val, mult_c] = cls[c];
        for (int i = 0; i < beaten[c]; ++i) next.push_back(val);
        for (int i = beaten[c]; i < mult_c; ++i) {
          if (val == 0) return;  // it would need to beat the first vertex
          next.push_back(val - 1);
        }
      }
      std::sort(next.rbegin(), next.rend());
      total += mult * count(next);
      return;
    }
    const auto [val, m] = cls[ci];
    for (int k = 0; k <= std::min(m, left); ++k) {
      beaten[ci] = k;
      recurse(cls, beaten, ci + 1, left - k, mult * binomial(m, k), total);
    }
    beaten[ci] = 0;
  }

  static BigInt binomial(int m, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
  }

  std::uint64_t max_states_;
  std::map<std::vector<int>, BigInt> memo_;
};

}  // namespace

double rt_log_asymptotic(int n) {
  require_odd(n, "rt_asymptotic");
  require(n >= 3, "rt_asymptotic: n must be at least 3");
  const double dn = n;
  return 0.5 * (dn - 1) * ((dn + 1) * std::log(2.0) - std::log(std::numbers::pi * dn)) + 0.5 * std::log(dn) - 0.5;
}

double rt_asymptotic(int n) { return std::exp(rt_log_asymptotic(n)); }

BigInt rt_exact(int n, std::uint64_t max_states) {
  require_odd(n, "rt_exact");
  Recursion rec(max_states);
  return rec.count(std::vector<int>(n, (n - 1) / 2));
}

std::uint64_t rt_brute_force(int n, int threads) {
  require_odd(n, "rt_brute_force");
  require(n <= 7, "rt_brute_force: n must be at most 7");
  threads = std::max(1, threads);
  const int E = n * (n - 1) / 2;
  // Bit e set means the lower-numbered endpoint of pair e wins.
  std::vector<std::uint32_t> win(n, 0), lose(n, 0);
  for (int j = 0, e = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k, ++e) {
      win[j] |= 1u << e;
      lose[k] |= 1u << e;
    }
  const std::uint64_t total = 1ull << E;
  const int half = (n - 1) / 2;
  std::vector<std::uint64_t> part(threads, 0);
  auto work = [&](int t) {
    const std::uint64_t lo = total * t / threads, hi = total * (t + 1) / threads;
    const std::uint32_t all = static_cast<std::uint32_t>(total - 1);
    std::uint64_t c = 0;
    for (std::uint64_t m = lo; m < hi; ++m) {
      const auto mask = static_cast<std::uint32_t>(m);
      bool ok = true;
      for (int v = 0; v < n && ok; ++v)
        ok = std::popcount(mask & win[v]) + std::popcount(~mask & all & lose[v]) == half;
      c += ok;
    }
    part[t] = c;
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  std::uint64_t sum = 0;
  for (auto c : part) sum += c;
  return sum;
}

TournamentCount tournament_count(int n, bool with_exact) {
  TournamentCount out;
  out.n = n;
  out.asymptotic = rt_asymptotic(n);
  if (with_exact) {
    out.exact = rt_exact(n);
    out.ratio = out.asymptotic / out.exact->convert_to<double>();
  }
  return out;
}

}  // namespace cm::tour
