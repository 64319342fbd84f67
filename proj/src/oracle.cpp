#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cm/oracle.hpp"

namespace cm::oracle {

namespace {

using graphs::DegreeSequence;
using graphs::make_edge;

std::uint64_t binom(int m, int k) {
  if (k < 0 || k > m) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(m - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// k-subset of {0..m-1} with lexicographic index idx.
std::vector<int> unrank_subset(int m, int k, std::uint64_t idx) {
  std::vector<int> out;
  int next = 0;
  while (k > 0) {
    const std::uint64_t with = binom(m - next - 1, k - 1);
    if (idx < with) {
      out.push_back(next);
      --k;
    } else {
      idx -= with;
    }
    ++next;
  }
  return out;
}

BigInt uniform_below(const BigInt& N, std::mt19937_64& gen) {
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(N)) + 1;
  const BigInt mask = (BigInt(1) << bits) - 1;
  for (;;) {
    BigInt x = 0;
    for (unsigned b = 0; b < bits; b += 64) {
      x <<= 64;
      x |= BigInt(gen());
    }
    x &= mask;
    if (x < N) return x;
  }
}

// One step of the recursion: the pivot takes its forced partners, a subset
// of its free constrained partners, and k_c members of each class of
// exchangeable unconstrained candidates.
struct Choice {
  std::uint64_t mult = 1;
  std::vector<int> partners;  // labelled partners (forced and chosen), class members excluded
  std::vector<std::vector<int>> classes;
  std::vector<int> take;  // k_c per class
};

class Engine {
 public:
  explicit Engine(const GraphCountQuery& q) : d_(q.d), budget_(q.budget) {
    d_.validate();
    q.H.validate(d_);
    n_ = d_.n();
    bip_ = d_.bipartite();
    status_.assign(n_, std::vector<signed char>(n_, 0));
    special_.assign(n_, 0);
    for (auto [j, k] : q.H.plus) {
      status_[j][k] = status_[k][j] = 1;
      special_[j] = special_[k] = 1;
    }
    for (auto [j, k] : q.H.minus) {
      status_[j][k] = status_[k][j] = -1;
      special_[j] = special_[k] = 1;
    }
    for (int v = 0; v < n_; ++v) {
      if (!special_[v]) continue;
      special_list_.push_back(v);
      if (!bip_ || d_.part(v) == 0) pivots_.push_back(v);
    }
    pivot_rank_.assign(n_, -1);
    for (std::size_t i = 0; i < pivots_.size(); ++i) pivot_rank_[pivots_[i]] = static_cast<int>(i);
  }

  BigInt count() {
    std::vector<int> r = d_.d;
    return count_state(r, 0);
  }

  EdgeSet unrank(BigInt rank) {
    const BigInt total = count();
    require(rank >= 0 && rank < total, "unrank: rank out of range");
    std::vector<int> r = d_.d;
    int pos = 0;
    EdgeSet edges;
    for (;;) {
      const int v = pivot(r, pos);
      if (v < 0) break;
      const int next_pos = pos < static_cast<int>(pivots_.size()) ? pos + 1 : pos;
      std::vector<int> chosen;
      bool done = false;
      enumerate(r, pos, v, [&](const Choice& c, std::vector<int>& nr) {
        const BigInt sub = count_state(nr, next_pos);
        const BigInt block = sub * c.mult;
        if (rank >= block) {
          rank -= block;
          return false;
        }
        BigInt idx = rank / sub;
        rank %= sub;
        chosen = c.partners;
        for (std::size_t ci = 0; ci < c.classes.size(); ++ci) {
          const int m = static_cast<int>(c.classes[ci].size());
          const std::uint64_t ways = binom(m, c.take[ci]);
          const auto local = static_cast<std::uint64_t>(idx % ways);
          idx /= ways;
          for (int s : unrank_subset(m, c.take[ci], local)) chosen.push_back(c.classes[ci][s]);
        }
        done = true;
        return true;
      });
      require(done, "unrank: internal inconsistency");
      r[v] = 0;
      for (int u : chosen) {
        --r[u];
        edges.push_back(make_edge(v, u));
      }
      pos = next_pos;
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  }

 private:
  // Next pivot, or -1 when nothing is left to place.
  int pivot(const std::vector<int>& r, int pos) const {
    if (pos < static_cast<int>(pivots_.size())) return pivots_[pos];
    int best = -1;
    for (int v = 0; v < n_; ++v) {
      if (special_[v] || r[v] == 0 || (bip_ && d_.part(v) != 0)) continue;
      if (best < 0 || r[v] > r[best]) best = v;
    }
    return best;
  }

  bool unpivoted_special(int u, int pos) const {
    return special_[u] && (pivot_rank_[u] < 0 || pivot_rank_[u] >= pos);
  }

  // Calls visit(choice, next residuals) in a fixed order; stops when visit
  // returns true.
  void enumerate(const std::vector<int>& r, int pos, int v,
                 const std::function<bool(const Choice&, std::vector<int>&)>& visit) const {
    std::vector<int> forced, optional;
    std::map<int, std::vector<int>, std::greater<>> groups;
    for (int u = 0; u < n_; ++u) {
      if (u == v || (bip_ && d_.part(u) == d_.part(v))) continue;
      if (special_[u]) {
        if (!unpivoted_special(u, pos) || u == v) continue;
        const int st = status_[v][u];
        if (st == 1) {
          if (r[u] == 0) return;
          forced.push_back(u);
        } else if (st == 0 && r[u] > 0) {
          optional.push_back(u);
        }
      } else if (r[u] > 0) {
        groups[r[u]].push_back(u);
      }
    }
    const int need = r[v] - static_cast<int>(forced.size());
    if (need < 0) return;
    int pool = static_cast<int>(optional.size());
    std::vector<std::vector<int>> classes;
    for (auto& [val, mem] : groups) {
      pool += static_cast<int>(mem.size());
      classes.push_back(mem);
    }
    if (need > pool) return;
    if (optional.size() > 24) throw BudgetExceeded("exact_count: too many constrained partners for one vertex");

    Choice c;
    c.classes = classes;
    c.take.assign(classes.size(), 0);
    std::vector<int> nr;
    bool stop = false;
    const std::uint32_t masks = 1u << optional.size();
    for (std::uint32_t mask = 0; mask < masks && !stop; ++mask) {
      const int t = __builtin_popcount(mask);
      if (t > need) continue;
      c.partners = forced;
      for (std::size_t i = 0; i < optional.size(); ++i)
        if (mask >> i & 1u) c.partners.push_back(optional[i]);
      std::function<void(std::size_t, int, std::uint64_t)> rec = [&](std::size_t ci, int left, std::uint64_t mult) {
        if (stop) return;
        if (ci == classes.size()) {
          if (left != 0) return;
          nr = r;
          nr[v] = 0;
          for (int u : c.partners) --nr[u];
          for (std::size_t k = 0; k < classes.size(); ++k)
            for (int s = 0; s < c.take[k]; ++s) --nr[classes[k][s]];
          c.mult = mult;
          stop = visit(c, nr);
          return;
        }
        int rest = 0;
        for (std::size_t k = ci + 1; k < classes.size(); ++k) rest += static_cast<int>(classes[k].size());
        const int m = static_cast<int>(classes[ci].size());
        for (int k = std::max(0, left - rest); k <= std::min(m, left); ++k) {
          c.take[ci] = k;
          rec(ci + 1, left - k, mult * binom(m, k));
        }
        c.take[ci] = 0;
      };
      rec(0, need - t, 1);
    }
  }

  std::vector<int> key(const std::vector<int>& r, int pos) const {
    std::vector<int> k{pos, -2};
    for (int s : special_list_) k.push_back(r[s]);
    for (int side = 0; side < (bip_ ? 2 : 1); ++side) {
      k.push_back(-2);
      std::vector<int> rest;
      for (int v = 0; v < n_; ++v)
        if (!special_[v] && r[v] > 0 && (!bip_ || d_.part(v) == side)) rest.push_back(r[v]);
      std::sort(rest.rbegin(), rest.rend());
      k.insert(k.end(), rest.begin(), rest.end());
    }
    return k;
  }

  // Necessary conditions ignoring H: the residual sequence must be
  // graphical (Erdos-Gallai) or bigraphical (Gale-Ryser).
  bool plausible(const std::vector<int>& r) const {
    if (!bip_) {
      std::vector<int> s;
      long total = 0;
      for (int x : r)
        if (x > 0) {
          s.push_back(x);
          total += x;
        }
      if (total % 2) return false;
      std::sort(s.rbegin(), s.rend());
      const int m = static_cast<int>(s.size());
      long prefix = 0;
      for (int k = 1; k <= m; ++k) {
        prefix += s[k - 1];
        long rhs = static_cast<long>(k) * (k - 1);
        for (int i = k; i < m; ++i) rhs += std::min(s[i], k);
        if (prefix > rhs) return false;
      }
      return true;
    }
    std::vector<int> rows, cols;
    long sr = 0, sc = 0;
    for (int v = 0; v < n_; ++v) {
      if (r[v] == 0) continue;
      if (d_.part(v) == 0) {
        rows.push_back(r[v]);
        sr += r[v];
      } else {
        cols.push_back(r[v]);
        sc += r[v];
      }
    }
    if (sr != sc) return false;
    std::sort(rows.rbegin(), rows.rend());
    long prefix = 0;
    for (std::size_t k = 1; k <= rows.size(); ++k) {
      prefix += rows[k - 1];
      long rhs = 0;
      for (int c : cols) rhs += std::min<long>(c, static_cast<long>(k));
      if (prefix > rhs) return false;
    }
    return true;
  }

  BigInt count_state(const std::vector<int>& r, int pos) {
    const int v = pivot(r, pos);
    if (v < 0) return std::all_of(r.begin(), r.end(), [](int x) { return x == 0; }) ? 1 : 0;
    auto k = key(r, pos);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    if (++expansions_ > budget_.max_expansions || memo_.size() >= budget_.max_memo) {
      std::ostringstream os;
      os << "exact_count: budget exhausted after " << expansions_ - 1 << " state expansions (" << memo_.size()
         << " memoized states)";
      throw BudgetExceeded(os.str());
    }
    BigInt total = 0;
    if (plausible(r)) {
      const int next_pos = pos < static_cast<int>(pivots_.size()) ? pos + 1 : pos;
      enumerate(r, pos, v, [&](const Choice& c, std::vector<int>& nr) {
        const BigInt sub = count_state(nr, next_pos);
        if (sub != 0) total += sub * c.mult;
        return false;
      });
    }
    memo_.emplace(std::move(k), total);
    return total;
  }

  DegreeSequence d_;
  CountBudget budget_;
  int n_ = 0;
  bool bip_ = false;
  std::vector<std::vector<signed char>> status_;
  std::vector<char> special_;
  std::vector<int> special_list_;
  std::vector<int> pivots_;
  std::vector<int> pivot_rank_;
  std::map<std::vector<int>, BigInt> memo_;
  std::uint64_t expansions_ = 0;
};

}  // namespace

BigInt exact_count(const GraphCountQuery& q) {
  Engine e(q);
  return e.count();
}

EdgeSet unrank(const GraphCountQuery& q, const BigInt& rank) {
  Engine e(q);
  return e.unrank(rank);
}

std::vector<EdgeSet> uniform_sample(const GraphCountQuery& q, int count, std::uint64_t seed) {
  require(count >= 0, "uniform_sample: count must be nonnegative");
  Engine e(q);
  const BigInt N = e.count();
  require(N > 0, "uniform_sample: no graph has these degrees and constraints");
  std::mt19937_64 gen(substream_seed(seed, "uniform_sample"));
  std::vector<EdgeSet> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(e.unrank(uniform_below(N, gen)));
  return out;
}

std::vector<EdgeSet> beta_model_sample(const Eigen::MatrixXd& lambda, int count, std::uint64_t seed) {
  require(lambda.rows() == lambda.cols(), "beta_model_sample: lambda must be square");
  require(count >= 0, "beta_model_sample: count must be nonnegative");
  const int n = static_cast<int>(lambda.rows());
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      require(lambda(j, k) >= 0.0 && lambda(j, k) <= 1.0, "beta_model_sample: lambda entries must lie in [0, 1]");
  std::mt19937_64 gen(substream_seed(seed, "beta_model"));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EdgeSet> out(count);
  for (auto& g : out)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (u(gen) < lambda(j, k)) g.emplace_back(j, k);
  return out;
}

ConcentrationReport concentration_experiment(const ConcentrationConfig& cfg) {
  require(cfg.trials > 0, "concentration_experiment: trials must be positive");
  require(cfg.max_moment >= 0, "concentration_experiment: max_moment must be nonnegative");
  for (double g : cfg.gammas) require(g > 0, "concentration_experiment: gamma must be positive");
  graphs::ConstraintPair ycheck;
  ycheck.plus = cfg.Y;
  ycheck.validate(cfg.d);  // rejects loops, repeats and within-part pairs

  ConcentrationReport rep;
  const int n = cfg.d.n();
  const std::size_t ny = cfg.Y.size();
  std::set<Edge> yset;
  for (auto [j, k] : cfg.Y) yset.insert(make_edge(j, k));

  const auto sol = graphs::solve_saddle(cfg.d);
  rep.delta = sol.delta_tame;
  rep.hat_pmf.assign(ny + 1, 0.0);
  rep.hat_pmf[0] = 1.0;
  for (const auto& e : yset) {
    const double l = sol.lambda(e.first, e.second);
    rep.mean_hat += l;
    for (std::size_t x = ny; x >= 1; --x) rep.hat_pmf[x] = rep.hat_pmf[x] * (1 - l) + rep.hat_pmf[x - 1] * l;
    rep.hat_pmf[0] *= 1 - l;
  }

  GraphCountQuery q{cfg.d, {}, cfg.budget};
  Engine eng(q);
  rep.population = eng.count();
  require(rep.population > 0, "concentration_experiment: no graph has these degrees");
  std::mt19937_64 gen(substream_seed(cfg.seed, "concentration"));
  rep.histogram.assign(ny + 1, 0);
  for (int t = 0; t < cfg.trials; ++t) {
    const EdgeSet g = eng.unrank(uniform_below(rep.population, gen));
    std::size_t x = 0;
    for (const auto& e : g) x += yset.count(e);
    ++rep.histogram[x];
  }

  const double T = cfg.trials, sy = std::sqrt(static_cast<double>(ny));
  for (std::size_t x = 0; x <= ny; ++x) rep.mean_x += x * (rep.histogram[x] / T);
  const double ln = std::log(static_cast<double>(n));
  const double cap = std::pow(n, 1.0 / 6.0) / (ln * ln * ln);
  for (double g : cfg.gammas) {
    GammaRow row;
    row.gamma = g;
    std::uint64_t inside = 0;
    for (std::size_t x = 0; x <= ny; ++x)
      if (std::abs(static_cast<double>(x) - rep.mean_hat) <= g * sy) inside += rep.histogram[x];
    row.empirical = inside / T;
    row.tail_form = std::exp(-2 * g * std::min(g, cap));
    row.implied_constant = (1 - row.empirical) / row.tail_form;
    rep.rows.push_back(row);
  }
  for (int m = 1; m <= cfg.max_moment; ++m) {
    double ex = 0, eh = 0;
    for (std::size_t x = 0; x <= ny; ++x) {
      const double xm = std::pow(static_cast<double>(x), m);
      ex += xm * (rep.histogram[x] / T);
      eh += xm * rep.hat_pmf[x];
    }
    rep.moment_ratio.push_back(eh > 0 ? ex / eh : (ex == 0 ? 1.0 : INFINITY));
  }
  rep.lemma_moment_range = sy * std::pow(n, 1.0 / 6.0) / (ln * ln * ln);
  const double band = rep.delta * ln / std::sqrt(static_cast<double>(n));
  std::uint64_t in_band = 0;
  for (std::size_t x = 0; x <= ny; ++x)
    if (x >= (1 - band) * rep.mean_hat && x <= (1 + band) * rep.mean_hat) in_band += rep.histogram[x];
  rep.bv_fraction = in_band / T;
  return rep;
}

}  // namespace cm::oracle
