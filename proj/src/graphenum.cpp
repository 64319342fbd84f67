#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "cm/graphenum.hpp"

namespace cm::graphs {

namespace {

double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

int partners(const DegreeSequence& d, int v) {
  if (!d.bipartite()) return d.n() - 1;
  return d.part(v) == 0 ? d.bipartition->second : d.bipartition->first;
}

// Appends the first tight or violated inequality to the witness.
struct Ledger {
  Feasibility& out;
  void check(long lhs, long rhs, const std::string& label) {
    if (lhs > rhs) {
      out.feasible = false;
      out.strict_interior = false;
      if (out.witness.empty() || out.witness.find("violated") == std::string::npos)
        out.witness = label + " violated: " + std::to_string(lhs) + " > " + std::to_string(rhs);
    } else if (lhs == rhs) {
      out.strict_interior = false;
      if (out.witness.empty()) out.witness = label + " tight: " + std::to_string(lhs) + " = " + std::to_string(rhs);
    }
  }
};

// Gale-Ryser for rows against cols: for each k, the k largest rows sum to
// at most sum_j min(c_j, k). Strictness is required for 1 <= k < |rows|.
void gale_ryser(std::vector<int> rows, const std::vector<int>& cols, const std::string& name, Ledger& led) {
  std::sort(rows.rbegin(), rows.rend());
  long prefix = 0;
  for (std::size_t k = 1; k <= rows.size(); ++k) {
    prefix += rows[k - 1];
    long rhs = 0;
    for (int c : cols) rhs += std::min<long>(c, static_cast<long>(k));
    if (k < rows.size()) {
      led.check(prefix, rhs, name + " k=" + std::to_string(k));
    } else if (prefix > rhs) {
      led.check(prefix, rhs, name + " k=" + std::to_string(k));
    }
  }
}

}  // namespace

void DegreeSequence::validate() const {
  require(n() >= 2, "degree sequence needs at least two vertices");
  if (bipartite()) {
    const auto [n1, n2] = *bipartition;
    require(n1 >= 1 && n2 >= 1 && n1 + n2 == n(), "bipartition must split the vertices into two nonempty parts");
  }
  for (int v = 0; v < n(); ++v) {
    require(d[v] >= 0, "degrees must be nonnegative");
    require(d[v] <= partners(*this, v), "degree " + std::to_string(d[v]) + " of vertex " + std::to_string(v) +
                                            " exceeds the number of possible neighbours");
  }
}

void ConstraintPair::validate(const DegreeSequence& d) const {
  std::set<Edge> seen;
  auto scan = [&](const std::vector<Edge>& es, const char* name) {
    for (auto [j, k] : es) {
      require(j != k, std::string(name) + ": loops are not allowed");
      require(j >= 0 && k >= 0 && j < d.n() && k < d.n(), std::string(name) + ": vertex out of range");
      require(d.relevant(j, k), std::string(name) + ": pair {" + std::to_string(j) + "," + std::to_string(k) +
                                    "} lies inside a part of the bipartition");
      require(seen.insert(make_edge(j, k)).second,
              std::string(name) + ": pair {" + std::to_string(j) + "," + std::to_string(k) +
                  "} is repeated or appears in both H+ and H-");
    }
  };
  scan(plus, "H+");
  scan(minus, "H-");
}

HStats ConstraintPair::stats(int n) const {
  HStats h;
  h.s.assign(n, 0);
  for (const auto* es : {&plus, &minus})
    for (auto [j, k] : *es) {
      ++h.s[j];
      ++h.s[k];
    }
  for (int x : h.s) {
    h.s_max = std::max(h.s_max, x);
    h.S += 0.5 * x;
    h.S2 += static_cast<double>(x) * x;
  }
  return h;
}

Feasibility feasibility_check(const DegreeSequence& d) {
  d.validate();
  Feasibility out{true, true, ""};
  Ledger led{out};
  const int n = d.n();
  if (!d.bipartite()) {
    const long total = std::accumulate(d.d.begin(), d.d.end(), 0L);
    if (total % 2 != 0) {
      out.feasible = out.strict_interior = false;
      out.witness = "degree sum " + std::to_string(total) + " is odd";
      return out;
    }
    std::vector<int> s = d.d;
    std::sort(s.rbegin(), s.rend());
    long prefix = 0;
    for (int k = 1; k <= n; ++k) {
      prefix += s[k - 1];
      long rhs = static_cast<long>(k) * (k - 1);
      for (int i = k; i < n; ++i) rhs += std::min(s[i], k);
      led.check(prefix, rhs, "Erdos-Gallai k=" + std::to_string(k));
    }
  } else {
    const int n1 = d.bipartition->first;
    std::vector<int> r(d.d.begin(), d.d.begin() + n1), c(d.d.begin() + n1, d.d.end());
    const long sr = std::accumulate(r.begin(), r.end(), 0L), sc = std::accumulate(c.begin(), c.end(), 0L);
    if (sr != sc) {
      out.feasible = out.strict_interior = false;
      out.witness = "part sums differ: " + std::to_string(sr) + " != " + std::to_string(sc);
      return out;
    }
    gale_ryser(r, c, "Gale-Ryser (rows)", led);
    gale_ryser(c, r, "Gale-Ryser (columns)", led);
  }
  for (int v = 0; v < n && out.strict_interior; ++v) {
    if (d.d[v] == 0 || d.d[v] == partners(d, v)) {
      out.strict_interior = false;
      if (out.witness.empty())
        out.witness = "vertex " + std::to_string(v) + " has extreme degree " + std::to_string(d.d[v]);
    }
  }
  return out;
}

Eigen::MatrixXd lambda_from_beta(const DegreeSequence& d, const Eigen::VectorXd& beta) {
  const int n = d.n();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (d.relevant(j, k)) L(j, k) = L(k, j) = logistic(beta(j) + beta(k));
  return L;
}

SaddleSolution solve_saddle(const DegreeSequence& d, const SaddleOptions& opt) {
  const auto feas = feasibility_check(d);
  require(feas.strict_interior, "solve_saddle: degree sequence is not in the strict interior (" + feas.witness + ")");
  const int n = d.n();
  const bool bip = d.bipartite();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (bip)
    for (int v = 0; v < n; ++v) w(v) = d.part(v) == 0 ? -1.0 : 1.0;
  Eigen::VectorXd dv(n);
  for (int v = 0; v < n; ++v) dv(v) = d.d[v];

  Eigen::VectorXd beta(n);
  for (int v = 0; v < n; ++v) beta(v) = 0.5 * logit(static_cast<double>(d.d[v]) / partners(d, v));

  auto residual_of = [&](const Eigen::VectorXd& b, Eigen::MatrixXd& L) {
    L = lambda_from_beta(d, b);
    return Eigen::VectorXd(L.rowwise().sum() - dv);
  };
  auto gauge = [&](Eigen::VectorXd& b) {
    if (!bip) return;
    double s1 = 0, s2 = 0;
    for (int v = 0; v < n; ++v) (d.part(v) == 0 ? s1 : s2) += b(v);
    b += ((s1 - s2) / n) * w;
  };
  gauge(beta);

  const double tol = 1e-10 * n;
  Eigen::MatrixXd L;
  Eigen::VectorXd F = residual_of(beta, L);
  double res = F.cwiseAbs().maxCoeff();
  int it = 0, polish = 0;
  while (it < opt.max_iterations) {
    if (res <= tol && ++polish > 3) break;
    ++it;
    const Eigen::MatrixXd V = L.cwiseProduct(Eigen::MatrixXd::Ones(n, n) - L);
    Eigen::MatrixXd J = V;
    J.diagonal() = V.rowwise().sum();
    if (bip) J += w * w.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(J);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd step = llt.solve(-F);
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h, t *= 0.5) {
      Eigen::VectorXd cand = beta + t * step;
      gauge(cand);
      Eigen::MatrixXd Lc;
      Eigen::VectorXd Fc = residual_of(cand, Lc);
      const double rc = Fc.cwiseAbs().maxCoeff();
      if (std::isfinite(rc) && rc < res) {
        beta = cand;
        L = Lc;
        F = Fc;
        res = rc;
        improved = true;
        break;
      }
    }
    if (!improved) break;  // stalled at rounding level or diverging
  }
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "solve_saddle: Newton did not converge after " << it << " iterations (residual " << res << ")";
    throw ConvergenceError(os.str());
  }

  SaddleSolution sol;
  sol.mode = bip ? Mode::Bipartite : Mode::General;
  sol.beta = beta;
  sol.lambda = L;
  sol.residual = res;
  sol.iterations = it;
  double delta = 0.5;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (d.relevant(j, k)) delta = std::min({delta, L(j, k), 1.0 - L(j, k)});
  sol.delta_tame = delta;
  return sol;
}

TamenessReport tameness_report(const SaddleSolution& sol, const DegreeSequence& d,
                               std::optional<std::pair<double, double>> alpha_beta,
                               std::optional<std::pair<double, double>> p_q) {
  TamenessReport rep;
  rep.delta = sol.delta_tame;
  const int n = d.n();
  if (d.bipartite()) {
    rep.delta = std::min({rep.delta, static_cast<double>(d.bipartition->first) / n,
                          static_cast<double>(d.bipartition->second) / n});
  }
  if (alpha_beta) {
    const auto [a, b] = *alpha_beta;
    bool ok = !d.bipartite() && 0 < a && a < b && b < 1 && (a + b) * (a + b) < 4 * a;
    for (int v = 0; ok && v < n; ++v) ok = a * (n - 1) < d.d[v] && d.d[v] < b * (n - 1);
    rep.sufficient_general = ok;
  }
  if (p_q) {
    const auto [p, q] = *p_q;
    bool ok = d.bipartite() && 0 < q * q && q * q < p && p <= q && q < 1;
    if (ok) {
      const auto [n1, n2] = *d.bipartition;
      long s1 = 0, s2 = 0;
      for (int v = 0; v < n; ++v) {
        const bool left = d.part(v) == 0;
        (left ? s1 : s2) += d.d[v];
        const double opp = left ? n2 : n1;
        ok = ok && p * opp <= d.d[v] && d.d[v] <= q * opp;
      }
      ok = ok && s1 == s2;
    }
    rep.sufficient_bipartite = ok;
  }
  return rep;
}

}  // namespace cm::graphs
