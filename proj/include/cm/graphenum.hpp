#pragma once

// Degree-sequence feasibility, the beta-model saddle point, and the
// asymptotic formulas for N_H(d) and P_H(d) in the general and bipartite
// settings. Vertices are 0-based; in bipartite mode V1 = [0, n1) and
// V2 = [n1, n).

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cm/common.hpp"
#include "cm/gaussian.hpp"
#include "cm/polynomial.hpp"

namespace cm::graphs {

using Edge = std::pair<int, int>;  // stored with first < second

inline Edge make_edge(int j, int k) { return j < k ? Edge{j, k} : Edge{k, j}; }

struct DegreeSequence {
  std::vector<int> d;
  std::optional<std::pair<int, int>> bipartition;  // (n1, n2)

  int n() const { return static_cast<int>(d.size()); }
  bool bipartite() const { return bipartition.has_value(); }
  // 0 for V1, 1 for V2; always 0 in general mode.
  int part(int v) const { return bipartite() && v >= bipartition->first ? 1 : 0; }
  // Pairs that may carry an edge: all pairs, or cross pairs when bipartite.
  bool relevant(int j, int k) const { return j != k && (!bipartite() || part(j) != part(k)); }
  // Throws PreconditionError when a structural invariant fails.
  void validate() const;
};

struct HStats {
  std::vector<int> s;  // incidence counts in H+ and H-
  int s_max = 0;
  double S = 0.0;
  double S2 = 0.0;
};

struct ConstraintPair {
  std::vector<Edge> plus;
  std::vector<Edge> minus;

  bool empty() const { return plus.empty() && minus.empty(); }
  // Loops, duplicates, overlap of H+ with H-, out-of-range vertices and,
  // in bipartite mode, within-part pairs are all rejected.
  void validate(const DegreeSequence& d) const;
  HStats stats(int n) const;
};

struct Feasibility {
  bool feasible = false;
  bool strict_interior = false;
  std::string witness;  // first failing or tight inequality, empty if none
};

// Erdos-Gallai (general) or Gale-Ryser (bipartite) evaluation. The strict
// interior additionally needs 0 < d_j < (number of possible partners).
Feasibility feasibility_check(const DegreeSequence& d);

enum class Mode { General, Bipartite };

struct SaddleSolution {
  Mode mode = Mode::General;
  Eigen::VectorXd beta;
  Eigen::MatrixXd lambda;  // zero on the diagonal and on within-part pairs
  double residual = 0.0;   // max_j |sum_k lambda_jk - d_j|
  double delta_tame = 0.0;
  int iterations = 0;
};

struct SaddleOptions {
  int max_iterations = 200;
};

// Damped Newton on the saddle-point equations. Bipartite solutions are
// normalized so that sum over V1 of beta equals the sum over V2.
SaddleSolution solve_saddle(const DegreeSequence& d, const SaddleOptions& opt = {});

// Logistic edge probabilities for a given beta (relevant pairs only).
Eigen::MatrixXd lambda_from_beta(const DegreeSequence& d, const Eigen::VectorXd& beta);

struct TamenessReport {
  double delta = 0.0;
  std::optional<bool> sufficient_general;    // needs an (alpha, beta) window
  std::optional<bool> sufficient_bipartite;  // needs a (p, q) window
};

TamenessReport tameness_report(const SaddleSolution& sol, const DegreeSequence& d,
                               std::optional<std::pair<double, double>> alpha_beta = std::nullopt,
                               std::optional<std::pair<double, double>> p_q = std::nullopt);

// f_H restricted to one pair, in the variable y = theta_j + theta_k:
// i c1 y + c2 y^2 + i c3 y^3 + c4 y^4.
struct PairTerm {
  Edge e;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

struct GraphModel {
  Mode mode = Mode::General;
  gauss::QuadraticForm form;  // A, or A~ + w w^T in bipartite mode
  std::vector<PairTerm> terms;
  HStats stats;
  Eigen::VectorXd w;  // empty in general mode

  gauss::SparsePolynomial polynomial() const;
};

GraphModel build_model(const SaddleSolution& sol, const DegreeSequence& d, const ConstraintPair& H);

// Gaussian moments of f_H under covariance (2 form)^{-1}, by Isserlis
// applied to the pair variables; E Im f_H is zero by symmetry.
struct FStats {
  double E_re = 0.0;
  double E_im_sq = 0.0;
  double var_re = 0.0;
};

FStats f_statistics(const GraphModel& m);

// The existential constants of the enumeration theorems, exposed as
// configuration. Certificates hold for any true constant <= the value set.
struct EnumConstants {
  double c = 1.0;
  double c_prime = 1.0;
  double c1 = 1.0, c2 = 1.0;
  double b1 = 1.0, b2 = 1.0;
  double eps = 0.1;
};

struct EnumEstimate {
  Mode mode = Mode::General;
  double log_count = 0.0;
  double error_radius = 0.0;
  bool hypotheses_hold = false;  // s_max <= c1 n^{1/6} and S2 <= c2 n
  std::map<std::string, double> components;
  SaddleSolution saddle;
};

EnumEstimate estimate_count(const DegreeSequence& d, const ConstraintPair& H, const EnumConstants& k = {});

enum class ProbMode { TwoSided, UpperBound };

struct ProbEstimate {
  ProbMode mode = ProbMode::TwoSided;
  double prob = 0.0;  // product of lambda over H+ and (1 - lambda) over H-
  double error_radius = 0.0;     // two-sided only
  double upper_bound = 0.0;      // upper-bound mode: c' * prob
  bool hypotheses_hold = false;
  std::string caveat;
  HStats stats;
};

ProbEstimate estimate_subgraph_prob(const DegreeSequence& d, const ConstraintPair& H, const EnumConstants& k = {},
                                    ProbMode mode = ProbMode::TwoSided);

}  // namespace cm::graphs
