#pragma once

// Exact ground truth for the enumeration formulas: counts of graphs (or
// bipartite graphs) with given degrees that contain H+ and avoid H-,
// exactly uniform sampling by unranking, beta-model sampling, and the
// concentration / moment-ratio experiment.

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "cm/graphenum.hpp"

namespace cm::oracle {

using BigInt = boost::multiprecision::cpp_int;
using graphs::Edge;
using EdgeSet = std::vector<Edge>;  // sorted, each edge with first < second

struct CountBudget {
  std::uint64_t max_expansions = 200'000'000;  // distinct states expanded
  std::size_t max_memo = 20'000'000;           // memoized states retained
};

struct GraphCountQuery {
  graphs::DegreeSequence d;
  graphs::ConstraintPair H;
  CountBudget budget;
};

// Exact count. Throws BudgetExceeded with the progress made so far.
BigInt exact_count(const GraphCountQuery& q);

// Exactly uniform samples over the graphs counted by exact_count, drawn by
// unranking uniform ranks in [0, N). Throws PreconditionError if N = 0.
std::vector<EdgeSet> uniform_sample(const GraphCountQuery& q, int count, std::uint64_t seed);

// The graph with a given rank, 0 <= rank < exact_count(q). Ranks follow
// the counting recursion, so every graph has exactly one rank.
EdgeSet unrank(const GraphCountQuery& q, const BigInt& rank);

// Independent Bernoulli(lambda_jk) edges for j < k.
std::vector<EdgeSet> beta_model_sample(const Eigen::MatrixXd& lambda, int count, std::uint64_t seed);

struct ConcentrationConfig {
  graphs::DegreeSequence d;
  std::vector<Edge> Y;
  std::vector<double> gammas{2.0};
  int trials = 10'000;
  std::uint64_t seed = 1;
  int max_moment = 6;
  CountBudget budget;
};

struct GammaRow {
  double gamma = 0.0;
  double empirical = 0.0;  // fraction with |X - E Xhat| <= gamma |Y|^{1/2}
  double tail_form = 0.0;  // e^{-2 gamma min(gamma, n^{1/6} (log n)^{-3})}
  // Smallest constant in 1 - c e^{...} consistent with the sample.
  double implied_constant = 0.0;
};

struct ConcentrationReport {
  double mean_hat = 0.0;  // E Xhat, exact
  double mean_x = 0.0;    // sample mean of X
  std::vector<GammaRow> rows;
  std::vector<std::uint64_t> histogram;  // counts of X = 0..|Y|
  std::vector<double> hat_pmf;           // exact law of Xhat on 0..|Y|
  std::vector<double> moment_ratio;      // m = 1..max_moment: sample E X^m / exact E Xhat^m
  double lemma_moment_range = 0.0;       // |Y|^{1/2} n^{1/6} / (log n)^3, i.e. b = 1
  double bv_fraction = 0.0;              // samples inside (1 +- delta n^{-1/2} log n) E Xhat
  double delta = 0.0;                    // tameness of d, used in the line above
  BigInt population;                     // number of graphs sampled from
};

ConcentrationReport concentration_experiment(const ConcentrationConfig& cfg);

}  // namespace cm::oracle
