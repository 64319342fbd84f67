#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "brute.hpp"
#include "cm/oracle.hpp"

using namespace cm;
using namespace cm::oracle;
using graphs::ConstraintPair;
using graphs::DegreeSequence;

namespace {

GraphCountQuery query(std::vector<int> d, std::vector<Edge> plus = {}, std::vector<Edge> minus = {}) {
  GraphCountQuery q;
  q.d.d = std::move(d);
  q.H.plus = std::move(plus);
  q.H.minus = std::move(minus);
  return q;
}

std::uint64_t as_u64(const BigInt& x) { return x.convert_to<std::uint64_t>(); }

std::vector<int> degrees(int n, const EdgeSet& g) {
  std::vector<int> d(n, 0);
  for (auto [j, k] : g) ++d[j], ++d[k];
  return d;
}

// Chi-square goodness of fit against the uniform law on `cells` outcomes.
bool uniform_fit(const std::map<EdgeSet, int>& freq, std::size_t cells, int draws, double alpha) {
  const double expect = double(draws) / cells;
  double stat = (cells - freq.size()) * expect;  // unseen cells
  for (const auto& [g, c] : freq) stat += (c - expect) * (c - expect) / expect;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return stat <= boost::math::quantile(boost::math::complement(dist, alpha));
}

}  // namespace

TEST_CASE("exact count examples") {
  CHECK(exact_count(query({2, 2, 2, 2})) == 3);
  CHECK(exact_count(query({3, 3, 3, 3})) == 1);
  CHECK(exact_count(query({2, 2, 2, 2}, {{0, 1}})) == 2);
  CHECK(exact_count(query({2, 2, 2, 2}, {}, {{0, 1}})) == 1);
  CHECK(exact_count(query({1, 1, 1})) == 0);
  CHECK(exact_count(query({0, 0})) == 1);
  // Values the enumeration formulas are compared against.
  CHECK(exact_count(query(std::vector<int>(8, 4))) == 19355);
  CHECK(exact_count(query(std::vector<int>(10, 5))) == 66462606);
  CHECK(exact_count(query(std::vector<int>(12, 6))) == BigInt("2977635137862"));
}

TEST_CASE("exact count agrees with exhaustive enumeration") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 60; ++t) {
    const int n = 3 + t % 5;  // up to 7 vertices, 2^21 graphs
    if (n == 7 && t % 3) continue;
    std::uniform_int_distribution<int> deg(0, n - 1);
    std::vector<int> d(n);
    for (auto& x : d) x = deg(gen);
    std::vector<Edge> plus, minus;
    const auto pairs = brute::all_pairs(n);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pairs.size()) - 1);
    std::set<Edge> used;
    for (int h = 0; h < t % 4; ++h) {
      const Edge e = pairs[pick(gen)];
      if (!used.insert(e).second) continue;
      (h % 2 ? minus : plus).push_back(e);
    }
    CHECK_MESSAGE(as_u64(exact_count(query(d, plus, minus))) == brute::count(d, plus, minus), "instance ", t);
  }
}

TEST_CASE("count invariances and partition identity") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 12; ++t) {
    const int n = 6 + t % 4;
    std::uniform_int_distribution<int> deg(1, n - 2);
    std::vector<int> d(n);
    for (auto& x : d) x = deg(gen);
    if (std::accumulate(d.begin(), d.end(), 0) % 2) ++d[0] == n - 1 ? d[0] -= 2 : 0;
    const BigInt base = exact_count(query(d));

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> dp(n);
    for (int i = 0; i < n; ++i) dp[i] = d[perm[i]];
    CHECK(exact_count(query(dp)) == base);

    std::vector<int> dc(n);
    for (int i = 0; i < n; ++i) dc[i] = n - 1 - d[i];
    CHECK(exact_count(query(dc)) == base);

    for (const auto& e : brute::all_pairs(n))
      CHECK(exact_count(query(d, {e})) + exact_count(query(d, {}, {e})) == base);
  }
}

TEST_CASE("bipartite counts") {
  auto bq = [](std::vector<int> d, int n1, std::vector<Edge> plus = {}, std::vector<Edge> minus = {}) {
    GraphCountQuery q = query(std::move(d), std::move(plus), std::move(minus));
    q.d.bipartition = std::make_pair(n1, q.d.n() - n1);
    return q;
  };
  CHECK(exact_count(bq({1, 1, 1, 1}, 2)) == 2);
  CHECK(exact_count(bq({2, 2, 2, 2}, 2)) == 1);
  CHECK(exact_count(bq(std::vector<int>(12, 3), 6)) == 297200);  // 6x6 0/1 matrices, margins 3

  std::mt19937_64 gen(44);
  for (int t = 0; t < 25; ++t) {  // 4 + 4: 2^16 matrices each
    std::uniform_int_distribution<int> deg(0, 4);
    std::vector<int> d(8);
    for (auto& x : d) x = deg(gen);
    std::vector<Edge> plus, minus;
    if (t % 3 == 1) plus = {{0, 5}};
    if (t % 3 == 2) minus = {{1, 4}, {2, 7}};
    CHECK(as_u64(exact_count(bq(d, 4, plus, minus))) == brute::count_bipartite(d, 4, plus, minus));
  }
  CHECK_THROWS_AS(exact_count(bq({1, 1, 1, 1}, 2, {{0, 1}})), PreconditionError);
}

TEST_CASE("budget exhaustion is reported") {
  GraphCountQuery q = query(std::vector<int>(14, 7));
  q.budget.max_expansions = 10;
  CHECK_THROWS_AS(exact_count(q), BudgetExceeded);
}

TEST_CASE("unranking is a bijection") {
  for (auto q : {query({2, 2, 2, 2, 2, 2}), query({3, 2, 2, 2, 1, 2}, {{0, 1}}, {{2, 3}}),
                 query({3, 3, 2, 2, 2, 2}, {}, {{4, 5}})}) {
    const auto N = as_u64(exact_count(q));
    std::set<EdgeSet> seen;
    for (std::uint64_t r = 0; r < N; ++r) {
      const EdgeSet g = unrank(q, r);
      CHECK(degrees(q.d.n(), g) == q.d.d);
      for (auto e : q.H.plus) CHECK(std::binary_search(g.begin(), g.end(), e));
      for (auto e : q.H.minus) CHECK_FALSE(std::binary_search(g.begin(), g.end(), e));
      seen.insert(g);
    }
    CHECK(seen.size() == N);
    CHECK(N == brute::count(q.d.d, q.H.plus, q.H.minus));
  }
  CHECK_THROWS_AS(unrank(query({2, 2, 2, 2}), 3), PreconditionError);
}

TEST_CASE("uniform sampling") {
  for (const auto& g : uniform_sample(query({3, 3, 3, 3}), 20, 5)) CHECK(g.size() == 6);

  const auto s = uniform_sample(query({2, 2, 2, 2}), 3000, 11);
  std::map<EdgeSet, int> freq;
  for (const auto& g : s) ++freq[g];
  CHECK(freq.size() == 3);
  const double sigma = std::sqrt(3000 * (1.0 / 3) * (2.0 / 3));
  for (const auto& [g, c] : freq) CHECK(std::abs(c - 1000) <= 3 * sigma);

  const auto a = uniform_sample(query({1, 1, 1, 1}), 50, 99), b = uniform_sample(query({1, 1, 1, 1}), 50, 99);
  CHECK(a == b);
  CHECK(uniform_sample(query({1, 1, 1, 1}), 50, 100) != a);

  // Goodness of fit on instances with at most 50 graphs.
  std::mt19937_64 gen(12);
  int tested = 0;
  for (int t = 0; t < 200 && tested < 8; ++t) {
    const int n = 5 + t % 2;
    std::uniform_int_distribution<int> deg(1, n - 2);
    std::vector<int> d(n);
    for (auto& x : d) x = deg(gen);
    const std::uint64_t N = brute::count(d);
    if (N < 3 || N > 50) continue;
    ++tested;
    const int draws = 400 * static_cast<int>(N);
    std::map<EdgeSet, int> f;
    for (const auto& g : uniform_sample(query(d), draws, 1000 + t)) ++f[g];
    CHECK(f.size() == N);
    CHECK(uniform_fit(f, N, draws, 1e-3));
  }
  CHECK(tested >= 4);
  CHECK_THROWS_AS(uniform_sample(query({1, 1, 1}), 1, 1), PreconditionError);
}

TEST_CASE("beta-model sampling") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 5), one = Eigen::MatrixXd::Ones(5, 5);
  for (const auto& g : beta_model_sample(zero, 30, 1)) CHECK(g.empty());
  for (const auto& g : beta_model_sample(one, 30, 1)) CHECK(g.size() == 10);

  const auto s = beta_model_sample(Eigen::MatrixXd::Constant(4, 4, 0.5), 64000, 7);
  std::map<EdgeSet, int> freq;
  for (const auto& g : s) ++freq[g];
  CHECK(freq.size() == 64);
  const double sigma = std::sqrt(64000 * (1.0 / 64) * (63.0 / 64));
  for (const auto& [g, c] : freq) CHECK(std::abs(c - 1000) <= 4 * sigma);
  CHECK(uniform_fit(freq, 64, 64000, 1e-3));
  CHECK(beta_model_sample(Eigen::MatrixXd::Constant(4, 4, 0.3), 10, 3) ==
        beta_model_sample(Eigen::MatrixXd::Constant(4, 4, 0.3), 10, 3));
  CHECK_THROWS_AS(beta_model_sample(Eigen::MatrixXd::Constant(3, 3, 1.5), 1, 1), PreconditionError);
}

TEST_CASE("concentration experiment") {
  ConcentrationConfig empty;
  empty.d.d = std::vector<int>(8, 4);
  empty.trials = 200;
  const auto r0 = concentration_experiment(empty);
  CHECK(r0.mean_hat == 0.0);
  CHECK(r0.histogram.size() == 1);
  CHECK(r0.rows.at(0).empirical == 1.0);

  ConcentrationConfig one;
  one.d.d = std::vector<int>(8, 4);
  one.Y = {{0, 1}};
  one.trials = 4000;
  one.seed = 5;
  const auto r1 = concentration_experiment(one);
  CHECK(r1.mean_hat == doctest::Approx(4.0 / 7).epsilon(1e-12));
  CHECK(r1.hat_pmf[1] == doctest::Approx(4.0 / 7).epsilon(1e-12));
  const double sd = std::sqrt(4.0 / 7 * 3.0 / 7 / 4000);
  CHECK(std::abs(r1.mean_x - 4.0 / 7) <= 4 * sd);
  CHECK(r1.population == 19355);
  for (double m : r1.moment_ratio) CHECK(m == doctest::Approx(r1.moment_ratio[0]));  // X is 0/1
}
