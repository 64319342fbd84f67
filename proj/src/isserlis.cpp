#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cm/gaussian.hpp"

namespace cm::gauss {

QuadraticForm QuadraticForm::make(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols() && A.rows() > 0, "QuadraticForm: matrix must be square and nonempty");
  require(A.allFinite(), "QuadraticForm: non-finite entry");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  require((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "QuadraticForm: matrix is not symmetric");
  QuadraticForm q;
  q.A = 0.5 * (A + A.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(q.A);
  q.positive_definite = llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all();
  return q;
}

double QuadraticForm::log_det() const {
  require(positive_definite, "QuadraticForm: log-determinant needs a positive-definite matrix");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

GaussianModel GaussianModel::from_form(const QuadraticForm& q) {
  require(q.positive_definite, "GaussianModel: quadratic form is singular or indefinite");
  const Eigen::Index n = q.dim();
  Eigen::LLT<Eigen::MatrixXd> llt(2.0 * q.A);
  Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return from_covariance(0.5 * (sigma + sigma.transpose()));
}

GaussianModel GaussianModel::from_covariance(const Eigen::MatrixXd& sigma) {
  require(sigma.rows() == sigma.cols() && sigma.rows() > 0, "GaussianModel: covariance must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, "GaussianModel: covariance is not positive definite");
  GaussianModel m;
  m.sigma_ = sigma;
  m.chol_ = llt.matrixL();
  return m;
}

std::uint64_t pairing_count(int k) {
  if (k < 0 || k % 2) return 0;
  std::uint64_t r = 1;
  for (int j = k - 1; j > 1; j -= 2) {
    if (r > UINT64_MAX / static_cast<std::uint64_t>(j)) return UINT64_MAX;
    r *= static_cast<std::uint64_t>(j);
  }
  return r;
}

namespace {

void pair_rec(std::vector<int>& rest, std::vector<std::pair<int, int>>& cur, std::uint64_t& count,
              const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
  if (rest.empty()) {
    ++count;
    if (visit) visit(cur);
    return;
  }
  const int a = rest.front();
  for (std::size_t m = 1; m < rest.size(); ++m) {
    const int b = rest[m];
    std::vector<int> next;
    next.reserve(rest.size() - 2);
    for (std::size_t t = 1; t < rest.size(); ++t)
      if (t != m) next.push_back(rest[t]);
    cur.emplace_back(a, b);
    pair_rec(next, cur, count, visit);
    cur.pop_back();
  }
}

}  // namespace

std::uint64_t enumerate_pairings(int k,
                                 const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
  require(k >= 0, "enumerate_pairings: negative size");
  if (k % 2) return 0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::pair<int, int>> cur;
  std::uint64_t count = 0;
  pair_rec(idx, cur, count, visit);
  return count;
}

double IsserlisEngine::moment(const Exponent& e) {
  require(e.size() == model_.n(), "isserlis: exponent length does not match dimension");
  int k = 0;
  for (int v : e) {
    require(v >= 0, "isserlis: negative exponent");
    k += v;
  }
  if (k % 2) return 0.0;
  if (pairing_count(k) > budget_)
    throw BudgetExceeded("isserlis: monomial " + to_string(e) + " of degree " + std::to_string(k) +
                         " needs more than " + std::to_string(budget_) + " pairings");
  Exponent work = e;
  return recurse(work);
}

// Pair the first present index with each remaining index j; the number of
// copies of j left is the multiplicity of that pairing choice.
double IsserlisEngine::recurse(Exponent& e) {
  std::size_t i = 0;
  while (i < e.size() && e[i] == 0) ++i;
  if (i == e.size()) return 1.0;
  if (auto it = memo_.find(e); it != memo_.end()) return it->second;
  const Exponent key = e;
  const Eigen::MatrixXd& s = model_.sigma();
  e[i] -= 1;
  double acc = 0.0;
  for (std::size_t j = i; j < e.size(); ++j) {
    if (e[j] == 0) continue;
    const int mult = e[j];
    e[j] -= 1;
    acc += mult * s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * recurse(e);
    e[j] += 1;
  }
  e[i] += 1;
  memo_.emplace(key, acc);
  return acc;
}

double isserlis_moment(const Exponent& monomial, const GaussianModel& model, std::uint64_t budget) {
  IsserlisEngine eng(model, budget);
  return eng.moment(monomial);
}

PolyStats poly_expectation_stats(const SparsePolynomial& p, const GaussianModel& model, std::uint64_t budget) {
  require(p.dimension() == model.n(), "poly_expectation_stats: dimension mismatch");
  IsserlisEngine eng(model, budget);
  std::vector<std::pair<const Exponent*, cplx>> terms;
  terms.reserve(p.size());
  for (const auto& [e, c] : p.terms()) terms.emplace_back(&e, c);

  auto degree = [](const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); };
  CompensatedSum<cplx> mean;
  for (const auto& [e, c] : terms) mean.add(c * eng.moment(*e));

  // Second moments of Re p and Im p from all term pairs (i <= j).
  CompensatedSum<double> rr, ii, ri;
  Exponent sum(p.dimension());
  for (std::size_t a = 0; a < terms.size(); ++a) {
    for (std::size_t b = a; b < terms.size(); ++b) {
      const Exponent& ea = *terms[a].first;
      const Exponent& eb = *terms[b].first;
      const int k = degree(ea) + degree(eb);
      if (k % 2) continue;
      if (pairing_count(k) > budget)
        throw BudgetExceeded("poly_expectation_stats: monomial pair " + to_string(ea) + " x " + to_string(eb) +
                             " needs more than " + std::to_string(budget) + " pairings");
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] = ea[j] + eb[j];
      const double m = eng.moment(sum);
      if (m == 0.0) continue;
      const cplx ca = terms[a].second, cb = terms[b].second;
      const double w = (a == b) ? 1.0 : 2.0;
      rr.add(w * ca.real() * cb.real() * m);
      ii.add(w * ca.imag() * cb.imag() * m);
      // Cross term is not symmetric in (a,b): add both orderings.
      ri.add(ca.real() * cb.imag() * m + (a == b ? 0.0 : cb.real() * ca.imag() * m));
    }
  }
  PolyStats st;
  st.mean = mean.value();
  st.var_re = std::max(0.0, rr.value() - st.mean.real() * st.mean.real());
  st.var_im = std::max(0.0, ii.value() - st.mean.imag() * st.mean.imag());
  st.cov_re_im = ri.value() - st.mean.real() * st.mean.imag();
  st.pseudovariance = cplx(st.var_re - st.var_im, 2.0 * st.cov_re_im);
  return st;
}

TruncationBounds truncation_error_bounds(double b, long n, double p) {
  require(b >= 0.0, "truncation_error_bounds: b must be nonnegative");
  require(n >= 1, "truncation_error_bounds: n must be positive");
  require(p >= 0.0 && p <= 0.75, "truncation_error_bounds: p must lie in [0, 3/4]");
  const double nd = static_cast<double>(n);
  TruncationBounds t;
  t.mean_bound = round_up(15.0 * std::exp(b / 2.0) * std::pow(p, 1.0 - b / nd));
  t.pseudovar_bound = round_up(112.0 * std::exp(b) * std::pow(p, 1.0 - 2.0 * b / nd));
  t.mean_applicable = nd >= b + b * b;
  t.pseudovar_applicable = nd >= 2.0 * b + 4.0 * b * b;
  return t;
}

}  // namespace cm::gauss
