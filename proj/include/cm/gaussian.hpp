#pragma once

// Centered gaussian measures with density proportional to exp(-x^T A x):
// Wick/Isserlis moments, polynomial expectation statistics, truncation
// error bounds, Laplace-type integral estimators and a rejection-sampling
// Monte Carlo oracle.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cm/common.hpp"
#include "cm/complexrv.hpp"
#include "cm/polynomial.hpp"

namespace cm::gauss {

inline constexpr std::uint64_t kDefaultPairingBudget = 1'000'000;

struct QuadraticForm {
  Eigen::MatrixXd A;
  bool positive_definite = false;

  // Validates symmetry (1e-12 relative to the largest entry) and records
  // whether a Cholesky factorization exists.
  static QuadraticForm make(const Eigen::MatrixXd& A);
  Eigen::Index dim() const { return A.rows(); }
  // log|A|; throws PreconditionError if A is not positive definite.
  double log_det() const;
};

class GaussianModel {
 public:
  // Covariance (2A)^{-1}.
  static GaussianModel from_form(const QuadraticForm& q);
  static GaussianModel from_covariance(const Eigen::MatrixXd& sigma);

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  std::size_t n() const { return static_cast<std::size_t>(sigma_.rows()); }
  // Lower Cholesky factor of sigma, used for sampling.
  const Eigen::MatrixXd& chol() const { return chol_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
};

// (k-1)!! for even k, 0 for odd k; saturates at UINT64_MAX.
std::uint64_t pairing_count(int k);

// Visits every perfect pairing of {0..k-1} once; returns how many were
// visited. Used to check the enumeration itself.
std::uint64_t enumerate_pairings(int k,
                                 const std::function<void(const std::vector<std::pair<int, int>>&)>& visit);

// Memoized Wick expansion. The memo key is the exponent vector itself,
// which is the sorted index multiset in count form.
class IsserlisEngine {
 public:
  explicit IsserlisEngine(const GaussianModel& model, std::uint64_t budget = kDefaultPairingBudget)
      : model_(model), budget_(budget) {}

  double moment(const Exponent& e);
  std::uint64_t budget() const { return budget_; }

 private:
  double recurse(Exponent& e);
  const GaussianModel& model_;
  std::uint64_t budget_;
  std::map<Exponent, double> memo_;
};

double isserlis_moment(const Exponent& monomial, const GaussianModel& model,
                       std::uint64_t budget = kDefaultPairingBudget);

struct PolyStats {
  cplx mean;
  double var_re = 0.0;
  double var_im = 0.0;
  double cov_re_im = 0.0;
  cplx pseudovariance;
  double variance() const { return var_re + var_im; }
};

// Throws BudgetExceeded naming the monomial pair whose product would need
// more than `budget` pairings.
PolyStats poly_expectation_stats(const SparsePolynomial& p, const GaussianModel& model,
                                 std::uint64_t budget = kDefaultPairingBudget);

struct TruncationBounds {
  double mean_bound;
  double pseudovar_bound;
  bool mean_applicable;
  bool pseudovar_applicable;
};

TruncationBounds truncation_error_bounds(double b, long n, double p);

// Which alternative of hypothesis (c) the caller certifies for g in the
// second-order estimator. Both lead to the same error expression.
enum class GAlternative { I, II };

struct LaplaceInputs {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double h_sup = 0.0;  // sup |e^h - 1| over the domain
  double c2 = 0.0;
  double c3 = 0.0;
  rv::Order order = rv::Order::First;
  GAlternative g_alternative = GAlternative::I;
};

struct LaplaceEstimate {
  cplx log_value;
  double error_radius = 0.0;
  // The explicit n and rho1^2 conditions under which the constant is 1.
  bool c1_regime = false;
  // Second order additionally requires phi1 n^{-1/3} <= 2/3.
  bool inputs_consistent = true;
  bool certified = false;  // c1_regime && inputs_consistent
  LaplaceInputs inputs_echo;
  std::map<std::string, double> components;
};

LaplaceEstimate laplace_integral_estimate(const QuadraticForm& A, const SparsePolynomial& f,
                                          const SparsePolynomial& g, const LaplaceInputs& in);

// Membership predicate for the truncation region.
struct BoxSpec {
  enum class Kind { Whole, Axis, TImage };
  Kind kind = Kind::Whole;
  Eigen::VectorXd halfwidth;  // Axis
  Eigen::MatrixXd T_inverse;  // TImage: x in T(U(rho)) iff |T^{-1}x|_inf <= rho
  double rho = 0.0;

  static BoxSpec whole() { return {}; }
  static BoxSpec axis(const Eigen::VectorXd& h);
  static BoxSpec t_image(const Eigen::MatrixXd& T, double rho);
  bool contains(const Eigen::VectorXd& x) const;
};

struct MCResult {
  cplx estimate;
  double std_error = 0.0;
  double reject_rate = 0.0;
  std::uint64_t draws = 0;
  std::uint64_t accepted = 0;
};

inline constexpr int kMCShards = 16;

// Mean of phi(X) for X drawn from the gaussian restricted to `box`.
// Draws are split into a fixed number of shards with seeds seed + shard;
// shard results are merged in shard order, so the output depends only on
// the seed and never on `threads`.
MCResult mc_expectation(const GaussianModel& model, const BoxSpec& box,
                        const std::function<cplx(const Eigen::VectorXd&)>& phi, std::uint64_t samples,
                        std::uint64_t seed, int threads = 1);

MCResult mc_truncated_expectation(const QuadraticForm& A, const SparsePolynomial& f, const BoxSpec& box,
                                  std::uint64_t samples, std::uint64_t seed, int threads = 1);

// Helpers for certifying the Laplace hypotheses on axis boxes |x_i| <= h_i.
// Upper bound on sup |dp/dx_j| for each j.
std::vector<double> gradient_sup_on_box(const SparsePolynomial& p, const Eigen::VectorXd& h);
// Upper bound on ||H(p)||_inf = max_j sum_k sup |d^2p/dx_j dx_k|.
double hessian_inf_norm_on_box(const SparsePolynomial& p, const Eigen::VectorXd& h);
// Smallest c3 >= 0 with |p(x)| <= n^{c3} e^{c2 x^T A x / n} on R^n, from the
// termwise bound |x^e| <= (|e|/(2 s e))^{|e|/2} e^{s |x|^2} with
// s = c2 lambda_min(A) / n.  Requires c2 > 0 unless p is constant.
double growth_exponent_c3(const SparsePolynomial& p, const QuadraticForm& A, double c2);

}  // namespace cm::gauss
