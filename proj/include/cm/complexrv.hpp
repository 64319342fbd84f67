#pragma once

// Finitely supported complex random variables and functions of independent
// discrete coordinates: diameters, sensitivity profiles (alpha, Delta) and
// the martingale-based estimates of E exp(f(X)).

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cm/common.hpp"

namespace cm::rv {

inline constexpr std::size_t kDefaultExhaustiveCap = 10'000'000;

struct Atom {
  cplx value;
  double prob;
};

class DiscreteRV {
 public:
  // Throws PreconditionError unless the support is nonempty, every
  // probability lies in (0,1] and they sum to 1 within 1e-12.
  explicit DiscreteRV(std::vector<Atom> atoms);

  static DiscreteRV uniform(const std::vector<cplx>& values);
  static DiscreteRV constant(cplx value) { return DiscreteRV({{value, 1.0}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
};

class DiscreteProductSpace {
 public:
  explicit DiscreteProductSpace(std::vector<DiscreteRV> coords);

  std::size_t dimension() const { return coords_.size(); }
  const DiscreteRV& coord(std::size_t k) const { return coords_[k]; }
  const std::vector<DiscreteRV>& coords() const { return coords_; }

  // Product of coordinate support sizes, saturating at SIZE_MAX.
  std::size_t joint_size() const { return joint_size_; }
  void require_within(std::size_t cap) const;

  // Mixed-radix decoding of a joint index; coordinate 0 varies fastest.
  std::vector<std::size_t> decode(std::size_t index) const;
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  double probability(std::size_t index) const;

 private:
  std::vector<DiscreteRV> coords_;
  std::vector<std::size_t> strides_;
  std::size_t joint_size_ = 1;
};

// A complex function tabulated on every joint support point of a space.
class TabulatedFunction {
 public:
  TabulatedFunction(const DiscreteProductSpace& space, std::vector<cplx> values);

  // Evaluates `f` at the coordinate values of every joint support point.
  static TabulatedFunction from(const DiscreteProductSpace& space,
                                const std::function<cplx(std::span<const cplx>)>& f,
                                std::size_t cap = kDefaultExhaustiveCap);

  const std::vector<cplx>& values() const { return values_; }
  cplx operator[](std::size_t index) const { return values_[index]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<cplx> values_;
};

struct RVMoments {
  cplx mean;
  double variance;      // E|Z - EZ|^2
  cplx pseudovariance;  // E(Z - EZ)^2
};

struct SensitivityProfile {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd delta;  // symmetric, zero diagonal
};

enum class Order { First, Second };

struct BoundReport {
  cplx estimate;
  // Multiplicative radius: true value = estimate * (1 + K) with |K| <= radius.
  double error_radius = 0.0;
  Order order = Order::First;
  std::map<std::string, double> auxiliary;
};

double diameter(const DiscreteRV& rv);
RVMoments moments(const DiscreteRV& rv);

// e^{diam^2/8} - 1.
double hoeffding_exp_bound(double diam);

SensitivityProfile sensitivity_profile(const TabulatedFunction& f,
                                       const DiscreteProductSpace& space,
                                       std::size_t cap = kDefaultExhaustiveCap);

cplx exact_exp_expectation(const TabulatedFunction& f, const DiscreteProductSpace& space,
                           std::size_t cap = kDefaultExhaustiveCap);

BoundReport first_order_estimate(const TabulatedFunction& f, const DiscreteProductSpace& space,
                                 std::size_t cap = kDefaultExhaustiveCap);
BoundReport second_order_estimate(const TabulatedFunction& f, const DiscreteProductSpace& space,
                                  std::size_t cap = kDefaultExhaustiveCap);

// Summary statistics of f(X) under the product measure.
struct FunctionStats {
  cplx mean;
  cplx pseudovariance;
  double var_re;
  double var_im;
};
FunctionStats function_stats(const TabulatedFunction& f, const DiscreteProductSpace& space);

// Doob martingale Z_j = E(f(X) | X_1..X_j), j = 0..n, each tabulated on the
// full joint support.
std::vector<std::vector<cplx>> doob_martingale(const TabulatedFunction& f,
                                               const DiscreteProductSpace& space);

// Bounds on alpha and Delta from derivative suprema on a box, and for a
// function composed with a transformation of the cube U_n(rho).
struct DerivativeBoundInput {
  // Per-coordinate box widths (b_j - a_j) and gradient / mixed-partial
  // suprema in those coordinates; may be empty.
  std::vector<double> box_widths;
  std::vector<double> gradient_sup;
  Eigen::MatrixXd hessian_sup;

  // Transformed-cube form.
  std::size_t n = 1;
  double rho = 1.0;
  double m1 = 0.0;  // sup |f_j| over T(int B)
  double m2 = 0.0;  // ||H(f, T(int B))||_inf
  double jac_norm1 = 1.0;
  double jac_norminf = 1.0;
};

struct DerivativeBounds {
  Eigen::VectorXd alpha;   // per-coordinate alpha bounds (box form)
  Eigen::MatrixXd delta;   // per-pair Delta bounds (box form)
  double alpha_inf = 0.0;  // ||alpha||_inf (transformed form)
  double alpha_delta_alpha = 0.0;
  double alpha_delta2_alpha = 0.0;
};

DerivativeBounds derivative_profile_bounds(const DerivativeBoundInput& in);

// e^{d1+d2+d3+d4} - 1 for nonnegative error exponents.
double combine_errors(double d1, double d2, double d3, double d4);

// Auxiliary inequalities from the appendix, exposed as evaluators.
// |e^z - e^{z^2/2} - z| and its bound e^{a^3/6 + a^4/8} - 1 for |z| <= a.
double exp_quadratic_remainder(cplx z);
double exp_quadratic_remainder_bound(double a);
// |z1 (e^{z2} - z2 - 1)| and its bound for |z1| <= a, |z2| <= b.
double cross_remainder(cplx z1, cplx z2);
double cross_remainder_bound(double a, double b);
// sum_{k<m} x^k/k!.
double exp_partial_sum(double x, int m);

}  // namespace cm::rv
