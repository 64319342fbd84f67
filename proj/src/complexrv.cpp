#include "cm/complexrv.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cm::rv {

namespace {

constexpr double kProbTolerance = 1e-12;

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    return std::numeric_limits<std::size_t>::max();
  return a * b;
}

}  // namespace

DiscreteRV::DiscreteRV(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  require(!atoms_.empty(), "DiscreteRV: empty support");
  CompensatedSum<double> total;
  for (const auto& a : atoms_) {
    require(a.prob > 0.0 && a.prob <= 1.0, "DiscreteRV: probabilities must lie in (0,1]");
    require(std::isfinite(a.value.real()) && std::isfinite(a.value.imag()),
            "DiscreteRV: non-finite atom");
    total.add(a.prob);
  }
  require(std::abs(total.value() - 1.0) <= kProbTolerance,
          "DiscreteRV: probabilities must sum to 1");
  // Absorb the admitted 1e-12 slack so downstream sums see total mass 1.
  const double t = total.value();
  for (auto& a : atoms_) a.prob /= t;
}

DiscreteRV DiscreteRV::uniform(const std::vector<cplx>& values) {
  require(!values.empty(), "DiscreteRV::uniform: empty support");
  std::vector<Atom> atoms;
  const double p = 1.0 / static_cast<double>(values.size());
  for (auto v : values) atoms.push_back({v, p});
  return DiscreteRV(std::move(atoms));
}

DiscreteProductSpace::DiscreteProductSpace(std::vector<DiscreteRV> coords)
    : coords_(std::move(coords)) {
  require(!coords_.empty(), "DiscreteProductSpace: dimension must be >= 1");
  strides_.resize(coords_.size());
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    strides_[k] = joint_size_;
    joint_size_ = saturating_mul(joint_size_, coords_[k].size());
  }
}

void DiscreteProductSpace::require_within(std::size_t cap) const {
  if (joint_size_ > cap) {
    std::ostringstream os;
    os << "exhaustive budget exceeded: joint support " << joint_size_ << " > cap " << cap;
    throw BudgetExceeded(os.str());
  }
}

std::vector<std::size_t> DiscreteProductSpace::decode(std::size_t index) const {
  std::vector<std::size_t> out(coords_.size());
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    out[k] = index % coords_[k].size();
    index /= coords_[k].size();
  }
  return out;
}

double DiscreteProductSpace::probability(std::size_t index) const {
  double p = 1.0;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    p *= coords_[k].atoms()[index % coords_[k].size()].prob;
    index /= coords_[k].size();
  }
  return p;
}

TabulatedFunction::TabulatedFunction(const DiscreteProductSpace& space, std::vector<cplx> values)
    : values_(std::move(values)) {
  require(values_.size() == space.joint_size(),
          "TabulatedFunction: table must cover every joint support point");
}

TabulatedFunction TabulatedFunction::from(const DiscreteProductSpace& space,
                                          const std::function<cplx(std::span<const cplx>)>& f,
                                          std::size_t cap) {
  space.require_within(cap);
  std::vector<cplx> values(space.joint_size());
  std::vector<cplx> point(space.dimension());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto idx = space.decode(i);
    for (std::size_t k = 0; k < idx.size(); ++k) point[k] = space.coord(k).atoms()[idx[k]].value;
    values[i] = f(point);
  }
  return TabulatedFunction(space, std::move(values));
}

double diameter(const DiscreteRV& rv) {
  double best = 0.0;
  const auto& a = rv.atoms();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) best = std::max(best, std::abs(a[i].value - a[j].value));
  return best;
}

RVMoments moments(const DiscreteRV& rv) {
  CompensatedSum<cplx> mean;
  for (const auto& a : rv.atoms()) mean.add(a.prob * a.value);
  const cplx m = mean.value();
  CompensatedSum<double> var;
  CompensatedSum<cplx> pvar;
  for (const auto& a : rv.atoms()) {
    const cplx d = a.value - m;
    var.add(a.prob * std::norm(d));
    pvar.add(a.prob * d * d);
  }
  return {m, var.value(), pvar.value()};
}

double hoeffding_exp_bound(double diam) {
  require(diam >= 0.0, "hoeffding_exp_bound: diameter must be nonnegative");
  return round_up(std::expm1(diam * diam / 8.0));
}

SensitivityProfile sensitivity_profile(const TabulatedFunction& f,
                                       const DiscreteProductSpace& space, std::size_t cap) {
  space.require_within(cap);
  const std::size_t n = space.dimension();
  SensitivityProfile prof{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  const std::size_t N = space.joint_size();

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t sk = space.coord(k).size();
    const std::size_t st = space.stride(k);
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if ((i / st) % sk != 0) continue;  // base points with coordinate k = 0
      for (std::size_t a = 0; a < sk; ++a)
        for (std::size_t b = a + 1; b < sk; ++b)
          best = std::max(best, std::abs(f[i + a * st] - f[i + b * st]));
    }
    prof.alpha(k) = best;
  }

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const std::size_t sj = space.coord(j).size(), sk = space.coord(k).size();
      const std::size_t tj = space.stride(j), tk = space.stride(k);
      double best = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if ((i / tj) % sj != 0 || (i / tk) % sk != 0) continue;
        for (std::size_t a = 0; a < sj; ++a)
          for (std::size_t a2 = a + 1; a2 < sj; ++a2)
            for (std::size_t b = 0; b < sk; ++b)
              for (std::size_t b2 = b + 1; b2 < sk; ++b2) {
                const cplx v = f[i + a * tj + b * tk] - f[i + a2 * tj + b * tk] -
                               f[i + a * tj + b2 * tk] + f[i + a2 * tj + b2 * tk];
                best = std::max(best, std::abs(v));
              }
      }
      prof.delta(j, k) = prof.delta(k, j) = best;
    }
  }
  return prof;
}

cplx exact_exp_expectation(const TabulatedFunction& f, const DiscreteProductSpace& space,
                           std::size_t cap) {
  space.require_within(cap);
  CompensatedSum<cplx> acc;
  for (std::size_t i = 0; i < f.size(); ++i) acc.add(space.probability(i) * std::exp(f[i]));
  return acc.value();
}

FunctionStats function_stats(const TabulatedFunction& f, const DiscreteProductSpace& space) {
  CompensatedSum<cplx> mean;
  for (std::size_t i = 0; i < f.size(); ++i) mean.add(space.probability(i) * f[i]);
  const cplx m = mean.value();
  CompensatedSum<cplx> pv;
  CompensatedSum<double> vr, vi;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double p = space.probability(i);
    const cplx d = f[i] - m;
    pv.add(p * d * d);
    vr.add(p * d.real() * d.real());
    vi.add(p * d.imag() * d.imag());
  }
  return {m, pv.value(), vr.value(), vi.value()};
}

BoundReport first_order_estimate(const TabulatedFunction& f, const DiscreteProductSpace& space,
                                 std::size_t cap) {
  const auto prof = sensitivity_profile(f, space, cap);
  const auto stats = function_stats(f, space);
  BoundReport r;
  r.order = Order::First;
  r.estimate = std::exp(stats.mean);
  const double ata = prof.alpha.squaredNorm();
  r.error_radius = round_up(std::expm1(ata / 8.0));
  r.auxiliary = {{"E_f_re", stats.mean.real()},
                 {"E_f_im", stats.mean.imag()},
                 {"pseudovar_re", stats.pseudovariance.real()},
                 {"pseudovar_im", stats.pseudovariance.imag()},
                 {"alpha_T_alpha", ata}};
  return r;
}

BoundReport second_order_estimate(const TabulatedFunction& f, const DiscreteProductSpace& space,
                                  std::size_t cap) {
  const auto prof = sensitivity_profile(f, space, cap);
  const auto stats = function_stats(f, space);
  const Eigen::VectorXd& a = prof.alpha;
  const double sum_a3 = a.array().cube().sum();
  const double sum_a4 = a.array().square().square().sum();
  const double ada = a.dot(prof.delta * a);
  const Eigen::VectorXd da = prof.delta * a;
  const double ad2a = da.squaredNorm();  // alpha^T Delta^2 alpha, Delta symmetric

  BoundReport r;
  r.order = Order::Second;
  r.estimate = std::exp(stats.mean + 0.5 * stats.pseudovariance);
  const double exponent = sum_a3 / 6.0 + ada / 6.0 + 5.0 * sum_a4 / 8.0 + 5.0 * ad2a / 16.0;
  r.error_radius = round_up(std::expm1(exponent) * std::exp(0.5 * stats.var_im));
  r.auxiliary = {{"E_f_re", stats.mean.real()},
                 {"E_f_im", stats.mean.imag()},
                 {"pseudovar_re", stats.pseudovariance.real()},
                 {"pseudovar_im", stats.pseudovariance.imag()},
                 {"var_re_f", stats.var_re},
                 {"var_im_f", stats.var_im},
                 {"sum_alpha3", sum_a3},
                 {"sum_alpha4", sum_a4},
                 {"alpha_T_delta_alpha", ada},
                 {"alpha_T_delta2_alpha", ad2a}};
  return r;
}

std::vector<std::vector<cplx>> doob_martingale(const TabulatedFunction& f,
                                               const DiscreteProductSpace& space) {
  const std::size_t n = space.dimension();
  std::vector<std::vector<cplx>> z(n + 1);
  z[n] = f.values();
  // Z_{j-1} averages Z_j over coordinate j-1 (0-based), then broadcasts.
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t s = space.coord(j).size(), st = space.stride(j);
    const auto& atoms = space.coord(j).atoms();
    std::vector<cplx> next(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t base = i - ((i / st) % s) * st;
      cplx acc = 0.0;
      for (std::size_t a = 0; a < s; ++a) acc += atoms[a].prob * z[j + 1][base + a * st];
      next[i] = acc;
    }
    z[j] = std::move(next);
  }
  return z;
}

DerivativeBounds derivative_profile_bounds(const DerivativeBoundInput& in) {
  auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
  require(in.rho > 0.0, "derivative_profile_bounds: rho must be positive");
  require(nonneg(in.m1) && nonneg(in.m2) && nonneg(in.jac_norm1) && nonneg(in.jac_norminf),
          "derivative_profile_bounds: inputs must be nonnegative");
  require(in.gradient_sup.empty() || in.gradient_sup.size() == in.box_widths.size(),
          "derivative_profile_bounds: gradient_sup/box_widths size mismatch");
  for (double w : in.box_widths) require(nonneg(w), "derivative_profile_bounds: negative width");
  for (double g : in.gradient_sup) require(nonneg(g), "derivative_profile_bounds: negative sup");
  require((in.hessian_sup.array() >= 0.0).all(), "derivative_profile_bounds: negative sup");

  DerivativeBounds out;
  const auto m = in.box_widths.size();
  out.alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  out.delta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (!in.gradient_sup.empty()) out.alpha(j) = round_up(in.box_widths[j] * in.gradient_sup[j]);
    if (in.hessian_sup.rows() == static_cast<Eigen::Index>(m)) {
      for (std::size_t k = 0; k < m; ++k)
        if (j != k) out.delta(j, k) = round_up(in.box_widths[j] * in.box_widths[k] * in.hessian_sup(j, k));
    }
  }

  const double nn = static_cast<double>(in.n);
  const double jj = in.jac_norm1 * in.jac_norminf;
  out.alpha_inf = round_up(2.0 * in.rho * in.m1 * in.jac_norm1);
  const double a2 = out.alpha_inf * out.alpha_inf;
  out.alpha_delta_alpha = round_up(4.0 * in.rho * in.rho * nn * in.m2 * a2 * jj);
  out.alpha_delta2_alpha =
      round_up(16.0 * std::pow(in.rho, 4) * nn * in.m2 * in.m2 * a2 * jj * jj);
  return out;
}

double combine_errors(double d1, double d2, double d3, double d4) {
  require(d1 >= 0 && d2 >= 0 && d3 >= 0 && d4 >= 0, "combine_errors: inputs must be nonnegative");
  return round_up(std::expm1(d1 + d2 + d3 + d4));
}

double exp_quadratic_remainder(cplx z) { return std::abs(std::exp(z) - std::exp(z * z / 2.0) - z); }

double exp_quadratic_remainder_bound(double a) {
  return std::expm1(a * a * a / 6.0 + std::pow(a, 4) / 8.0);
}

double cross_remainder(cplx z1, cplx z2) { return std::abs(z1 * (std::exp(z2) - z2 - 1.0)); }

double cross_remainder_bound(double a, double b) {
  return std::exp(b * b / 8.0) + std::exp(a * b / 3.0 + b * b / 4.0 + std::pow(a, 4) / 4.0) -
         a * b / 3.0 - 2.0;
}

double exp_partial_sum(double x, int m) {
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += term;
    term *= x / (k + 1);
  }
  return sum;
}

}  // namespace cm::rv
