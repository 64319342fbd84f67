#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "cm/gaussian.hpp"

namespace cm::gauss {

LaplaceEstimate laplace_integral_estimate(const QuadraticForm& A, const SparsePolynomial& f,
                                          const SparsePolynomial& g, const LaplaceInputs& in) {
  require(A.positive_definite, "laplace_integral_estimate: A is singular or indefinite");
  const std::size_t n = static_cast<std::size_t>(A.dim());
  require(f.dimension() == n && g.dimension() == n, "laplace_integral_estimate: polynomial dimension mismatch");
  require(g.is_real(), "laplace_integral_estimate: g must have real coefficients");
  require(in.rho1 > 0.0 && in.rho1 <= in.rho2, "laplace_integral_estimate: need 0 < rho1 <= rho2");
  for (double v : {in.phi1, in.phi2, in.h_sup, in.c2, in.c3})
    require(v >= 0.0 && std::isfinite(v), "laplace_integral_estimate: constants must be finite and nonnegative");

  const GaussianModel model = GaussianModel::from_form(A);
  const PolyStats fs = poly_expectation_stats(f, model);
  const PolyStats gs = poly_expectation_stats(g, model);
  const double nd = static_cast<double>(n);
  const double logn = std::log(nd);
  const double tail = std::exp(-in.rho1 * in.rho1 / 2.0);

  LaplaceEstimate out;
  out.inputs_echo = in;
  cplx log_value = 0.5 * nd * std::log(std::numbers::pi) - 0.5 * A.log_det() + fs.mean;
  auto& comp = out.components;
  comp["log_det_A"] = A.log_det();
  comp["E_f_re"] = fs.mean.real();
  comp["E_f_im"] = fs.mean.imag();
  comp["E_g"] = gs.mean.real();
  comp["var_re_f"] = fs.var_re;
  comp["var_im_f"] = fs.var_im;
  comp["var_g"] = gs.var_re;

  const double gap_mean = gs.mean.real() - fs.mean.real();
  double radius = 0.0;
  if (in.order == rv::Order::First) {
    const double t1 = std::expm1(in.phi1 * in.phi1 / 8.0 + tail);
    const double t2 = 2.0 * std::expm1(in.phi2 * in.phi2 / 8.0 + tail) + in.h_sup;
    radius = t1 + t2 * std::exp(gap_mean);
    out.c1_regime = nd >= (1.0 + in.c2) * (1.0 + in.c2) &&
                    in.rho1 * in.rho1 >= 7.0 + 2.0 * in.c2 + (3.0 + 4.0 * in.c3) * logn;
    comp["term_primary"] = t1;
    comp["term_secondary"] = t2;
  } else {
    log_value += 0.5 * fs.pseudovariance;
    comp["pseudovar_re_f"] = fs.pseudovariance.real();
    comp["pseudovar_im_f"] = fs.pseudovariance.imag();
    const double t1 = std::expm1(std::pow(in.phi1, 3) + tail);
    const double t2 = 2.0 * std::expm1(std::pow(in.phi2, 3) + tail) + in.h_sup;
    const double gap = gap_mean + 0.5 * (gs.var_re - fs.var_re);
    radius = std::exp(fs.var_im / 2.0) * (t1 + t2 * std::exp(gap));
    out.c1_regime = nd >= (1.0 + 2.0 * in.c2) * (1.0 + 2.0 * in.c2) &&
                    in.rho1 * in.rho1 >= 15.0 + 4.0 * in.c2 + (3.0 + 8.0 * in.c3) * logn;
    out.inputs_consistent = in.phi1 * std::pow(nd, -1.0 / 3.0) <= 2.0 / 3.0;
    comp["term_primary"] = t1;
    comp["term_secondary"] = t2;
    comp["g_alternative"] = in.g_alternative == GAlternative::I ? 1.0 : 2.0;
  }
  out.log_value = log_value;
  out.error_radius = std::isfinite(radius) ? round_up(radius) : std::numeric_limits<double>::infinity();
  out.certified = out.c1_regime && out.inputs_consistent;
  return out;
}

std::vector<double> gradient_sup_on_box(const SparsePolynomial& p, const Eigen::VectorXd& h) {
  const std::size_t n = p.dimension();
  require(static_cast<std::size_t>(h.size()) == n, "gradient_sup_on_box: dimension mismatch");
  std::vector<double> out(n, 0.0);
  for (const auto& [e, c] : p.terms())
    for (std::size_t j = 0; j < n; ++j) {
      if (e[j] == 0) continue;
      double m = std::abs(c) * e[j];
      for (std::size_t i = 0; i < n; ++i) m *= std::pow(std::abs(h(i)), e[i] - (i == j ? 1 : 0));
      out[j] += m;
    }
  for (double& v : out) v = round_up(v);
  return out;
}

double hessian_inf_norm_on_box(const SparsePolynomial& p, const Eigen::VectorXd& h) {
  const std::size_t n = p.dimension();
  require(static_cast<std::size_t>(h.size()) == n, "hessian_inf_norm_on_box: dimension mismatch");
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double row = 0.0;
    const SparsePolynomial pj = p.derivative(j);
    for (double v : gradient_sup_on_box(pj, h)) row += v;
    best = std::max(best, row);
  }
  return round_up(best);
}

double growth_exponent_c3(const SparsePolynomial& p, const QuadraticForm& A, double c2) {
  require(A.positive_definite, "growth_exponent_c3: A must be positive definite");
  require(c2 >= 0.0, "growth_exponent_c3: c2 must be nonnegative");
  const double nd = static_cast<double>(A.dim());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.A, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double s = c2 * lmin / nd;
  double total = 0.0;
  for (const auto& [e, c] : p.terms()) {
    const int k = std::accumulate(e.begin(), e.end(), 0);
    if (k == 0) {
      total += std::abs(c);
      continue;
    }
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    total += std::abs(c) * std::pow(k / (2.0 * s * std::numbers::e), k / 2.0);
  }
  if (total <= 1.0) return 0.0;
  if (nd <= 1.0) return std::numeric_limits<double>::infinity();
  return round_up(std::log(total) / std::log(nd));
}

}  // namespace cm::gauss
