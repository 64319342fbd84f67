#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "cm/linalg.hpp"

namespace cm::linalg {

namespace {

constexpr double kKernelTol = 1e-10;
constexpr double kAmbiguousTol = 1e-6;

// Passing allows rounding in the measured quantity relative to `ref`, the
// magnitude of the matrices whose difference or norm was measured.
CertificateLine line(const std::string& part, const std::string& name, double bound, double measured,
                     double ref) {
  const double slack = 1e-12 * std::max(1.0, ref);
  return {part, name, bound, measured, measured <= bound + slack};
}

}  // namespace

bool WhiteningResult::all_pass() const {
  return std::all_of(certificate.begin(), certificate.end(), [](const auto& l) { return l.pass; });
}

WhiteningResult regularize_and_whiten(const Eigen::MatrixXd& A_in, const Eigen::VectorXd& d, double r,
                                      double gamma, const WhiteningOptions& opt) {
  require_symmetric(A_in, "regularize_and_whiten");
  const Eigen::Index n = A_in.rows();
  require(d.size() == n, "regularize_and_whiten: D has the wrong dimension");
  require((d.array() > 0.0).all() && d.allFinite(), "regularize_and_whiten: D must be positive");
  require(r > 0.0 && std::isfinite(r), "regularize_and_whiten: r must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "regularize_and_whiten: gamma must lie in (0, 1]");
  const Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
  const double nd = static_cast<double>(n);
  const double dmin = d.minCoeff(), dmax = d.maxCoeff();
  const Eigen::MatrixXd D = d.asDiagonal();

  const double dev = (A - D).cwiseAbs().maxCoeff();
  require(dev <= r * dmin / nd * (1 + 1e-12),
          "regularize_and_whiten: ||A - D||_max = " + std::to_string(dev) + " exceeds r d_min / n = " +
              std::to_string(r * dmin / nd));

  const Eigen::VectorXd dh = d.cwiseSqrt(), dhi = dh.cwiseInverse();
  const Eigen::MatrixXd B = dhi.asDiagonal() * A * dhi.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  if (ev.minCoeff() < -kKernelTol * top)
    throw NotPsdError("regularize_and_whiten: A is not positive semidefinite", ev.minCoeff() * dmax);

  // Eigenvalues are sorted ascending, so the kernel is a leading block.
  int k = 0;
  if (opt.kernel_dim) {
    k = *opt.kernel_dim;
    require(k >= 0 && k < n, "regularize_and_whiten: kernel dimension out of range");
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double rel = ev(i) / top;
      if (rel < kKernelTol) {
        ++k;
      } else if (rel <= kAmbiguousTol) {
        throw PreconditionError("regularize_and_whiten: eigenvalue " + std::to_string(ev(i)) +
                                " is too close to zero to classify; pass the kernel dimension explicitly");
      }
    }
  }
  require(k < n, "regularize_and_whiten: A is zero");

  const Eigen::MatrixXd Y = V.leftCols(k);  // orthonormal basis of D^{1/2} ker A
  const Eigen::MatrixXd PD = Y * Y.transpose();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  // gamma hypothesis: x^T A x >= gamma x^T D^{1/2}(I - P_D)D^{1/2} x.
  const Eigen::MatrixXd Q = dh.asDiagonal() * (id - PD) * dh.asDiagonal();
  auto check = [&](const Eigen::VectorXd& x, const char* source) {
    const double lhs = x.dot(A * x), rhs = gamma * x.dot(Q * x);
    const double tol = 1e-10 * (std::abs(lhs) + x.dot(D * x));
    if (lhs < rhs - tol) {
      std::ostringstream os;
      os << "regularize_and_whiten: gamma hypothesis fails on " << source << " probe: x^T A x = " << lhs
         << " < gamma x_par^T D x_par = " << rhs;
      throw PreconditionError(os.str());
    }
  };
  std::mt19937_64 gen(opt.seed);
  std::normal_distribution<double> z;
  for (int t = 0; t < opt.probes; ++t) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = z(gen);
    check(x, "random");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
  for (Eigen::Index i = 0; i < n; ++i) check(ea.eigenvectors().col(i), "eigenbasis(A)");
  for (Eigen::Index i = 0; i < n; ++i) check(dhi.asDiagonal() * V.col(i), "eigenbasis(B)");

  WhiteningResult out;
  out.n_perp = k;
  out.r = r;
  out.gamma = gamma;
  out.A_D = A + dh.asDiagonal() * PD * dh.asDiagonal();
  // B + P_{ker B} has eigenvalues ev (off the kernel) and 1 (on it).
  Eigen::VectorXd shifted = ev;
  for (int i = 0; i < k; ++i) shifted(i) = 1.0;
  const Eigen::MatrixXd M = V * shifted.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
  const Eigen::MatrixXd Minv = V * shifted.cwiseSqrt().asDiagonal() * V.transpose();
  out.T = dhi.asDiagonal() * M;
  const Eigen::MatrixXd Tinv = Minv * dh.asDiagonal();
  out.whitening_residual = (out.T.transpose() * out.A_D * out.T - id).cwiseAbs().maxCoeff();

  const Eigen::MatrixXd ADinv = out.T * out.T.transpose();  // since T^T A_D T = I
  const double np = static_cast<double>(k), sg = std::sqrt(gamma);
  const double sdmin = std::sqrt(dmin), sdmax = std::sqrt(dmax);
  const auto nA = matrix_norms(out.A_D - A);
  const auto nT = matrix_norms(out.T), nTi = matrix_norms(Tinv);
  const double scaleA = A.cwiseAbs().maxCoeff() * nd;
  auto& c = out.certificate;
  c.push_back(line("a", "||A_D - A||_inf", r * np * sdmax * sdmin, nA.norminf, scaleA));
  c.push_back(line("a", "||A_D - A||_max", r * r * np * dmin / nd, nA.normmax, scaleA));
  c.push_back(line("a", "n_perp", r * r, np, 0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ead(out.A_D, Eigen::EigenvaluesOnly);
  const double ad_min = ead.eigenvalues()(0);
  c.push_back({"b", "-lambda_min(A_D)", 0.0, -ad_min, ad_min > 0.0});
  c.push_back(line("b", "||A_D^-1||_inf", (r + gamma) / (gamma * dmin), matrix_norms(ADinv).norminf,
                   nd / dmin));
  c.push_back(line("b", "||A_D^-1 - D^-1||_max", (r + gamma) * r / (gamma * nd * dmin) * (1 + r * np),
                   matrix_norms(ADinv - Eigen::MatrixXd(d.cwiseInverse().asDiagonal())).normmax, 1.0 / dmin));
  const double tb = (r + sg) / (sg * sdmin);
  c.push_back(line("d", "||T||_1", tb, nT.norm1, nT.norm1));
  c.push_back(line("d", "||T||_inf", tb, nT.norminf, nT.norminf));
  const double tib = ((r + 1) * (r + sg) / sg + r * np) * sdmax;
  c.push_back(line("d", "||T^-1||_1", tib, nTi.norm1, nTi.norm1));
  c.push_back(line("d", "||T^-1||_inf", tib, nTi.norminf, nTi.norminf));
  c.push_back(line("d", "||T - D^-1/2||_max", ((r * r + r) / 2 + r * r / sg) / (sdmin * nd),
                   matrix_norms(out.T - Eigen::MatrixXd(dhi.asDiagonal())).normmax, 1.0 / sdmin));
  c.push_back(line("d", "||T^-1 - D^1/2||_max",
                   (1.5 * r + r * r * (0.5 + 2 / sg + np) + r * r * r * np / sg) * sdmax / nd,
                   matrix_norms(Tinv - Eigen::MatrixXd(dh.asDiagonal())).normmax, sdmax));
  c.push_back({"d", "||T^T A_D T - I||_max", 1e-9, out.whitening_residual, out.whitening_residual <= 1e-9});
  return out;
}

std::string format_certificate(const WhiteningResult& w) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (const auto& l : w.certificate)
    os << "(" << l.part << ") " << l.name << " = " << l.measured << " <= " << l.bound << '\t'
       << (l.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace cm::linalg
