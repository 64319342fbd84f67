#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "cm/linalg.hpp"

namespace cm::linalg {

MatrixNorms matrix_norms(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return {};
  const Eigen::MatrixXd a = M.cwiseAbs();
  return {a.colwise().sum().maxCoeff(), a.rowwise().sum().maxCoeff(), a.maxCoeff()};
}

void require_symmetric(const Eigen::MatrixXd& M, const std::string& who) {
  require(M.rows() == M.cols() && M.rows() > 0, who + ": matrix must be square and nonempty");
  require(M.allFinite(), who + ": non-finite entry");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, who + ": matrix is not symmetric");
}

PsdRoots psd_roots(const Eigen::MatrixXd& M) {
  require_symmetric(M, "psd_roots");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  const double top = std::max(1e-300, ev.cwiseAbs().maxCoeff());
  const double lo = ev.minCoeff();
  if (lo < -1e-10 * top)
    throw NotPsdError("psd_roots: matrix is not positive semidefinite (min eigenvalue " + std::to_string(lo) + ")",
                      lo);
  ev = ev.cwiseMax(0.0);
  const Eigen::MatrixXd& V = es.eigenvectors();
  PsdRoots out;
  out.min_eigenvalue = ev.minCoeff();
  out.sqrt = V * ev.cwiseSqrt().asDiagonal() * V.transpose();
  if (out.min_eigenvalue > 0.0) out.invsqrt = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
  return out;
}

int numerical_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

RankExpansion rank_expansion(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& W, const Eigen::MatrixXd& P,
                             const Eigen::MatrixXd& R, double rho, double rho1, double rho2) {
  const Eigen::Index n = Q.rows();
  for (const auto* M : {&Q, &W, &P, &R})
    require(M->rows() == n && M->cols() == n && n > 0, "rank_expansion: all operators must be n x n");
  require(rho > 0.0 && rho1 > 0.0 && rho1 <= rho2, "rank_expansion: need rho > 0 and 0 < rho1 <= rho2");

  Eigen::MatrixXd stacked(2 * n, n);
  stacked << Q, W;
  const int rank_q = numerical_rank(Q), rank_w = numerical_rank(W);
  require(numerical_rank(stacked) == n, "rank_expansion: ker Q and ker W intersect nontrivially");
  require((n - rank_q) + (n - rank_w) == n, "rank_expansion: ker Q and ker W do not span R^n");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  require((P * Q + R * W - id).cwiseAbs().maxCoeff() <= 1e-9, "rank_expansion: PQ + RW differs from I");

  RankExpansion out;
  out.n_perp = static_cast<int>(n - rank_q);
  const Eigen::MatrixXd G = Q.transpose() * Q + W.transpose() * W;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  require(llt.info() == Eigen::Success, "rank_expansion: Q^TQ + W^TW is singular");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  out.log_scale = -0.5 * out.n_perp * std::log(std::numbers::pi) + 0.5 * logdet;
  out.scale = std::exp(out.log_scale);

  // kappa = max_i ||P_C e_i||_2 with P_C the projector onto colspace(W):
  // the sup of |v_i| / ||v||_2 over v in C is attained at v = P_C e_i.
  if (rank_w > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU);
    const Eigen::MatrixXd U = svd.matrixU().leftCols(rank_w);
    out.kappa = std::min(1.0, std::sqrt(U.rowwise().squaredNorm().maxCoeff()));
    out.K_bound = std::min(1.0, static_cast<double>(n) * std::exp(-rho * rho / (out.kappa * out.kappa)));
  }
  const auto nq = matrix_norms(Q), nw = matrix_norms(W), np = matrix_norms(P), nr = matrix_norms(R);
  out.inner_box_halfwidth = std::min(rho1 / nq.norminf, nw.norminf > 0 ? rho / nw.norminf : INFINITY);
  out.outer_box_halfwidth = np.norminf * rho2 + nr.norminf * rho;
  return out;
}

}  // namespace cm::linalg
