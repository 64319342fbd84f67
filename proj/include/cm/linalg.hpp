#pragma once

// Matrix norms, positive-semidefinite roots, the whitening factorization
// T^T A_D T = I with its norm certificate, and the rank expansion that
// lifts an integral over a subspace Q(R^n) to full dimension.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cm/common.hpp"

namespace cm::linalg {

struct MatrixNorms {
  double norm1 = 0.0;    // max column abs-sum
  double norminf = 0.0;  // max row abs-sum
  double normmax = 0.0;  // max abs entry
};

MatrixNorms matrix_norms(const Eigen::MatrixXd& M);

// Throws PreconditionError unless M is square and symmetric to 1e-12
// relative to its largest entry.
void require_symmetric(const Eigen::MatrixXd& M, const std::string& who);

class NotPsdError : public PreconditionError {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : PreconditionError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

struct PsdRoots {
  Eigen::MatrixXd sqrt;
  std::optional<Eigen::MatrixXd> invsqrt;  // present iff M is nonsingular
  double min_eigenvalue = 0.0;
};

// Eigenvalues >= -1e-10 (relative to the largest magnitude) are clipped to 0.
PsdRoots psd_roots(const Eigen::MatrixXd& M);

struct CertificateLine {
  std::string part;  // "a", "b" or "d"
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct WhiteningOptions {
  int probes = 100;
  std::uint64_t seed = 0x5eed;
  // Overrides eigenvalue-threshold kernel detection.
  std::optional<int> kernel_dim;
};

struct WhiteningResult {
  Eigen::MatrixXd A_D;
  Eigen::MatrixXd T;
  int n_perp = 0;
  double r = 0.0;
  double gamma = 0.0;
  double whitening_residual = 0.0;  // ||T^T A_D T - I||_max
  std::vector<CertificateLine> certificate;
  bool all_pass() const;
};

// Builds A_D and T for positive-semidefinite A and positive diagonal D
// (given as its diagonal). Verifies ||A - D||_max <= r d_min / n exactly and
// the gamma hypothesis on random probes plus the eigenbases of A and of
// D^{-1/2} A D^{-1/2}. The certificate compares every displayed bound of
// parts (a), (b), (d); the lemma has no part (c).
WhiteningResult regularize_and_whiten(const Eigen::MatrixXd& A, const Eigen::VectorXd& d, double r, double gamma,
                                      const WhiteningOptions& opt = {});

// Two columns per line: the check with its numbers, then PASS or FAIL.
std::string format_certificate(const WhiteningResult& w);

struct RankExpansion {
  int n_perp = 0;
  double log_scale = 0.0;  // log of pi^{-n_perp/2} |Q^TQ + W^TW|^{1/2}
  double scale = 0.0;
  double K_bound = 0.0;
  double kappa = 0.0;  // 0 only when W = 0, where K = 0
  double inner_box_halfwidth = 0.0;
  double outer_box_halfwidth = 0.0;
};

RankExpansion rank_expansion(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& W, const Eigen::MatrixXd& P,
                             const Eigen::MatrixXd& R, double rho, double rho1, double rho2);

// Numerical rank with relative tolerance tol * largest singular value.
int numerical_rank(const Eigen::MatrixXd& M, double tol = 1e-10);

}  // namespace cm::linalg
