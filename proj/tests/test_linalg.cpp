#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cm/linalg.hpp"

using namespace cm;
using namespace cm::linalg;
using boost::math::quadrature::gauss_kronrod;

namespace {

struct Instance {
  Eigen::MatrixXd A;
  Eigen::VectorXd d;
  double r, gamma;
  int kernel;
};

// A = D^{1/2} B' D^{1/2}, with B' a small symmetric perturbation of I
// compressed away from a random delocalized kernel.
Instance random_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim(4, 50), ker(0, 2);
  std::uniform_real_distribution<double> dd(1.0, 3.0), eps(0.05, 0.6);
  std::normal_distribution<double> z;
  const int n = dim(gen);
  const int k = ker(gen);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = dd(gen);
  Eigen::MatrixXd E(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) E(i, j) = z(gen);
  E = (eps(gen) * (E + E.transpose()) / (2.0 * n)).eval();
  Eigen::MatrixXd Y(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) Y(i, j) = 1.0 + 0.3 * z(gen);
  Eigen::MatrixXd Pk = Eigen::MatrixXd::Zero(n, n);
  if (k > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    const Eigen::MatrixXd Qy = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    Pk = Qy * Qy.transpose();
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Bp = (I - Pk) * (I + E) * (I - Pk);
  Bp = (0.5 * (Bp + Bp.transpose())).eval();
  const Eigen::VectorXd dh = d.cwiseSqrt();
  Instance in;
  in.A = dh.asDiagonal() * Bp * dh.asDiagonal();
  in.d = d;
  in.kernel = k;
  in.r = (in.A - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() * n / d.minCoeff() * 1.001;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bp);
  in.gamma = std::min(1.0, es.eigenvalues()(k) * 0.999);
  return in;
}

}  // namespace

TEST_CASE("matrix norms examples") {
  auto a = matrix_norms(Eigen::MatrixXd::Identity(3, 3));
  CHECK(a.norm1 == 1.0);
  CHECK(a.norminf == 1.0);
  CHECK(a.normmax == 1.0);
  auto b = matrix_norms(Eigen::Matrix2d{{1, -2}, {3, 4}});
  CHECK(b.norm1 == 6.0);
  CHECK(b.norminf == 7.0);
  CHECK(b.normmax == 4.0);
  auto z = matrix_norms(Eigen::MatrixXd::Zero(2, 2));
  CHECK(z.norm1 == 0.0);
  CHECK(z.normmax == 0.0);
}

TEST_CASE("psd roots") {
  auto r = psd_roots(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix());
  CHECK((r.sqrt - Eigen::Matrix2d{{2, 0}, {0, 3}}).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(r.invsqrt);
  CHECK((*r.invsqrt - Eigen::Matrix2d{{0.5, 0}, {0, 1.0 / 3}}).cwiseAbs().maxCoeff() < 1e-14);
  auto id = psd_roots(Eigen::MatrixXd::Identity(3, 3));
  CHECK((id.sqrt - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK((*id.invsqrt - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  Eigen::Matrix2d m{{2, 1}, {1, 2}};
  auto s = psd_roots(m);
  CHECK((s.sqrt * s.sqrt - m).cwiseAbs().maxCoeff() < 1e-10);
  auto sing = psd_roots(Eigen::Matrix2d{{1, 1}, {1, 1}});
  CHECK_FALSE(sing.invsqrt);
  try {
    psd_roots(Eigen::Matrix2d{{1, 2}, {2, 1}});
    FAIL("expected NotPsdError");
  } catch (const NotPsdError& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-1.0));
  }
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 9;
    Eigen::MatrixXd G(n, n - 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n - 1; ++j) G(i, j) = z(gen);
    const Eigen::MatrixXd M = G * G.transpose();  // rank n-1
    const auto rt = psd_roots(M);
    CHECK((rt.sqrt * rt.sqrt - M).cwiseAbs().maxCoeff() <= 1e-9 * M.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("whitening examples") {
  auto w = regularize_and_whiten(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), 0.5, 1.0);
  CHECK(w.n_perp == 0);
  CHECK((w.A_D - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK((w.T - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK(w.all_pass());

  // Regular-tournament form after expansion.
  for (int n : {5, 7, 9}) {
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) * (n / 2.0);
    auto t = regularize_and_whiten(A, A.diagonal(), 0.1, 1.0);
    CHECK((t.T - std::sqrt(2.0 / n) * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(t.all_pass());
  }

  const double c = 2.5;
  Eigen::Matrix2d A{{c, -c}, {-c, c}};
  auto k = regularize_and_whiten(A, Eigen::Vector2d(c, c), 2.0, 1.0);
  CHECK(k.n_perp == 1);
  CHECK((k.A_D - c * Eigen::Matrix2d{{1.5, -0.5}, {-0.5, 1.5}}).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((k.T.transpose() * k.A_D * k.T - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(k.all_pass());
  CHECK(format_certificate(k).find("PASS") != std::string::npos);
}

TEST_CASE("whitening preconditions") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(regularize_and_whiten(2 * I, Eigen::VectorXd::Ones(3), 0.1, 1.0), PreconditionError);
  // Kernel hidden from a gamma-claim that is too large.
  Eigen::Matrix2d A{{1.0, 0.0}, {0.0, 0.5}};
  CHECK_THROWS_AS(regularize_and_whiten(A, Eigen::Vector2d(1, 1), 2.0, 1.0), PreconditionError);
  CHECK_NOTHROW(regularize_and_whiten(A, Eigen::Vector2d(1, 1), 2.0, 0.5));
  // An eigenvalue in the ambiguous band must be resolved by the caller.
  Eigen::Matrix2d amb{{1.0, 0.0}, {0.0, 1e-7}};
  CHECK_THROWS_AS(regularize_and_whiten(amb, Eigen::Vector2d(1, 1), 4.0, 1e-7), PreconditionError);
  WhiteningOptions o;
  o.kernel_dim = 1;
  auto w = regularize_and_whiten(amb, Eigen::Vector2d(1, 1), 4.0, 1.0, o);
  CHECK(w.n_perp == 1);
}

TEST_CASE("whitening certificates on random instances") {
  std::mt19937_64 gen(4010);
  int failed = 0;
  for (int t = 0; t < 60; ++t) {
    const auto in = random_instance(gen);
    const auto w = regularize_and_whiten(in.A, in.d, in.r, in.gamma);
    CHECK(w.n_perp == in.kernel);
    CHECK(w.whitening_residual <= 1e-9);
    CHECK(w.n_perp <= in.r * in.r);
    if (!w.all_pass()) {
      ++failed;
      MESSAGE(format_certificate(w));
    }
  }
  CHECK(failed == 0);
}

TEST_CASE("rank expansion examples") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3), Z = Eigen::MatrixXd::Zero(3, 3);
  auto full = rank_expansion(I, Z, I, 5 * I, 3.0, 1.0, 2.0);
  CHECK(full.n_perp == 0);
  CHECK(full.scale == doctest::Approx(1.0));
  CHECK(full.K_bound == 0.0);
  CHECK(full.inner_box_halfwidth <= full.outer_box_halfwidth);

  for (int n : {3, 5, 9}) {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd en = Eigen::MatrixXd::Zero(n, n);
    en.col(n - 1) = one;  // x -> x_n 1
    const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd Q = In - en;
    const Eigen::MatrixXd W = one * one.transpose() / std::sqrt(2.0 * n);
    const Eigen::MatrixXd P = In - one * one.transpose() / n;
    const Eigen::MatrixXd R = std::sqrt(2.0 / n) * In;
    auto t = rank_expansion(Q, W, P, R, std::log(n) + 3, 2.0, 3.0);
    CHECK(t.n_perp == 1);
    CHECK(t.kappa == doctest::Approx(1 / std::sqrt(double(n))));
    CHECK(t.scale == doctest::Approx(n / std::sqrt(2 * std::numbers::pi)));
    CHECK(t.K_bound < 1.0);
    CHECK(t.inner_box_halfwidth <= t.outer_box_halfwidth);

    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    w.head(n / 2).setConstant(-1.0);
    Eigen::MatrixXd ew = Eigen::MatrixXd::Zero(n, n);
    ew.col(n - 1) = w;
    auto b = rank_expansion(In - ew, w * w.transpose() / std::sqrt(double(n)), In - w * w.transpose() / n,
                            In / std::sqrt(double(n)), std::log(n), 2.0, 3.0);
    CHECK(b.n_perp == 1);
  }

  CHECK_THROWS_AS(rank_expansion(I, Z, I, Z, 0.0, 1.0, 2.0), PreconditionError);
  CHECK_THROWS_AS(rank_expansion(I, Z, 2 * I, Z, 1.0, 1.0, 2.0), PreconditionError);
  Eigen::MatrixXd Q1 = I;
  Q1(0, 0) = 0;
  CHECK_THROWS_AS(rank_expansion(Q1, Z, I, Z, 1.0, 1.0, 2.0), PreconditionError);
}

TEST_CASE("rank expansion integral identity by quadrature") {
  // Q x = x - x_n v, W = s v v^T. Substituting x = y + t v with y_n = 0 gives
  // Q x = y, so the right side is a nested quadrature over (y, t).
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u(-1, 1), sd(0.3, 1.5);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n - 1; ++i) v(i) = u(gen);
    v(n - 1) = 1.0;
    const double s = sd(gen);
    const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd ev = Eigen::MatrixXd::Zero(n, n);
    ev.col(n - 1) = v;
    const Eigen::MatrixXd Q = In - ev, W = s * v * v.transpose();
    // P Q + R W = I with P = I - v v^T/|v|^2 and R = v v^T / (s |v|^4).
    const double v2 = v.squaredNorm();
    const Eigen::MatrixXd P = In - v * v.transpose() / v2, R = v * v.transpose() / (s * v2 * v2);
    const double rho = 3.0, rho2 = 1.5;
    const auto re = rank_expansion(Q, W, P, R, rho, rho2, rho2);

    // F(y) = 1 + y_1 + 0.5 y_1^2 (+ 0.3 y_1 y_2) on Omega = U(rho2).
    auto F = [&](const Eigen::VectorXd& y) {
      double f = 1 + y(0) + 0.5 * y(0) * y(0);
      if (n == 3) f += 0.3 * y(0) * y(1);
      return f;
    };
    // Inner integral over t for a fixed y: W x = s v (v.y + t |v|^2) must
    // lie in U(rho).
    auto inner = [&](const Eigen::VectorXd& y) {
      const double c = rho / (s * v.cwiseAbs().maxCoeff());
      const double vy = v.dot(y);
      const double lo = (-c - vy) / v2, hi = (c - vy) / v2;
      auto g = [&](double t) {
        const Eigen::VectorXd x = y + t * v;
        return std::exp(-x.dot(W.transpose() * W * x));
      };
      return gauss_kronrod<double, 31>::integrate(g, lo, hi, 15, 1e-12);
    };
    double lhs, rhs;
    if (n == 2) {
      auto fy = [&](double a) { Eigen::VectorXd y(2); y << a, 0; return F(y); };
      auto fr = [&](double a) { Eigen::VectorXd y(2); y << a, 0; return F(y) * inner(y); };
      lhs = gauss_kronrod<double, 31>::integrate(fy, -rho2, rho2, 15, 1e-12);
      rhs = gauss_kronrod<double, 31>::integrate(fr, -rho2, rho2, 15, 1e-12);
    } else {
      auto outer = [&](bool withw) {
        return gauss_kronrod<double, 15>::integrate([&](double a) {
          return gauss_kronrod<double, 15>::integrate([&](double b) {
            Eigen::VectorXd y(3); y << a, b, 0;
            return F(y) * (withw ? inner(y) : 1.0);
          }, -rho2, rho2, 10, 1e-11);
        }, -rho2, rho2, 10, 1e-11);
      };
      lhs = outer(false);
      rhs = outer(true);
    }
    // lhs = (1-K)^{-1} scale rhs with 0 <= K < K_bound.
    const double oneMinusK = re.scale * rhs / lhs;
    CHECK(oneMinusK <= 1 + 1e-6);
    CHECK(oneMinusK >= 1 - re.K_bound - 1e-6);
  }
}
