#include <algorithm>
#include <random>
#include <thread>

#include "cm/gaussian.hpp"

namespace cm::gauss {

BoxSpec BoxSpec::axis(const Eigen::VectorXd& h) {
  require((h.array() >= 0.0).all(), "BoxSpec: negative halfwidth");
  BoxSpec b;
  b.kind = Kind::Axis;
  b.halfwidth = h;
  return b;
}

BoxSpec BoxSpec::t_image(const Eigen::MatrixXd& T, double rho) {
  require(T.rows() == T.cols(), "BoxSpec: T must be square");
  require(rho > 0.0, "BoxSpec: rho must be positive");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  require(lu.isInvertible(), "BoxSpec: T must be invertible");
  BoxSpec b;
  b.kind = Kind::TImage;
  b.T_inverse = lu.inverse();
  b.rho = rho;
  return b;
}

bool BoxSpec::contains(const Eigen::VectorXd& x) const {
  switch (kind) {
    case Kind::Whole:
      return true;
    case Kind::Axis:
      return (x.array().abs() <= halfwidth.array()).all();
    case Kind::TImage:
      return (T_inverse * x).cwiseAbs().maxCoeff() <= rho;
  }
  return false;
}

namespace {

// Welford accumulator for a complex mean and E|v - mean|^2.
struct Shard {
  std::uint64_t draws = 0;
  std::uint64_t n = 0;
  cplx mean = 0.0;
  double m2 = 0.0;

  void push(cplx v) {
    ++n;
    const cplx d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += std::real(d * std::conj(v - mean));
  }
  void merge(const Shard& o) {
    draws += o.draws;
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const cplx d = o.mean - mean;
    const double tot = na + nb;
    mean += d * (nb / tot);
    m2 += o.m2 + std::norm(d) * na * nb / tot;
    n += o.n;
  }
};

}  // namespace

MCResult mc_expectation(const GaussianModel& model, const BoxSpec& box,
                        const std::function<cplx(const Eigen::VectorXd&)>& phi, std::uint64_t samples,
                        std::uint64_t seed, int threads) {
  require(samples >= 1000, "mc_expectation: at least 1000 samples required");
  const Eigen::Index n = static_cast<Eigen::Index>(model.n());
  if (box.kind == BoxSpec::Kind::Axis) require(box.halfwidth.size() == n, "mc_expectation: box dimension mismatch");
  if (box.kind == BoxSpec::Kind::TImage) require(box.T_inverse.rows() == n, "mc_expectation: box dimension mismatch");

  std::vector<Shard> shards(kMCShards);
  auto run = [&](int s) {
    const std::uint64_t quota = samples / kMCShards + (static_cast<std::uint64_t>(s) < samples % kMCShards ? 1 : 0);
    std::mt19937_64 gen(seed + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd u(n), x(n);
    Shard& acc = shards[static_cast<std::size_t>(s)];
    for (std::uint64_t t = 0; t < quota; ++t) {
      for (Eigen::Index i = 0; i < n; ++i) u(i) = z(gen);
      x.noalias() = model.chol() * u;
      ++acc.draws;
      if (box.contains(x)) acc.push(phi(x));
    }
  };
  const int workers = std::clamp(threads, 1, kMCShards);
  if (workers == 1) {
    for (int s = 0; s < kMCShards; ++s) run(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int s = w; s < kMCShards; s += workers) run(s);
      });
    for (auto& t : pool) t.join();
  }
  Shard total;
  for (const auto& s : shards) total.merge(s);

  MCResult r;
  r.draws = total.draws;
  r.accepted = total.n;
  r.reject_rate = 1.0 - static_cast<double>(total.n) / static_cast<double>(total.draws);
  if (r.reject_rate > 0.999 || total.n < 2)
    throw PreconditionError("mc_expectation: rejection rate " + std::to_string(r.reject_rate) +
                            " exceeds 0.999; the box holds too little gaussian mass");
  r.estimate = total.mean;
  r.std_error = std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n));
  return r;
}

MCResult mc_truncated_expectation(const QuadraticForm& A, const SparsePolynomial& f, const BoxSpec& box,
                                  std::uint64_t samples, std::uint64_t seed, int threads) {
  require(f.dimension() == static_cast<std::size_t>(A.dim()), "mc_truncated_expectation: dimension mismatch");
  const GaussianModel model = GaussianModel::from_form(A);
  return mc_expectation(
      model, box,
      [&f](const Eigen::VectorXd& x) { return std::exp(f.evaluate(std::span<const double>(x.data(), x.size()))); },
      samples, seed, threads);
}

}  // namespace cm::gauss
