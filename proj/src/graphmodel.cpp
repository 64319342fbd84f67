#include <cmath>
#include <numbers>
#include <set>

#include "cm/graphenum.hpp"

namespace cm::graphs {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_mode(const SaddleSolution& sol, const DegreeSequence& d) {
  require((sol.mode == Mode::Bipartite) == d.bipartite(), "saddle solution and degree sequence disagree on mode");
  require(sol.beta.size() == d.n(), "saddle solution has the wrong dimension");
}

bool hypotheses_5_2(const HStats& st, int n, const EnumConstants& k) {
  return st.s_max <= k.c1 * std::pow(n, 1.0 / 6.0) && st.S2 <= k.c2 * n;
}

double count_radius(const HStats& st, int n, const EnumConstants& k) {
  const double sm = st.s_max;
  return std::expm1(k.c * (1 + sm * sm * sm) * std::pow(n, -0.5 + k.eps));
}

}  // namespace

gauss::SparsePolynomial GraphModel::polynomial() const {
  const std::size_t n = static_cast<std::size_t>(form.dim());
  gauss::SparsePolynomial f(n);
  const cplx I(0.0, 1.0);
  for (const auto& t : terms) {
    const std::vector<std::pair<std::size_t, double>> y{{t.e.first, 1.0}, {t.e.second, 1.0}};
    const cplx coef[] = {I * t.c1, t.c2, I * t.c3, t.c4};
    for (int p = 1; p <= 4; ++p)
      if (coef[p - 1] != 0.0) f += gauss::SparsePolynomial::linear_power(n, y, p) * coef[p - 1];
  }
  return f;
}

GraphModel build_model(const SaddleSolution& sol, const DegreeSequence& d, const ConstraintPair& H) {
  check_mode(sol, d);
  H.validate(d);
  const int n = d.n();
  std::set<Edge> plus, minus;
  for (auto e : H.plus) plus.insert(make_edge(e.first, e.second));
  for (auto e : H.minus) minus.insert(make_edge(e.first, e.second));

  GraphModel m;
  m.mode = sol.mode;
  m.stats = H.stats(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      if (!d.relevant(j, k)) continue;
      const double l = sol.lambda(j, k), a = l * (1 - l);
      A(j, j) += 0.5 * a;
      A(k, k) += 0.5 * a;
      A(j, k) += 0.5 * a;
      A(k, j) += 0.5 * a;
      PairTerm t;
      t.e = {j, k};
      if (plus.count(t.e)) {
        t.c1 = 1 - l;
        t.c2 = 0.5 * a;
      } else if (minus.count(t.e)) {
        t.c1 = -l;
        t.c2 = 0.5 * a;
      } else {
        t.c3 = -a * (1 - 2 * l) / 6.0;
        t.c4 = a * (1 - 6 * l + 6 * l * l) / 24.0;
      }
      m.terms.push_back(t);
    }
  if (d.bipartite()) {
    m.w.resize(n);
    for (int v = 0; v < n; ++v) m.w(v) = d.part(v) == 0 ? -1.0 : 1.0;
    A += m.w * m.w.transpose();
  }
  m.form = gauss::QuadraticForm::make(A);
  require(m.form.positive_definite, "build_model: the quadratic form is singular");
  return m;
}

FStats f_statistics(const GraphModel& m) {
  const Eigen::MatrixXd S = gauss::GaussianModel::from_form(m.form).sigma();
  const std::size_t P = m.terms.size();
  std::vector<double> v(P);
  for (std::size_t a = 0; a < P; ++a) {
    const auto [j, k] = m.terms[a].e;
    v[a] = S(j, j) + 2 * S(j, k) + S(k, k);
  }
  FStats out;
  CompensatedSum<double> ere, eim, vre;
  for (std::size_t a = 0; a < P; ++a) {
    const auto& t = m.terms[a];
    ere.add(t.c2 * v[a] + 3 * t.c4 * v[a] * v[a]);
  }
  // Pair-pair sums: y_a and y_b are jointly gaussian with covariance C.
  for (std::size_t a = 0; a < P; ++a) {
    const auto& s = m.terms[a];
    const auto [j, k] = s.e;
    for (std::size_t b = 0; b < P; ++b) {
      const auto& t = m.terms[b];
      const auto [p, q] = t.e;
      const double C = S(j, p) + S(j, q) + S(k, p) + S(k, q);
      const double C2 = C * C, va = v[a], vb = v[b];
      eim.add(s.c1 * t.c1 * C + 3 * (s.c1 * t.c3 * vb + s.c3 * t.c1 * va) * C +
              s.c3 * t.c3 * (9 * va * vb * C + 6 * C2 * C));
      vre.add(2 * s.c2 * t.c2 * C2 + 12 * (s.c2 * t.c4 * vb + s.c4 * t.c2 * va) * C2 +
              s.c4 * t.c4 * (72 * va * vb * C2 + 24 * C2 * C2));
    }
  }
  out.E_re = ere.value();
  out.E_im_sq = eim.value();
  out.var_re = vre.value();
  return out;
}

EnumEstimate estimate_count(const DegreeSequence& d, const ConstraintPair& H, const EnumConstants& k) {
  require(k.eps > 0 && k.c >= 0, "estimate_count: need eps > 0 and c >= 0");
  H.validate(d);
  EnumEstimate est;
  est.saddle = solve_saddle(d);
  const auto& sol = est.saddle;
  est.mode = sol.mode;
  const GraphModel m = build_model(sol, d, H);
  const int n = d.n();

  std::set<Edge> constrained;
  for (const auto* es : {&H.plus, &H.minus})
    for (auto e : *es) constrained.insert(make_edge(e.first, e.second));
  CompensatedSum<double> logC;
  logC.add(-n * std::log(2 * std::numbers::pi));
  for (int v = 0; v < n; ++v) logC.add(-d.d[v] * sol.beta(v));
  for (auto e : H.plus) logC.add(sol.beta(e.first) + sol.beta(e.second));
  for (int j = 0; j < n; ++j)
    for (int q = j + 1; q < n; ++q)
      if (d.relevant(j, q) && !constrained.count({j, q})) logC.add(softplus(sol.beta(j) + sol.beta(q)));

  const FStats fs = f_statistics(m);
  double prefactor = std::log(2.0) + 0.5 * n * std::log(std::numbers::pi);
  if (d.bipartite()) prefactor = std::log(2.0) + 0.5 * (n + 1) * std::log(std::numbers::pi) + std::log(n);
  const double half_log_det = 0.5 * m.form.log_det();

  auto& c = est.components;
  c["log_prefactor"] = prefactor;
  c["log_C"] = logC.value();
  c["half_log_det"] = half_log_det;
  c["E_Re_f"] = fs.E_re;
  c["E_Im_f_sq"] = fs.E_im_sq;
  c["Var_Re_f"] = fs.var_re;
  c["eps"] = k.eps;
  c["c"] = k.c;
  c["s_max"] = m.stats.s_max;
  c["S"] = m.stats.S;
  c["S2"] = m.stats.S2;
  c["delta_tame"] = sol.delta_tame;
  est.hypotheses_hold = hypotheses_5_2(m.stats, n, k);
  c["hypotheses_hold"] = est.hypotheses_hold ? 1.0 : 0.0;
  est.log_count = prefactor + c["log_C"] - half_log_det + fs.E_re - 0.5 * fs.E_im_sq;
  est.error_radius = count_radius(m.stats, n, k);
  return est;
}

ProbEstimate estimate_subgraph_prob(const DegreeSequence& d, const ConstraintPair& H, const EnumConstants& k,
                                    ProbMode mode) {
  require(k.eps > 0 && k.c >= 0 && k.c_prime > 0, "estimate_subgraph_prob: invalid constants");
  H.validate(d);
  const SaddleSolution sol = solve_saddle(d);
  const int n = d.n();
  ProbEstimate out;
  out.mode = mode;
  out.stats = H.stats(n);
  double logp = 0.0;
  for (auto [j, q] : H.plus) logp += std::log(sol.lambda(j, q));
  for (auto [j, q] : H.minus) logp += std::log1p(-sol.lambda(j, q));
  out.prob = std::exp(logp);
  if (mode == ProbMode::TwoSided) {
    out.hypotheses_hold = hypotheses_5_2(out.stats, n, k);
    out.error_radius =
        std::expm1(k.c * out.stats.S2 / n + k.c * (1 + std::pow(out.stats.s_max, 3)) * std::pow(n, -0.5 + k.eps));
    out.caveat = "radius valid for any theorem constant c <= " + std::to_string(k.c);
  } else {
    const double ln = std::log(static_cast<double>(n));
    out.hypotheses_hold = out.stats.s_max <= k.b1 * std::pow(n, 2.0 / 3.0) / (ln * ln) && out.stats.S <= k.b2 * n;
    out.upper_bound = k.c_prime * out.prob;
    out.caveat = "c' is existential; the bound uses the configured c' = " + std::to_string(k.c_prime);
  }
  return out;
}

}  // namespace cm::graphs
