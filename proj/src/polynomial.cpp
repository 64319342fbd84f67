#include "cm/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cm::gauss {

SparsePolynomial SparsePolynomial::constant(std::size_t n, cplx c) {
  SparsePolynomial p(n);
  p.add_term(Exponent(n, 0), c);
  return p;
}

SparsePolynomial SparsePolynomial::variable(std::size_t n, std::size_t j) {
  require(j < n, "SparsePolynomial::variable: index out of range");
  SparsePolynomial p(n);
  Exponent e(n, 0);
  e[j] = 1;
  p.add_term(e, 1.0);
  return p;
}

SparsePolynomial SparsePolynomial::linear_power(std::size_t n,
                                                const std::vector<std::pair<std::size_t, double>>& form,
                                                int power) {
  require(power >= 0, "linear_power: negative power");
  SparsePolynomial lin(n);
  for (auto [j, w] : form) {
    require(j < n, "linear_power: index out of range");
    Exponent e(n, 0);
    e[j] = 1;
    lin.add_term(e, w);
  }
  SparsePolynomial out = constant(n, 1.0);
  for (int k = 0; k < power; ++k) out = out * lin;
  return out;
}

int SparsePolynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

void SparsePolynomial::add_term(const Exponent& e, cplx c) {
  require(e.size() == n_, "SparsePolynomial: exponent length does not match dimension");
  for (int v : e) require(v >= 0, "SparsePolynomial: negative exponent");
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

SparsePolynomial& SparsePolynomial::operator+=(const SparsePolynomial& o) {
  require(o.n_ == n_, "SparsePolynomial: dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

SparsePolynomial& SparsePolynomial::operator-=(const SparsePolynomial& o) {
  require(o.n_ == n_, "SparsePolynomial: dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

SparsePolynomial& SparsePolynomial::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
  require(a.n_ == b.n_, "SparsePolynomial: dimension mismatch");
  SparsePolynomial out(a.n_);
  Exponent e(a.n_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t j = 0; j < a.n_; ++j) e[j] = ea[j] + eb[j];
      out.add_term(e, ca * cb);
    }
  return out;
}

SparsePolynomial SparsePolynomial::conj() const {
  SparsePolynomial out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, std::conj(c));
  return out;
}

SparsePolynomial SparsePolynomial::real_part() const {
  SparsePolynomial out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, c.real());
  return out;
}

SparsePolynomial SparsePolynomial::imag_part() const {
  SparsePolynomial out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, c.imag());
  return out;
}

SparsePolynomial SparsePolynomial::derivative(std::size_t j) const {
  require(j < n_, "derivative: index out of range");
  SparsePolynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[j] == 0) continue;
    Exponent d = e;
    d[j] -= 1;
    out.add_term(d, c * static_cast<double>(e[j]));
  }
  return out;
}

bool SparsePolynomial::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.imag() == 0.0; });
}

cplx SparsePolynomial::evaluate(std::span<const double> x) const {
  require(x.size() == n_, "evaluate: point dimension mismatch");
  cplx acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (std::size_t j = 0; j < n_; ++j)
      for (int k = 0; k < e[j]; ++k) m *= x[j];
    acc += c * m;
  }
  return acc;
}

std::string to_string(const Exponent& e) {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < e.size(); ++j) os << (j ? "," : "") << e[j];
  os << ']';
  return os.str();
}

}  // namespace cm::gauss
