#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cm/common.hpp"

namespace cm::gauss {

using Exponent = std::vector<int>;

// Multivariate polynomial in n real variables with complex coefficients.
// Zero coefficients are never stored.
class SparsePolynomial {
 public:
  explicit SparsePolynomial(std::size_t n = 0) : n_(n) {}

  static SparsePolynomial constant(std::size_t n, cplx c);
  static SparsePolynomial variable(std::size_t n, std::size_t j);
  // (sum_j w_j x_j)^power, expanded.
  static SparsePolynomial linear_power(std::size_t n, const std::vector<std::pair<std::size_t, double>>& form,
                                       int power);

  std::size_t dimension() const { return n_; }
  const std::map<Exponent, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int degree() const;

  void add_term(const Exponent& e, cplx c);

  SparsePolynomial& operator+=(const SparsePolynomial& o);
  SparsePolynomial& operator-=(const SparsePolynomial& o);
  SparsePolynomial& operator*=(cplx s);
  friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }
  friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial& b) { return a -= b; }
  friend SparsePolynomial operator*(SparsePolynomial a, cplx s) { return a *= s; }
  friend SparsePolynomial operator*(cplx s, SparsePolynomial a) { return a *= s; }
  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b);

  SparsePolynomial conj() const;
  SparsePolynomial real_part() const;
  SparsePolynomial imag_part() const;  // real polynomial with coefficients Im c
  SparsePolynomial derivative(std::size_t j) const;
  bool is_real() const;

  cplx evaluate(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::map<Exponent, cplx> terms_;
};

std::string to_string(const Exponent& e);

}  // namespace cm::gauss
