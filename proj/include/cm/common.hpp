#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cm {

using cplx = std::complex<double>;

// Input violates an operation's documented precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exhaustive or enumerative computation would exceed its configured
// budget (CLI exit code 3).
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method failed to converge (reported as a precondition failure
// at the CLI since it signals an out-of-range input).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nudges a nonnegative bound one ulp toward +inf so that rounding in the
// last operation cannot make a certificate invalid. Exact zeros stay zero.
inline double round_up(double x) {
  if (x == 0.0) return 0.0;
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

// Neumaier compensated summation; order-independent to within rounding of
// the compensation term, which is what the exhaustive oracles rely on.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if constexpr (std::is_same_v<T, cplx>) {
      comp_ += cplx(comp_part(sum_.real(), x.real(), t.real()),
                    comp_part(sum_.imag(), x.imag(), t.imag()));
    } else {
      comp_ += comp_part(sum_, x, t);
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double comp_part(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  T sum_{};
  T comp_{};
};

// splitmix64 finalizer; used to derive independent named substreams from a
// single user seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ h);
}

}  // namespace cm
