#pragma once

// Labelled regular tournaments: the asymptotic formula and exact counts
// (memoized score-deficit recursion, plus brute force for small n).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>

#include "cm/common.hpp"

namespace cm::tour {

using BigInt = boost::multiprecision::cpp_int;

// log of (2^{n+1}/(pi n))^{(n-1)/2} n^{1/2} e^{-1/2}; n odd, n >= 3.
double rt_log_asymptotic(int n);
double rt_asymptotic(int n);

// Tournaments with every out-degree (n-1)/2. The state is the sorted vector
// of outstanding out-degrees; max_states bounds the memo table.
BigInt rt_exact(int n, std::uint64_t max_states = 10'000'000);

// All 2^{n(n-1)/2} orientations, sharded over threads; n <= 7.
std::uint64_t rt_brute_force(int n, int threads = 1);

struct TournamentCount {
  int n = 0;
  double asymptotic = 0.0;
  std::optional<BigInt> exact;
  std::optional<double> ratio;  // asymptotic / exact
};

TournamentCount tournament_count(int n, bool with_exact);

}  // namespace cm::tour
