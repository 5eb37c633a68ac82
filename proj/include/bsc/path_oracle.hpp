#pragma once

// Exhaustive reference for small files: every download/display sequence of
// the embedded jump chain is followed exactly, with probability mass merged
// only between identical histories-of-interest. No ballot formulas involved.

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bsc/stream_model.hpp"

namespace bsc {

using Rational = boost::multiprecision::cpp_rational;

// Largest file size the enumeration accepts; larger ones throw BudgetError.
inline constexpr int kOracleMaxFileSize = 10;

template <class Real>
struct OracleResult {
  std::vector<Real> count_pmf;                        // j = 0..N
  std::vector<std::vector<Real>> nth_starvation_at;   // [j-1][k]: j-th starvation at departure k
  std::vector<std::vector<Real>> last_starvation_at;  // [j-1][k]: exactly j, the last at k
  std::vector<std::vector<Real>> first_second;        // [k1][k2]: first at k1, second at k2
};

OracleResult<Rational> enumerate_paths_exact(const SessionParams& params, const Rational& p,
                                             const Rational& q);
OracleResult<double> enumerate_paths(const SessionParams& params);

// p = rho / (1 + rho) for rho = num / den, exactly.
Rational exact_arrival_prob(long num, long den);

}  // namespace bsc
