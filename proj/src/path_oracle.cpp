#include "bsc/path_oracle.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "bsc/errors.hpp"

namespace bsc {
namespace {

// (a + d, a, d, count, first starvation, last starvation). Every move raises
// a + d, so popping the smallest key visits states in causal order.
using Key = std::tuple<int, int, int, int, int, int>;

template <class Real>
OracleResult<Real> enumerate(const SessionParams& params, const Real& p, const Real& q) {
  const int n = params.file_size();
  const int x = params.startup();
  const int phi = params.offset();
  if (n > kOracleMaxFileSize) {
    throw BudgetError("path enumeration is limited to file_size_N <= " +
                      std::to_string(kOracleMaxFileSize));
  }
  const auto horizon = [&](int a) { return a < phi - 1 ? a : std::min(a + phi - 1, n); };
  const auto zeros = [&] { return std::vector<Real>(static_cast<std::size_t>(n) + 1, Real(0)); };

  OracleResult<Real> out;
  out.count_pmf = zeros();
  for (int j = 0; j < n; ++j) {
    out.nth_starvation_at.push_back(zeros());
    out.last_starvation_at.push_back(zeros());
  }
  for (int k = 0; k <= n; ++k) out.first_second.push_back(zeros());

  std::map<Key, Real> frontier;
  const auto push = [&](int a, int d, int count, int first, int last, const Real& mass) {
    auto [it, fresh] = frontier.try_emplace(Key{a + d, a, d, count, first, last}, mass);
    if (!fresh) it->second += mass;
  };
  push(x, 0, 0, 0, 0, Real(1));

  while (!frontier.empty()) {
    const auto node = frontier.begin();
    const auto [sum, a, d, count, first, last] = node->first;
    const Real mass = node->second;
    frontier.erase(node);
    (void)sum;

    const Real arrive = a < n ? p : Real(0);
    const Real depart = a < n ? q : Real(1);
    if (a < n) push(a + 1, d, count, first, last, mass * arrive);

    const int d2 = d + 1;
    const Real m2 = mass * depart;
    if (d2 == n) {
      out.count_pmf[static_cast<std::size_t>(count)] += m2;
      if (count > 0) out.last_starvation_at[count - 1][static_cast<std::size_t>(last)] += m2;
      continue;
    }
    if (d2 < horizon(a)) {
      push(a, d2, count, first, last, m2);
      continue;
    }
    // Starvation at departure d2; the player rebuffers to x optimal frames.
    const int c2 = count + 1;
    out.nth_starvation_at[c2 - 1][static_cast<std::size_t>(d2)] += m2;
    if (c2 == 2) out.first_second[static_cast<std::size_t>(first)][static_cast<std::size_t>(d2)] += m2;
    push(std::min(d2 + x, n), d2, c2, c2 == 1 ? d2 : first, d2, m2);
  }
  return out;
}

}  // namespace

OracleResult<Rational> enumerate_paths_exact(const SessionParams& params, const Rational& p,
                                             const Rational& q) {
  return enumerate<Rational>(params, p, q);
}

OracleResult<double> enumerate_paths(const SessionParams& params) {
  const EventProbs e = event_probs(params);
  return enumerate<double>(params, e.p, e.q);
}

Rational exact_arrival_prob(long num, long den) {
  const Rational rho(num, den);
  return rho / (1 + rho);
}

}  // namespace bsc
