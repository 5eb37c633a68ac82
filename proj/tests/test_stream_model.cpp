#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "bsc/errors.hpp"
#include "bsc/stream_model.hpp"

using namespace bsc;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// ln C(n, k) from exact big integers.
double exact_log_binom(long n, long k) {
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_int;
  cpp_int c = 1;
  for (long i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return static_cast<double>(log(cpp_bin_float_50(c)));
}

// First time a +/-1 walk from `level` reaches 0 on a down step, counted in
// down steps, by dynamic programming over (ups, downs).
double walk_first_emptiness(int k, int level, double p, double q) {
  // alive[u] = probability of being at level + u - d with d downs so far,
  // never having touched 0.
  std::vector<double> alive(k + 1, 0.0);
  alive[0] = 1.0;
  double hit = 0.0;
  for (int d = 0; d < k; ++d) {
    // Let ups accumulate before the next down.
    for (int u = 1; u <= k; ++u) alive[u] += alive[u - 1] * p;
    std::vector<double> next(k + 1, 0.0);
    for (int u = 0; u <= k; ++u) {
      const int height = level + u - d;
      if (height <= 0) continue;
      if (height == 1) {
        if (d + 1 == k) hit += alive[u] * q;
      } else {
        next[u] = alive[u] * q;
      }
    }
    alive = next;
  }
  return hit;
}

}  // namespace

TEST_SUITE("stream_model") {
  TEST_CASE("session parameters name the bad field") {
    CHECK(field_of([] { SessionParams::make(0.0, 1.0, 10, 1, 1); }) == "lambda");
    CHECK(field_of([] { SessionParams::make(1.0, -1.0, 10, 1, 1); }) == "mu");
    CHECK(field_of([] { SessionParams::make(1.0, 1.0, 0, 1, 1); }) == "file_size_N");
    CHECK(field_of([] { SessionParams::make(1.0, 1.0, 10, 0, 1); }) == "startup_x");
    CHECK(field_of([] { SessionParams::make(1.0, 1.0, 10, 1, 0); }) == "offset_phi");
    CHECK(field_of([] { SessionParams::make(1.0, 1.0, 10, 5, 7); }) == "offset_phi");
    CHECK(field_of([] { SessionParams::make(std::nan(""), 1.0, 10, 1, 1); }) == "lambda");
    CHECK(field_of([] { SessionParams::from_load(-1.0, 10, 1, 1); }) == "rho");
    CHECK_NOTHROW(SessionParams::make(1.0, 1.0, 10, 5, 6));
  }

  TEST_CASE("derived quantities") {
    const auto s = SessionParams::make(0.5, 2.0, 100, 40, 50);
    CHECK(s.rho() == doctest::Approx(0.25));
    CHECK(s.prefetch_level() == 89);
    CHECK(s.with_offset(1).offset() == 1);
    CHECK(s.with_load(2.0).lambda() == doctest::Approx(4.0));
    CHECK(s.with_file_size(200).file_size() == 200);
    CHECK(s == SessionParams::make(0.5, 2.0, 100, 40, 50));
  }

  TEST_CASE("event probabilities sum to one exactly") {
    for (double rho = 0.01; rho < 20.0; rho *= 1.37) {
      const auto e = event_probs_for_load(rho);
      CHECK(e.p + e.q == 1.0);
      CHECK(e.p == doctest::Approx(rho / (1.0 + rho)).epsilon(1e-15));
    }
    CHECK(event_probs_for_load(1.0).p == 0.5);
    const auto e = event_probs(SessionParams::make(3.0, 1.0, 10, 1, 1));
    CHECK(e.p == doctest::Approx(0.75));
  }

  TEST_CASE("log binomial against big integers") {
    for (long n : {1L, 7L, 50L, 300L, 2000L, 6000L}) {
      for (long k : {0L, 1L, n / 3, n / 2, n - 1, n}) {
        if (k < 0 || k > n) continue;
        const double ref = exact_log_binom(n, k);
        CHECK(log_binom(n, k) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
      }
    }
    CHECK(std::isinf(log_binom(5, 6)));
    CHECK(std::isinf(log_binom(5, -1)));
  }

  TEST_CASE("log binomial symmetry is exact") {
    LogFactorials lf(5000);
    for (long n = 0; n <= 5000; n += 37) {
      for (long k = 0; k <= n; k += 13) {
        CHECK(log_binom(n, k) == log_binom(n, n - k));
        CHECK(lf.log_binom(n, k) == lf.log_binom(n, n - k));
        CHECK(lf.log_binom(n, k) == doctest::Approx(log_binom(n, k)).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("log-sum-exp") {
    CHECK(std::isinf(log_sum_exp({})));
    const std::vector<double> big = {1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> mixed = {-INFINITY, std::log(0.25), std::log(0.5)};
    CHECK(std::exp(log_sum_exp(mixed)) == doctest::Approx(0.75));
    LogSum acc;
    acc.add(LogProb::from_prob(0.2));
    acc.add(LogProb::zero());
    acc.add(std::log(0.3));
    CHECK(acc.value() == doctest::Approx(0.5));
  }

  TEST_CASE("log probabilities") {
    CHECK(LogProb::from_prob(0.0).is_zero());
    CHECK((LogProb::zero() * LogProb::one()).is_zero());
    CHECK((LogProb::from_prob(0.5) * LogProb::from_prob(0.5)).prob() == doctest::Approx(0.25));
  }

  TEST_CASE("first emptiness matches a walk DP") {
    for (double rho : {0.3, 1.0, 2.5}) {
      const auto e = event_probs_for_load(rho);
      for (int level = 1; level <= 5; ++level) {
        for (int k = 0; k <= 30; ++k) {
          const double ref = walk_first_emptiness(k, level, e.p, e.q);
          CHECK(first_emptiness_prob(k, level, e.p, e.q) ==
                doctest::Approx(ref).epsilon(1e-12).scale(1e-300));
        }
      }
    }
  }

  TEST_CASE("first emptiness totals follow gambler's ruin") {
    LogFactorials lf(20000);
    for (double rho : {0.5, 2.0}) {
      const auto e = event_probs_for_load(rho);
      for (int level : {1, 3, 10}) {
        double total = 0.0;
        for (int k = level; k < 10000; ++k) {
          total += std::exp(log_first_emptiness(lf, k, level, std::log(e.p), std::log(e.q)));
        }
        const double ruin = rho < 1.0 ? 1.0 : std::pow(e.q / e.p, level);
        CHECK(total == doctest::Approx(ruin).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("first emptiness edge cases") {
    CHECK(first_emptiness_prob(2, 3, 0.5, 0.5) == 0.0);
    CHECK(first_emptiness_prob(3, 3, 0.0, 1.0) == 1.0);
    CHECK(first_emptiness_prob(4, 3, 0.0, 1.0) == 0.0);
    CHECK(first_emptiness_prob(3, 3, 1.0, 0.0) == 0.0);
    CHECK(first_emptiness_prob(1, 1, 0.4, 0.6) == doctest::Approx(0.6));
    // Large indices stay finite in log space.
    const double v = first_emptiness_prob(5000, 40, 0.49, 0.51);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}
