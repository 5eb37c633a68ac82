#include "bsc/stream_model.hpp"

#include <algorithm>
#include <cmath>

#include "bsc/errors.hpp"

namespace bsc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(field, "must be a finite value > 0");
  }
}

void require_at_least_one(int value, const char* field) {
  if (value < 1) throw ConfigError(field, "must be an integer >= 1");
}

// a * ln(b) with the convention 0 * ln(0) = 0.
double scaled_log(std::int64_t a, double log_b) { return a == 0 ? 0.0 : a * log_b; }

}  // namespace

SessionParams SessionParams::make(double lambda, double mu, int file_size, int startup,
                                  int offset) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_at_least_one(file_size, "file_size_N");
  require_at_least_one(startup, "startup_x");
  require_at_least_one(offset, "offset_phi");
  if (static_cast<long long>(startup) + offset - 1 > file_size) {
    throw ConfigError("offset_phi", "prefetch target startup_x + offset_phi - 1 exceeds file_size_N");
  }
  return SessionParams(lambda, mu, file_size, startup, offset);
}

SessionParams SessionParams::from_load(double rho, int file_size, int startup, int offset,
                                       double mu) {
  require_positive(rho, "rho");
  require_positive(mu, "mu");
  return make(rho * mu, mu, file_size, startup, offset);
}

SessionParams SessionParams::with_file_size(int n) const {
  return make(lambda_, mu_, n, startup_, offset_);
}
SessionParams SessionParams::with_startup(int x) const {
  return make(lambda_, mu_, file_size_, x, offset_);
}
SessionParams SessionParams::with_offset(int phi) const {
  return make(lambda_, mu_, file_size_, startup_, phi);
}
SessionParams SessionParams::with_load(double rho) const {
  return from_load(rho, file_size_, startup_, offset_, mu_);
}

EventProbs event_probs_for_load(double rho) {
  // Compute the smaller of the two directly and the other as its complement;
  // fl(p + q) is then exactly 1.
  const double q = 1.0 / (1.0 + rho);
  if (q <= 0.5) return {1.0 - q, q};
  const double p = rho / (1.0 + rho);
  return {p, 1.0 - p};
}

EventProbs event_probs(const SessionParams& params) {
  return event_probs_for_load(params.rho());
}

LogProb LogProb::from_prob(double prob) {
  return prob <= 0.0 ? zero() : LogProb(std::log(prob));
}

double LogProb::prob() const { return is_zero() ? 0.0 : std::exp(value_); }

double log_binom(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) return kNegInf;
  k = std::min(k, n - k);
  if (k == 0) return 0.0;
  const auto dn = static_cast<double>(n);
  const auto dk = static_cast<double>(k);
  return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

double log_sum_exp(std::span<const double> log_terms) {
  double peak = kNegInf;
  for (double t : log_terms) peak = std::max(peak, t);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : log_terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

double LogSum::value() const {
  const double v = log_value();
  return v == kNegInf ? 0.0 : std::exp(v);
}

LogProb log_first_emptiness(std::int64_t k, std::int64_t start_level, double p, double q) {
  if (start_level < 1 || k < start_level) return LogProb::zero();
  const std::int64_t arrivals = k - start_level;
  const std::int64_t steps = 2 * k - start_level;
  const double log_p = p > 0.0 ? std::log(p) : kNegInf;
  const double log_q = q > 0.0 ? std::log(q) : kNegInf;
  const double a = scaled_log(arrivals, log_p);
  const double d = scaled_log(k, log_q);
  if (a == kNegInf || d == kNegInf) return LogProb::zero();
  return LogProb(std::log(static_cast<double>(start_level)) - std::log(static_cast<double>(steps)) +
                 log_binom(steps, arrivals) + a + d);
}

double first_emptiness_prob(std::int64_t k, std::int64_t start_level, double p, double q) {
  return log_first_emptiness(k, start_level, p, q).prob();
}

LogFactorials::LogFactorials(std::int64_t max_n) : table_(static_cast<std::size_t>(max_n) + 1) {
  table_[0] = 0.0;
  for (std::size_t i = 1; i < table_.size(); ++i) {
    table_[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
}

double log_first_emptiness(const LogFactorials& lf, std::int64_t k, std::int64_t start_level,
                           double log_p, double log_q) {
  if (start_level < 1 || k < start_level) return kNegInf;
  const std::int64_t arrivals = k - start_level;
  const std::int64_t steps = 2 * k - start_level;
  const double a = scaled_log(arrivals, log_p);
  const double d = scaled_log(k, log_q);
  if (a == kNegInf || d == kNegInf) return kNegInf;
  return std::log(static_cast<double>(start_level)) - std::log(static_cast<double>(steps)) +
         lf.log_binom(steps, arrivals) + a + d;
}

}  // namespace bsc
