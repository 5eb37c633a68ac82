#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bsc {

// Parameters of one streaming session.
//
// Frames arrive at rate `lambda` and are played at rate `mu`; the file holds
// `file_size()` frames, playback starts once `startup()` optimal frames are
// buffered, and the base layer of block n+offset-1 travels inside frame n.
class SessionParams {
 public:
  // Throws ConfigError naming the offending field.
  static SessionParams make(double lambda, double mu, int file_size, int startup,
                            int offset);
  // Same, with lambda = rho * mu.
  static SessionParams from_load(double rho, int file_size, int startup, int offset,
                                 double mu = 1.0);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  int file_size() const { return file_size_; }
  int startup() const { return startup_; }
  int offset() const { return offset_; }

  double rho() const { return lambda_ / mu_; }
  // Base-layer frames buffered when playback (re)starts: x + phi - 1.
  int prefetch_level() const { return startup_ + offset_ - 1; }

  SessionParams with_file_size(int n) const;
  SessionParams with_startup(int x) const;
  SessionParams with_offset(int phi) const;
  SessionParams with_load(double rho) const;

  bool operator==(const SessionParams&) const = default;

 private:
  SessionParams(double lambda, double mu, int n, int x, int phi)
      : lambda_(lambda), mu_(mu), file_size_(n), startup_(x), offset_(phi) {}

  double lambda_;
  double mu_;
  int file_size_;
  int startup_;
  int offset_;
};

// Probabilities that the next event of a busy player is an arrival (p) or a
// departure (q). p + q == 1 holds exactly in floating point.
struct EventProbs {
  double p;
  double q;
};

EventProbs event_probs(const SessionParams& params);
EventProbs event_probs_for_load(double rho);

// A probability held as its natural logarithm; zero is -infinity.
class LogProb {
 public:
  constexpr LogProb() = default;
  constexpr explicit LogProb(double log_value) : value_(log_value) {}

  static constexpr LogProb zero() { return LogProb(-std::numeric_limits<double>::infinity()); }
  static constexpr LogProb one() { return LogProb(0.0); }
  static LogProb from_prob(double prob);

  constexpr double value() const { return value_; }
  double prob() const;
  constexpr bool is_zero() const { return value_ == -std::numeric_limits<double>::infinity(); }

  friend constexpr LogProb operator*(LogProb a, LogProb b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return LogProb(a.value_ + b.value_);
  }

 private:
  double value_ = -std::numeric_limits<double>::infinity();
};

// ln C(n, k) via log-gamma; -infinity outside 0 <= k <= n.
double log_binom(std::int64_t n, std::int64_t k);

// Max-shifted log(sum(exp(terms))). Empty input and all -inf give -inf.
double log_sum_exp(std::span<const double> log_terms);

// Accumulates probabilities given in log space without overflow.
class LogSum {
 public:
  void add(double log_term) { terms_.push_back(log_term); }
  void add(LogProb term) { terms_.push_back(term.value()); }
  double log_value() const { return log_sum_exp(terms_); }
  double value() const;

 private:
  std::vector<double> terms_;
};

// Probability that a busy player holding `start_level` frames sees its buffer
// empty for the first time right after its k-th departure:
//   T/(2k-T) * C(2k-T, k-T) * p^(k-T) * q^k.
// Zero for k < T.
LogProb log_first_emptiness(std::int64_t k, std::int64_t start_level, double p, double q);
double first_emptiness_prob(std::int64_t k, std::int64_t start_level, double p, double q);

// Cached ln(n!) for the hot loops; identical to log_binom within rounding.
class LogFactorials {
 public:
  explicit LogFactorials(std::int64_t max_n);

  double log_binom(std::int64_t n, std::int64_t k) const {
    if (k < 0 || k > n || n < 0) return -std::numeric_limits<double>::infinity();
    if (n - k < k) k = n - k;
    return table_[n] - table_[k] - table_[n - k];
  }
  std::int64_t max_n() const { return static_cast<std::int64_t>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

// first-emptiness kernel over a precomputed factorial table, with ln p / ln q
// supplied by the caller. Returns the log probability.
double log_first_emptiness(const LogFactorials& lf, std::int64_t k, std::int64_t start_level,
                           double log_p, double log_q);

}  // namespace bsc
