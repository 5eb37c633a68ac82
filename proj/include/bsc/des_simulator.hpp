#pragma once

// Event-driven simulation of backward-shifted playback.
//
// Rules, on frame indices: download n carries the enhancement of block n and
// the base layer of block n + phi - 1 (blocks below phi travel complete).
// Playback starts once x optimal frames are buffered. Block d+1 is shown at
// optimal quality if its enhancement is in, at base quality if only its base
// layer is, and the player starves if neither is. After a starvation it
// waits for x optimal frames again. The session ends when block N is shown.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bsc/stream_model.hpp"

namespace bsc {

struct PoissonArrivals {
  double rate;
};

// Inter-arrival times Logistic(location, scale), resampled while <= 0.
struct LogisticArrivals {
  double location;
  double scale;
};

// Poisson arrivals at `on_rate` during exponential ON periods, none during
// exponential OFF periods.
struct OnOffArrivals {
  double on_rate;
  double on_mean;
  double off_mean;
};

class ArrivalProcess {
 public:
  using Kind = std::variant<PoissonArrivals, LogisticArrivals, OnOffArrivals>;

  static ArrivalProcess poisson(double rate);
  static ArrivalProcess logistic(double location, double scale);
  static ArrivalProcess on_off(double on_rate, double on_mean, double off_mean);

  // Shapes matched to a target mean rate. These shapes are experiment knobs,
  // not measured values: logistic scale = location / 8; ON/OFF with duty
  // cycle 0.7, a mean cycle of 100 mean inter-arrival times.
  static ArrivalProcess logistic_for_rate(double rate);
  static ArrivalProcess on_off_for_rate(double rate);

  const Kind& kind() const { return kind_; }
  std::string name() const;  // "poisson", "logistic", "on_off"
  double mean_rate() const;
  bool is_poisson() const { return std::holds_alternative<PoissonArrivals>(kind_); }

 private:
  explicit ArrivalProcess(Kind k) : kind_(k) {}
  Kind kind_;
};

enum class EventType { kArrival, kDisplay, kStarvation, kRebufferStart, kRebufferEnd, kQualitySwitch };
enum class Quality { kLow, kOptimal };

const char* to_string(EventType t);
const char* to_string(Quality q);

struct TraceEvent {
  double time;
  EventType type;
  int buffer_level;  // playable frames buffered
  int state_n;       // A - D with D the block on (or next to) screen
};

struct StarvationEpoch {
  int departure_index;
  double time;
};

struct QualityInterval {
  double start;
  double end;
  Quality level;
  bool opened_by_switch;  // began with a quality switch rather than (re)start
  bool closed_by_switch;  // ended with a quality switch rather than pause/end
};

struct SessionTrace {
  int starvation_count = 0;
  std::vector<StarvationEpoch> starvation_epochs;
  double initial_delay = 0.0;
  std::vector<double> rebuffer_delays;
  std::vector<QualityInterval> quality_intervals;
  bool completed = false;
  std::vector<TraceEvent> events;  // filled only with SimulationOptions::record_events

  double playback_time() const;
  double optimal_time() const;
  double total_rebuffer_time() const;
};

struct SimulationOptions {
  bool record_events = false;
  bool stop_at_first_starvation = false;
};

SessionTrace simulate_session(const SessionParams& params, const ArrivalProcess& arrivals,
                              std::uint64_t seed, const SimulationOptions& options = {});

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // NaN when undefined (one run)
};

struct EmpiricalStats {
  int runs = 0;
  std::string arrivals;
  Estimate starvation_prob;
  std::vector<Estimate> count_pmf;  // j = 0 .. largest count observed
  Estimate mean_starvations;
  Estimate optimal_fraction;        // total optimal time / total playback time
  Estimate mean_rebuffer_time;      // per session
  Estimate mean_initial_delay;

  // P(at least j starvations) with its binomial standard error.
  Estimate at_least(int j) const;
};

// Sessions use seeds base_seed + i, i = 0..runs-1. The reduction runs in
// index order, so results do not depend on the thread count.
EmpiricalStats replicate(const SessionParams& params, const ArrivalProcess& arrivals, int runs,
                         std::uint64_t base_seed, const SimulationOptions& options = {},
                         bool parallel = true);

// One run of the quality chain itself, from state x until absorption at -phi.
struct ChainRun {
  double absorption_time;
  double low_time;
  double high_time;
};

ChainRun simulate_quality_chain(int x, int phi, double lambda, double mu, std::uint64_t seed);

}  // namespace bsc
