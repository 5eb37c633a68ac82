#include "bsc/des_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsc/errors.hpp"
#include "bsc/rng.hpp"

namespace bsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be a positive finite number");
}

// Draws successive arrival epochs of one process.
class ArrivalClock {
 public:
  ArrivalClock(const ArrivalProcess& process, CounterRng& rng) : process_(process), rng_(rng) {
    if (const auto* oo = std::get_if<OnOffArrivals>(&process_.kind())) {
      const double duty = oo->on_mean / (oo->on_mean + oo->off_mean);
      on_ = rng_.uniform() < duty;
      switch_at_ = rng_.exponential(1.0 / (on_ ? oo->on_mean : oo->off_mean));
    }
  }

  double next_after(double t) {
    return std::visit([&](const auto& k) { return next(k, t); }, process_.kind());
  }

 private:
  double next(const PoissonArrivals& k, double t) { return t + rng_.exponential(k.rate); }

  double next(const LogisticArrivals& k, double t) {
    double gap;
    do {
      gap = rng_.logistic(k.location, k.scale);
    } while (gap <= 0.0);
    return t + gap;
  }

  double next(const OnOffArrivals& k, double t) {
    for (;;) {
      if (on_) {
        const double cand = t + rng_.exponential(k.on_rate);
        if (cand < switch_at_) return cand;
      }
      t = switch_at_;
      on_ = !on_;
      switch_at_ = t + rng_.exponential(1.0 / (on_ ? k.on_mean : k.off_mean));
    }
  }

  const ArrivalProcess& process_;
  CounterRng& rng_;
  bool on_ = true;
  double switch_at_ = kInf;
};

class Session {
 public:
  Session(const SessionParams& params, const SimulationOptions& options, SessionTrace& trace)
      : n_(params.file_size()),
        x_(params.startup()),
        phi_(params.offset()),
        opts_(options),
        trace_(trace) {}

  // Playable frames after `a` downloads.
  int horizon() const {
    if (a_ < phi_ - 1) return a_;
    return std::min(a_ + phi_ - 1, n_);
  }

  bool ready() const { return a_ - d_ >= x_ || a_ == n_; }
  Quality quality() const { return a_ >= d_ + 1 ? Quality::kOptimal : Quality::kLow; }

  void log(double t, EventType type) {
    if (opts_.record_events) trace_.events.push_back({t, type, horizon() - d_, a_ - d_ - 1});
  }

  void open_interval(double t, bool by_switch) {
    trace_.quality_intervals.push_back({t, t, quality(), by_switch, false});
  }

  void close_interval(double t, bool by_switch) {
    auto& iv = trace_.quality_intervals.back();
    iv.end = t;
    iv.closed_by_switch = by_switch;
  }

  void requality(double t, Quality before) {
    if (quality() == before) return;
    close_interval(t, true);
    open_interval(t, true);
    log(t, EventType::kQualitySwitch);
  }

  void run(const ArrivalProcess& arrivals, CounterRng& rng, double mu) {
    ArrivalClock clock(arrivals, rng);
    double t = 0.0;
    double next_arrival = clock.next_after(0.0);
    bool playing = false;
    double next_departure = kInf;
    double pause_start = 0.0;
    bool initial = true;

    auto start_playback = [&](double now) {
      playing = true;
      if (initial) {
        trace_.initial_delay = now;
        initial = false;
      } else {
        trace_.rebuffer_delays.push_back(now - pause_start);
        log(now, EventType::kRebufferEnd);
      }
      open_interval(now, false);
      next_departure = now + rng.exponential(mu);
    };

    if (ready()) start_playback(0.0);
    for (;;) {
      if (next_arrival <= next_departure) {
        t = next_arrival;
        const Quality before = quality();
        ++a_;
        next_arrival = a_ < n_ ? clock.next_after(t) : kInf;
        log(t, EventType::kArrival);
        if (playing) {
          requality(t, before);
        } else if (ready()) {
          start_playback(t);
        }
        continue;
      }
      t = next_departure;
      const Quality before = quality();
      ++d_;
      log(t, EventType::kDisplay);
      if (d_ == n_) {
        close_interval(t, false);
        trace_.completed = true;
        return;
      }
      if (d_ >= horizon()) {
        close_interval(t, false);
        playing = false;
        next_departure = kInf;
        ++trace_.starvation_count;
        trace_.starvation_epochs.push_back({d_, t});
        log(t, EventType::kStarvation);
        if (opts_.stop_at_first_starvation) return;
        pause_start = t;
        log(t, EventType::kRebufferStart);
        if (ready()) start_playback(t);
        continue;
      }
      requality(t, before);
      next_departure = t + rng.exponential(mu);
    }
  }

 private:
  int n_, x_, phi_;
  int a_ = 0;
  int d_ = 0;
  const SimulationOptions& opts_;
  SessionTrace& trace_;
};

struct RunSummary {
  int count;
  double optimal_time;
  double playback_time;
  double rebuffer_time;
  double initial_delay;
};

Estimate mean_estimate(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= n;
  if (v.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
  double ss = 0.0;
  for (double s : v) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate proportion(double hits, int runs) {
  const double p = hits / runs;
  if (runs < 2) return {p, std::numeric_limits<double>::quiet_NaN()};
  return {p, std::sqrt(p * (1.0 - p) / runs)};
}

}  // namespace

ArrivalProcess ArrivalProcess::poisson(double rate) {
  require_positive(rate, "lambda");
  return ArrivalProcess(PoissonArrivals{rate});
}

ArrivalProcess ArrivalProcess::logistic(double location, double scale) {
  require_positive(location, "logistic_location");
  require_positive(scale, "logistic_scale");
  return ArrivalProcess(LogisticArrivals{location, scale});
}

ArrivalProcess ArrivalProcess::on_off(double on_rate, double on_mean, double off_mean) {
  require_positive(on_rate, "on_rate");
  require_positive(on_mean, "on_mean");
  require_positive(off_mean, "off_mean");
  return ArrivalProcess(OnOffArrivals{on_rate, on_mean, off_mean});
}

ArrivalProcess ArrivalProcess::logistic_for_rate(double rate) {
  require_positive(rate, "lambda");
  const double location = 1.0 / rate;
  return logistic(location, location / 8.0);
}

ArrivalProcess ArrivalProcess::on_off_for_rate(double rate) {
  require_positive(rate, "lambda");
  return on_off(rate / 0.7, 70.0 / rate, 30.0 / rate);
}

std::string ArrivalProcess::name() const {
  switch (kind_.index()) {
    case 0: return "poisson";
    case 1: return "logistic";
    default: return "on_off";
  }
}

double ArrivalProcess::mean_rate() const {
  if (const auto* p = std::get_if<PoissonArrivals>(&kind_)) return p->rate;
  if (const auto* oo = std::get_if<OnOffArrivals>(&kind_)) {
    return oo->on_rate * oo->on_mean / (oo->on_mean + oo->off_mean);
  }
  // Truncation at zero shifts the mean only negligibly for small scale/location.
  return 1.0 / std::get<LogisticArrivals>(kind_).location;
}

const char* to_string(EventType t) {
  switch (t) {
    case EventType::kArrival: return "arrival";
    case EventType::kDisplay: return "display";
    case EventType::kStarvation: return "starvation";
    case EventType::kRebufferStart: return "rebuffer_start";
    case EventType::kRebufferEnd: return "rebuffer_end";
    case EventType::kQualitySwitch: return "quality_switch";
  }
  return "?";
}

const char* to_string(Quality q) { return q == Quality::kOptimal ? "optimal" : "low"; }

double SessionTrace::playback_time() const {
  double s = 0.0;
  for (const auto& iv : quality_intervals) s += iv.end - iv.start;
  return s;
}

double SessionTrace::optimal_time() const {
  double s = 0.0;
  for (const auto& iv : quality_intervals) {
    if (iv.level == Quality::kOptimal) s += iv.end - iv.start;
  }
  return s;
}

double SessionTrace::total_rebuffer_time() const {
  double s = 0.0;
  for (double r : rebuffer_delays) s += r;
  return s;
}

SessionTrace simulate_session(const SessionParams& params, const ArrivalProcess& arrivals,
                              std::uint64_t seed, const SimulationOptions& options) {
  SessionTrace trace;
  CounterRng rng(seed);
  Session session(params, options, trace);
  session.run(arrivals, rng, params.mu());
  return trace;
}

Estimate EmpiricalStats::at_least(int j) const {
  if (j <= 0) return {1.0, 0.0};
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(j); i < count_pmf.size(); ++i) tail += count_pmf[i].value;
  return proportion(tail * runs, runs);
}

EmpiricalStats replicate(const SessionParams& params, const ArrivalProcess& arrivals, int runs,
                         std::uint64_t base_seed, const SimulationOptions& options, bool parallel) {
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  SimulationOptions quiet = options;
  quiet.record_events = false;

  std::vector<RunSummary> per_run(static_cast<std::size_t>(runs));
  auto one = [&](int i) {
    const SessionTrace tr = simulate_session(params, arrivals, base_seed + static_cast<std::uint64_t>(i), quiet);
    per_run[static_cast<std::size_t>(i)] = {tr.starvation_count, tr.optimal_time(), tr.playback_time(),
                                            tr.total_rebuffer_time(), tr.initial_delay};
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < runs; ++i) one(i);
  } else {
    for (int i = 0; i < runs; ++i) one(i);
  }

  EmpiricalStats st;
  st.runs = runs;
  st.arrivals = arrivals.name();
  int max_count = 0;
  for (const auto& r : per_run) max_count = std::max(max_count, r.count);
  std::vector<double> hist(static_cast<std::size_t>(max_count) + 1, 0.0);
  std::vector<double> counts, rebuf, init;
  double opt_sum = 0.0, play_sum = 0.0;
  for (const auto& r : per_run) {
    hist[static_cast<std::size_t>(r.count)] += 1.0;
    counts.push_back(r.count);
    rebuf.push_back(r.rebuffer_time);
    init.push_back(r.initial_delay);
    opt_sum += r.optimal_time;
    play_sum += r.playback_time;
  }
  for (double h : hist) st.count_pmf.push_back(proportion(h, runs));
  st.starvation_prob = proportion(runs - hist[0], runs);
  st.mean_starvations = mean_estimate(counts);
  st.mean_rebuffer_time = mean_estimate(rebuf);
  st.mean_initial_delay = mean_estimate(init);

  // Ratio estimator with a delta-method standard error.
  const double ratio = play_sum > 0.0 ? opt_sum / play_sum : 0.0;
  st.optimal_fraction.value = ratio;
  if (runs < 2) {
    st.optimal_fraction.std_error = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double n = runs;
    const double mean_play = play_sum / n;
    double ss = 0.0;
    for (const auto& r : per_run) {
      const double resid = r.optimal_time - ratio * r.playback_time;
      ss += resid * resid;
    }
    st.optimal_fraction.std_error = mean_play > 0.0 ? std::sqrt(ss / (n - 1.0) / n) / mean_play : 0.0;
  }
  return st;
}

ChainRun simulate_quality_chain(int x, int phi, double lambda, double mu, std::uint64_t seed) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  if (phi < 1) throw ConfigError("offset_phi", "must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda", "must be >= 0");
  require_positive(mu, "mu");
  if (mu <= lambda) throw RegimeError("quality chain needs mu > lambda to be absorbed a.s.");

  CounterRng rng(seed);
  const double total = lambda + mu;
  const double up = lambda / total;
  ChainRun run{0.0, 0.0, 0.0};
  int n = x;
  while (n > -phi) {
    const double dt = rng.exponential(total);
    (n >= 0 ? run.high_time : run.low_time) += dt;
    n += rng.uniform() < up ? 1 : -1;
  }
  run.absorption_time = run.low_time + run.high_time;
  return run;
}

}  // namespace bsc
