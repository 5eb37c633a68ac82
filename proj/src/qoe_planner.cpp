#include "bsc/qoe_planner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "bsc/des_simulator.hpp"
#include "bsc/errors.hpp"
#include "bsc/quality_markov.hpp"

namespace bsc {
namespace {

void require_rate(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be > 0");
}

void check_settings(const PlannerSettings& s) {
  if (!(s.frame_rate > 0.0)) throw ConfigError("frame_rate", "must be > 0");
  if (!(s.svc_overhead >= 1.0)) throw ConfigError("svc_overhead", "must be >= 1");
  if (s.fallback_runs < 1) throw ConfigError("fallback_runs", "must be >= 1");
}

double expected_count(const SessionParams& params, const AnalysisOptions& options) {
  return expected_starvations(starvation_count_pmf(params, options));
}

CostBreakdown finish(CostBreakdown c, const SessionParams& params, const QoEWeights& w,
                     const Rung& low, const Rung& high, const PlannerSettings& s) {
  const double level = c.optimal_fraction * high.weight + (1.0 - c.optimal_fraction) * low.weight;
  c.quality_term = s.quality_mode == QualityMode::kFraction
                       ? level
                       : level * params.file_size() / params.mu();
  c.cost = w.gamma1 * c.initial_delay + w.gamma2 * c.expected_starvations - w.gamma3 * c.quality_term;
  return c;
}

}  // namespace

double initial_buffering_delay(int x, double lambda) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  require_rate(lambda);
  return x / lambda;
}

double rebuffering_delay(int x, int phi, double lambda) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  if (phi < 1) throw ConfigError("offset_phi", "must be >= 1");
  require_rate(lambda);
  return (x + phi - 1) / lambda;
}

double baseline_starvation_prob(int file_size, int x, double p, double q) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  if (file_size < x) throw ConfigError("file_size_N", "must be >= startup_x");
  if (!(p >= 0.0 && q >= 0.0 && std::abs(p + q - 1.0) < 1e-12)) {
    throw ConfigError("p", "p and q must be probabilities summing to 1");
  }
  LogSum acc;
  for (int k = x; k < file_size; ++k) acc.add(log_first_emptiness(k, x, p, q));
  return acc.value();
}

OffsetChoice select_offset(int file_size, int x, double rho, double risk_threshold,
                           const AnalysisOptions& options) {
  if (!(risk_threshold > 0.0 && risk_threshold <= 1.0)) {
    throw ConfigError("risk_threshold", "must lie in (0, 1]");
  }
  const SessionParams base = SessionParams::from_load(rho, file_size, x, 1);
  const int phi_max = file_size - x + 1;
  OffsetChoice best;
  best.phi = 0;
  for (int phi = 1; phi <= phi_max; ++phi) {
    const double ps = starvation_prob(base.with_offset(phi), options);
    if (ps <= risk_threshold) best = {phi, ps, true, ""};
  }
  if (best.phi == 0) {
    const double ps = starvation_prob(base, options);
    best = {1, ps, false, "no offset meets the risk threshold; falling back to phi = 1"};
  }
  return best;
}

QoEWeights QoEWeights::make(double g1, double g2, double g3) {
  if (!(g1 >= 0.0)) throw ConfigError("gamma1", "must be >= 0");
  if (!(g2 >= 0.0)) throw ConfigError("gamma2", "must be >= 0");
  if (!(g3 >= 0.0)) throw ConfigError("gamma3", "must be >= 0");
  return {g1, g2, g3};
}

BitrateLadder BitrateLadder::make(std::vector<Rung> levels) {
  if (levels.empty()) throw ConfigError("ladder", "must contain at least one level");
  std::sort(levels.begin(), levels.end(), [](const Rung& a, const Rung& b) { return a.kbps < b.kbps; });
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i].kbps > 0.0)) throw ConfigError("ladder", "bitrates must be > 0");
    if (!(levels[i].weight >= 0.0) || !std::isfinite(levels[i].weight)) {
      throw ConfigError("ladder", "weights must be finite and >= 0");
    }
    if (i > 0 && levels[i].kbps == levels[i - 1].kbps) {
      throw ConfigError("ladder", "bitrates must be strictly increasing");
    }
  }
  BitrateLadder l;
  l.levels_ = std::move(levels);
  return l;
}

BitrateLadder BitrateLadder::reference() {
  return make({{"240p", 400, 400}, {"360p", 750, 750}, {"480p", 1000, 1000},
               {"720p", 2500, 2500}, {"1080p", 4500, 4500}});
}

BitrateLadder BitrateLadder::with_proportional_weights() const {
  auto levels = levels_;
  const double top = levels.back().kbps;
  for (auto& r : levels) r.weight = r.kbps / top;
  return make(std::move(levels));
}

const Rung& BitrateLadder::find(const std::string& label) const {
  for (const auto& r : levels_) {
    if (r.label == label) return r;
  }
  throw ConfigError("ladder", "no level labelled " + label);
}

CostBreakdown qoe_cost(const SessionParams& params, const QoEWeights& weights, const Rung& low,
                       const Rung& high, const PlannerSettings& settings) {
  check_settings(settings);
  CostBreakdown c;
  c.label = high.label + "+" + low.label;
  c.bsc = true;
  c.lambda = params.lambda();
  c.rho = params.rho();
  c.initial_delay = initial_buffering_delay(params.startup(), params.lambda());
  c.expected_starvations = expected_count(params, settings.analysis);
  if (params.rho() < 1.0) {
    const auto qt = quality_times(params.startup(), params.offset(), params.lambda(), params.mu(),
                                  low.kbps, high.kbps);
    c.optimal_fraction = 1.0 - qt.low_fraction();
  } else {
    // No quasi-stationary regime; measure the finite session instead.
    const auto st = replicate(params, ArrivalProcess::poisson(params.lambda()), settings.fallback_runs,
                              settings.fallback_seed);
    c.optimal_fraction = st.optimal_fraction.value;
    c.quality_simulated = true;
  }
  return finish(c, params, weights, low, high, settings);
}

CostBreakdown bsc_pair_cost(int file_size, const Rung& low, const Rung& high, double throughput_kbps,
                            const QoEWeights& weights, const PlannerSettings& settings) {
  check_settings(settings);
  if (!(throughput_kbps > 0.0)) throw ConfigError("throughput", "must be > 0");
  const double lambda =
      settings.frame_rate * throughput_kbps / ((low.kbps + high.kbps) * settings.svc_overhead);
  const auto params = SessionParams::make(lambda, settings.frame_rate, file_size, settings.startup,
                                          settings.offset);
  return qoe_cost(params, weights, low, high, settings);
}

CostBreakdown dash_cost(int file_size, const Rung& rung, double throughput_kbps,
                        const QoEWeights& weights, const PlannerSettings& settings) {
  check_settings(settings);
  if (!(throughput_kbps > 0.0)) throw ConfigError("throughput", "must be > 0");
  const double lambda = settings.frame_rate * throughput_kbps / rung.kbps;
  const auto params = SessionParams::make(lambda, settings.frame_rate, file_size, settings.startup, 1);
  CostBreakdown c;
  c.label = rung.label;
  c.lambda = lambda;
  c.rho = params.rho();
  c.initial_delay = initial_buffering_delay(settings.startup, lambda);
  c.expected_starvations = expected_count(params, settings.analysis);
  c.optimal_fraction = 1.0;
  return finish(c, params, weights, rung, rung, settings);
}

std::vector<CostBreakdown> compare_ladder(const BitrateLadder& ladder, double throughput_kbps,
                                          int file_size, const QoEWeights& weights,
                                          const PlannerSettings& settings) {
  if (!(throughput_kbps > 0.0)) throw ConfigError("throughput", "must be > 0");
  const auto& lv = ladder.levels();
  struct Candidate {
    int low;
    int high;  // == low for DASH
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < static_cast<int>(lv.size()); ++i) {
    if (lv[i].kbps > throughput_kbps) continue;
    cands.push_back({i, i});
    for (int j = i + 1; j < static_cast<int>(lv.size()); ++j) cands.push_back({i, j});
  }
  if (cands.empty()) {
    throw ConfigError("throughput", "no ladder level fits a throughput of " +
                                        std::to_string(throughput_kbps) + " Kbps");
  }

  std::vector<CostBreakdown> out(cands.size());
  std::vector<std::exception_ptr> failed(cands.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    const auto& c = cands[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] =
          c.low == c.high
              ? dash_cost(file_size, lv[c.low], throughput_kbps, weights, settings)
              : bsc_pair_cost(file_size, lv[c.low], lv[c.high], throughput_kbps, weights, settings);
    } catch (...) {
      failed[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : failed) {
    if (e) std::rethrow_exception(e);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CostBreakdown& a, const CostBreakdown& b) { return a.cost < b.cost; });
  return out;
}

}  // namespace bsc
