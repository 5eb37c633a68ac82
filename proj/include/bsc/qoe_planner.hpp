#pragma once

// Delay formulas, offset selection and the QoE cost
//   C = g1 * E[T_x] + g2 * E[#starvations] - g3 * sum_i w_i T_i
// for single-rate DASH and for BSC pairs drawn from a bitrate ladder.

#include <cstdint>
#include <string>
#include <vector>

#include "bsc/ballot_analysis.hpp"
#include "bsc/stream_model.hpp"

namespace bsc {

double initial_buffering_delay(int x, double lambda);
// (x + phi - 1) / lambda: x optimal frames need x + phi - 1 downloads.
double rebuffering_delay(int x, int phi, double lambda);

// Starvation probability without BSC:
//   sum_{k=x}^{N-1} x/(2k-x) C(2k-x, k-x) p^(k-x) q^k.
double baseline_starvation_prob(int file_size, int x, double p, double q);

struct OffsetChoice {
  int phi = 1;
  double starvation_prob = 0.0;
  bool threshold_met = true;
  std::string warning;  // set when even phi = 1 exceeds the threshold
};

// Largest phi in [1, N - x + 1] whose starvation probability is <= threshold.
OffsetChoice select_offset(int file_size, int x, double rho, double risk_threshold,
                           const AnalysisOptions& options = {});

struct QoEWeights {
  double gamma1 = 0.1;   // initial delay
  double gamma2 = 1.0;   // expected starvations
  double gamma3 = 0.01;  // quality

  static QoEWeights make(double g1, double g2, double g3);
};

struct Rung {
  std::string label;
  double kbps;
  double weight;
};

class BitrateLadder {
 public:
  // Sorts by bitrate; throws ConfigError on an empty ladder, repeated
  // bitrates, or negative weights.
  static BitrateLadder make(std::vector<Rung> levels);
  // 240p..1080p at 400, 750, 1000, 2500, 4500 Kbps with w_i = bitrate.
  static BitrateLadder reference();

  // Rescales every weight to bitrate / max bitrate.
  BitrateLadder with_proportional_weights() const;

  const std::vector<Rung>& levels() const { return levels_; }
  const Rung& find(const std::string& label) const;

 private:
  std::vector<Rung> levels_;
};

enum class QualityMode {
  kFraction,  // sum_i w_i T_i / sum_i T_i
  kAbsolute,  // the same fractions times the playback length N / mu
};

struct PlannerSettings {
  double frame_rate = 25.0;  // frames per second, also the display rate mu
  int startup = 40;
  int offset = 50;
  QualityMode quality_mode = QualityMode::kFraction;
  double svc_overhead = 1.0;  // multiplier on BSC pair bitrate, 1 = off
  int fallback_runs = 200;    // simulated quality term when rho >= 1
  std::uint64_t fallback_seed = 1;
  AnalysisOptions analysis;
};

struct CostBreakdown {
  std::string label;
  bool bsc = false;
  double lambda = 0.0;
  double rho = 0.0;
  double initial_delay = 0.0;
  double expected_starvations = 0.0;
  double optimal_fraction = 1.0;
  double quality_term = 0.0;  // sum_i w_i T_i (fraction or absolute)
  bool quality_simulated = false;
  double cost = 0.0;
};

// Cost of a session whose low/high layers are `low` and `high`. Rates in
// `params` are frames per second, so delays come out in seconds.
CostBreakdown qoe_cost(const SessionParams& params, const QoEWeights& weights, const Rung& low,
                       const Rung& high, const PlannerSettings& settings = {});

// BSC pair with lambda = frame_rate * throughput / (b_low + b_high).
CostBreakdown bsc_pair_cost(int file_size, const Rung& low, const Rung& high, double throughput_kbps,
                            const QoEWeights& weights, const PlannerSettings& settings = {});

// Single-rate DASH, lambda = frame_rate * throughput / b, phi = 1.
CostBreakdown dash_cost(int file_size, const Rung& rung, double throughput_kbps,
                        const QoEWeights& weights, const PlannerSettings& settings = {});

// Every feasible DASH rung (b <= throughput) and BSC pair (b_low < b_high,
// b_low <= throughput), ascending by cost. Throws ConfigError naming the
// throughput when nothing is feasible.
std::vector<CostBreakdown> compare_ladder(const BitrateLadder& ladder, double throughput_kbps,
                                          int file_size, const QoEWeights& weights,
                                          const PlannerSettings& settings = {});

}  // namespace bsc
