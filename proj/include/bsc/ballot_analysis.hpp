#pragma once

// Closed-form starvation analysis of backward-shifted playback.
//
// Departures are counted from playback start. After the n-th download the
// player holds optimal frames 1..n and base layers up to n + phi - 1, except
// that while n < phi - 1 the shifted base layers are not contiguous yet and
// only frames 1..n are playable ("early regime"). Every probability below is
// a sum of first-emptiness (ballot) terms over departure indices.

#include <memory>
#include <string>
#include <vector>

#include "bsc/kernels.hpp"
#include "bsc/stream_model.hpp"

namespace bsc {

// How the early regime and the shifted regime are stitched together.
enum class EventModel {
  // Crossing into the shifted regime is conditioned on surviving the early
  // regime, and every piece restarts from the true post-rebuffer state.
  // Agrees with exhaustive path enumeration.
  kConditioned,
  // Piecewise product forms taken literally: survival of the early
  // regime enters as an independent factor (1 - P_s1), and the no-further-
  // starvation terms treat the remaining file as a fresh session.
  kProduct,
};

// Lower summation bound of the shifted-regime term.
enum class OffsetBound {
  kDisplay,  // 2*phi - 2
  kProof,    // x + phi - 1
};

// Zero window of the one-starvation survival vector: [phi-1, 2phi-3] or [phi-1, 2phi-3).
enum class SurvivalWindow { kInclusive, kHalfOpen };

struct AnalysisOptions {
  EventModel model = EventModel::kConditioned;
  OffsetBound offset_bound = OffsetBound::kDisplay;
  SurvivalWindow survival_window = SurvivalWindow::kInclusive;
  int max_count = 32;                  // J_max
  double truncation_tolerance = 1e-6;  // epsilon_trunc
};

std::string to_string(EventModel m);
std::string to_string(OffsetBound b);
EventModel parse_event_model(const std::string& s);
OffsetBound parse_offset_bound(const std::string& s);

// Case phi <= x. Throws RegimeError when phi > x.
double starvation_prob_small_offset(const SessionParams& params);

// Case phi > x. Throws RegimeError when phi <= x.
double starvation_prob_large_offset(const SessionParams& params, const AnalysisOptions& options = {});

// Starvation before the shifted base layers become contiguous:
// sum_{k=x}^{phi-2} first_emptiness_prob(k, x).
double early_starvation_prob(const SessionParams& params);

double starvation_prob(const SessionParams& params, const AnalysisOptions& options = {});

// Vectors indexed by departure k in [0, N]; entry 0 is always zero.
// For `count` = J this holds L_1..L_J and M_1..M_{J-1}.
struct EventVectors {
  std::vector<double> first;                                   // P_F(k)
  std::vector<std::vector<double>> last;                       // last[j-1][k] = P_{L_j}(k)
  std::vector<std::shared_ptr<const TransitionKernel>> transitions;  // transitions[l-1] = M_l

  const std::vector<double>& last_for(int j) const { return last[j - 1]; }
  const TransitionKernel& transition(int l) const { return *transitions[l - 1]; }
};

EventVectors build_event_vectors(const SessionParams& params, int count,
                                 const AnalysisOptions& options = {});

struct StarvationPmf {
  std::vector<double> probs;  // probs[j] = P(j starvations), j = 0..J
  int truncation_count = 0;   // J actually reached
  double tail_mass = 0.0;     // P(more than J starvations) left over
  SessionParams params;

  double at_least(int j) const;
};

// Throws BudgetError when more than options.truncation_tolerance of the mass
// lies beyond options.max_count starvations.
StarvationPmf starvation_count_pmf(const SessionParams& params, const AnalysisOptions& options = {});

double pgf_evaluate(const StarvationPmf& pmf, double z);
double expected_starvations(const StarvationPmf& pmf);

}  // namespace bsc
