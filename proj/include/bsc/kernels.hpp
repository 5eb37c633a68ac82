#pragma once

// Data-parallel building blocks of the starvation analysis.
//
// Every routine here has a serial twin in `bsc::kernels::reference` that is
// written as directly as possible (no tables, no index tricks). The reference
// versions exist for the test suite and the benchmarks; the library itself
// calls the parallel ones.

#include <cstdint>
#include <span>
#include <vector>

#include "bsc/stream_model.hpp"

namespace bsc {

// Distribution of the next starvation given the previous one.
//
// at(from, to) is the probability that, having starved right after departure
// `from`, the player next starves right after departure `to` (to <= N-1).
// Rows share one translation-invariant kernel `shifted()[to - from]` except a
// contiguous block of rows, [explicit_first, explicit_last], that restart
// playback before the shifted base layers reach the player; those are stored
// explicitly, indexed by `to`.
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(int file_size, std::vector<double> shifted, int explicit_first,
                   std::vector<std::vector<double>> explicit_rows);

  int file_size() const { return file_size_; }
  double at(int from, int to) const;
  double row_sum(int from) const;

  std::span<const double> shifted() const { return shifted_; }
  bool is_explicit(int from) const {
    return from >= explicit_first_ && from < explicit_first_ + static_cast<int>(rows_.size());
  }
  int explicit_first() const { return explicit_first_; }
  int explicit_count() const { return static_cast<int>(rows_.size()); }
  std::span<const double> explicit_row(int from) const { return rows_[from - explicit_first_]; }

 private:
  int file_size_ = 0;
  std::vector<double> shifted_;
  int explicit_first_ = 1;
  std::vector<std::vector<double>> rows_;
};

namespace kernels {

// Event probabilities in the form the kernels consume.
struct Walk {
  double p;
  double q;
  double log_p;
  double log_q;

  static Walk from(EventProbs probs);
};

// g[m] = first_emptiness_prob(m, level) for m in [0, length).
std::vector<double> first_passage(int length, int level, const Walk& walk,
                                  const LogFactorials& lf);

// Next-starvation distribution, indexed by absolute departure `to` in [0, N],
// for a player that resumes with `arrivals` frames downloaded and `departures`
// frames shown while the shifted base layers are still out of reach
// (arrivals < offset - 1). Exact: the crossing into the shifted regime is
// conditioned on not starving first.
std::vector<double> conditioned_early_row(int file_size, int offset, int arrivals, int departures,
                                          const Walk& walk, const LogFactorials& lf);

// out[to] = sum_from in[from] * M.at(from, to), for to in [0, N].
void propagate(std::span<const double> in, const TransitionKernel& kernel, std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);

namespace reference {

std::vector<double> first_passage(int length, int level, const Walk& walk);
std::vector<double> conditioned_early_row(int file_size, int offset, int arrivals, int departures,
                                          const Walk& walk);
void propagate(std::span<const double> in, const TransitionKernel& kernel, std::span<double> out);

}  // namespace reference
}  // namespace kernels
}  // namespace bsc
