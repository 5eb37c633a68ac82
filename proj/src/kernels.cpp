#include "bsc/kernels.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace bsc {

TransitionKernel::TransitionKernel(int file_size, std::vector<double> shifted, int explicit_first,
                                   std::vector<std::vector<double>> explicit_rows)
    : file_size_(file_size),
      shifted_(std::move(shifted)),
      explicit_first_(explicit_first),
      rows_(std::move(explicit_rows)) {}

double TransitionKernel::at(int from, int to) const {
  if (from < 1 || to <= from || to >= file_size_) return 0.0;
  if (is_explicit(from)) return explicit_row(from)[to];
  const auto m = static_cast<std::size_t>(to - from);
  return m < shifted_.size() ? shifted_[m] : 0.0;
}

double TransitionKernel::row_sum(int from) const {
  double s = 0.0;
  for (int to = from + 1; to < file_size_; ++to) s += at(from, to);
  return s;
}

namespace kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

double exp_or_zero(double log_v) { return log_v == kNegInf ? 0.0 : std::exp(log_v); }

}  // namespace

Walk Walk::from(EventProbs probs) {
  return {probs.p, probs.q, safe_log(probs.p), safe_log(probs.q)};
}

std::vector<double> first_passage(int length, int level, const Walk& walk,
                                  const LogFactorials& lf) {
  std::vector<double> g(static_cast<std::size_t>(std::max(length, 0)), 0.0);
#pragma omp parallel for schedule(static)
  for (int m = level; m < length; ++m) {
    g[m] = exp_or_zero(log_first_emptiness(lf, m, level, walk.log_p, walk.log_q));
  }
  return g;
}

std::vector<double> conditioned_early_row(int file_size, int offset, int arrivals, int departures,
                                          const Walk& walk, const LogFactorials& lf) {
  std::vector<double> row(static_cast<std::size_t>(file_size) + 1, 0.0);
  const int level = arrivals - departures;
  const int missing = offset - 1 - arrivals;  // arrivals still needed to reach the shifted layers
  if (level < 1 || missing < 1) return row;

  // Paths that collect `missing` arrivals after exactly i departures without
  // emptying: (C(missing-1+i, i) - C(missing-1+i, i-level)) of them by reflection,
  // the last step being an arrival.
  const int max_i = level + missing - 2;
  std::vector<double> log_weight(static_cast<std::size_t>(max_i) + 1, kNegInf);
  for (int i = 0; i <= max_i; ++i) {
    const int n = missing - 1 + i;
    const double all = lf.log_binom(n, i);
    const double touching = lf.log_binom(n, i - level);
    const double log_ways =
        touching == kNegInf ? all : all + std::log1p(-std::exp(touching - all));
    const double log_steps = missing * walk.log_p + (i == 0 ? 0.0 : i * walk.log_q);
    log_weight[i] = log_ways + log_steps;
  }

  const int early_last = offset - 2;
  const int late_first = 2 * offset - 2;
#pragma omp parallel for schedule(dynamic, 16)
  for (int to = departures + 1; to < file_size; ++to) {
    if (to <= early_last) {
      row[to] = exp_or_zero(log_first_emptiness(lf, to - departures, level, walk.log_p, walk.log_q));
    } else if (to >= late_first) {
      double acc = 0.0;
      for (int i = 0; i <= max_i; ++i) {
        if (log_weight[i] == kNegInf) continue;
        const int shifted_level = 2 * offset - 2 - departures - i;
        const double tail =
            log_first_emptiness(lf, to - departures - i, shifted_level, walk.log_p, walk.log_q);
        if (tail != kNegInf) acc += std::exp(log_weight[i] + tail);
      }
      row[to] = acc;
    }
  }
  return row;
}

void propagate(std::span<const double> in, const TransitionKernel& kernel, std::span<double> out) {
  const int n = kernel.file_size();
  const auto shifted = kernel.shifted();
  const int first = kernel.explicit_first();
  const int last = first + kernel.explicit_count();  // one past
  const int shifted_len = static_cast<int>(shifted.size());

#pragma omp parallel for schedule(dynamic, 32)
  for (int to = 0; to <= n; ++to) {
    double acc = 0.0;
    if (to < n) {
      for (int from = std::max(first, 1); from < std::min(last, to); ++from) {
        acc += in[from] * kernel.explicit_row(from)[to];
      }
      const int lo = std::max(1, to - shifted_len + 1);
      for (int from = lo; from < to; ++from) {
        if (from >= first && from < last) continue;
        acc += in[from] * shifted[to - from];
      }
    }
    out[to] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sum(std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 0.0); }

}  // namespace kernels
}  // namespace bsc
