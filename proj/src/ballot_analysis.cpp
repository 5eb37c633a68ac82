#include "bsc/ballot_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "bsc/errors.hpp"

namespace bsc {
namespace {

// Tail mass below which propagation stops before reaching max_count.
constexpr double kNegligibleMass = 1e-15;

double sum_first_emptiness(std::int64_t from, std::int64_t to, std::int64_t level,
                           const EventProbs& pq) {
  LogSum acc;
  for (std::int64_t k = std::max(from, level); k <= to; ++k) {
    acc.add(log_first_emptiness(k, level, pq.p, pq.q));
  }
  return acc.value();
}

int offset_bound(const SessionParams& params, OffsetBound bound) {
  return bound == OffsetBound::kDisplay ? 2 * params.offset() - 2 : params.prefetch_level();
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Shared quantities for one parameter set.
struct Setup {
  const SessionParams& params;
  const AnalysisOptions& options;
  int n;
  int x;
  int phi;
  int level;  // x + phi - 1
  EventProbs pq;
  kernels::Walk walk;
  LogFactorials lf;
  std::vector<double> shifted;     // first passage from `level`
  std::vector<double> cumulative;  // cumulative[m] = sum_{i<=m} shifted[i]
  double early;                    // P_s1

  Setup(const SessionParams& p, const AnalysisOptions& o)
      : params(p),
        options(o),
        n(p.file_size()),
        x(p.startup()),
        phi(p.offset()),
        level(p.prefetch_level()),
        pq(event_probs(p)),
        walk(kernels::Walk::from(pq)),
        lf(2 * static_cast<std::int64_t>(p.file_size()) + 2),
        shifted(kernels::first_passage(p.file_size() + 1, p.prefetch_level(), walk, lf)),
        cumulative(shifted.size()),
        early(early_starvation_prob(p)) {
    double acc = 0.0;
    for (std::size_t m = 0; m < shifted.size(); ++m) cumulative[m] = (acc += shifted[m]);
  }

  bool has_early_regime() const { return x <= phi - 2; }

  // Starvation formula for phi <= x applied to a file of `frames` frames.
  double fresh_small(int frames) const {
    return frames - 1 >= 0 ? cumulative[std::min<std::size_t>(frames - 1, cumulative.size() - 1)]
                           : 0.0;
  }

  // Closed form for phi > x applied to a file of `frames` frames.
  double fresh_large(int frames) const {
    const int lo = offset_bound(params, options.offset_bound);
    double late = 0.0;
    for (int k = lo; k <= frames - 1 && k < static_cast<int>(shifted.size()); ++k) {
      late += shifted[k];
    }
    return early + (1.0 - early) * late;
  }

  std::vector<double> first_vector() const {
    std::vector<double> f(n + 1, 0.0);
    if (options.model == EventModel::kConditioned) {
      if (!has_early_regime()) {
        for (int k = 1; k < n; ++k) f[k] = shifted[k];
        return f;
      }
      return kernels::conditioned_early_row(n, phi, x, 0, walk, lf);
    }
    for (int k = x; k <= phi - 2 && k < n; ++k) f[k] = first_emptiness_prob(k, x, pq.p, pq.q);
    const int lo = std::max(offset_bound(params, options.offset_bound), 1);
    for (int k = lo; k < n; ++k) f[k] = (1.0 - early) * shifted[k];
    return f;
  }

  std::shared_ptr<const TransitionKernel> transition() const {
    // Rows that resume before the shifted base layers are reachable.
    const int first = 1;
    const int last = phi - 2 - x;
    std::vector<std::vector<double>> rows;
    if (last >= first) {
      rows.reserve(last - first + 1);
      for (int from = first; from <= last; ++from) {
        if (options.model == EventModel::kConditioned) {
          rows.push_back(kernels::conditioned_early_row(n, phi, from + x, from, walk, lf));
        } else {
          std::vector<double> row(n + 1, 0.0);
          for (int to = from + x; to <= phi - 2 && to < n; ++to) {
            row[to] = first_emptiness_prob(to - from, x, pq.p, pq.q);
          }
          for (int to = 2 * phi - 2; to < n; ++to) row[to] = shifted[to - from];
          rows.push_back(std::move(row));
        }
      }
    }
    return std::make_shared<const TransitionKernel>(n, shifted, first, std::move(rows));
  }

  bool in_zero_window(int k) const {
    const int hi = options.survival_window == SurvivalWindow::kInclusive ? 2 * phi - 3 : 2 * phi - 4;
    return k >= phi - 1 && k <= hi;
  }

  std::vector<double> conditioned_last(const TransitionKernel& m) const {
    std::vector<double> l(n + 1, 0.0);
    for (int k = x; k < n; ++k) {
      if (phi >= 2 && k >= phi - 1 && k <= 2 * phi - 3) continue;  // no starvation possible here
      l[k] = std::clamp(1.0 - m.row_sum(k), 0.0, 1.0);
    }
    return l;
  }

  std::vector<double> product_last(int j) const {
    std::vector<double> l(n + 1, 0.0);
    const int e = floor_div(phi - 2, x);
    if (j == 1 || e >= j) {
      const int lower = j * x;
      for (int k = lower; k < n; ++k) {
        if (in_zero_window(k)) continue;
        if (k >= n - level) {
          l[k] = 1.0;
        } else if (k < phi - x) {
          l[k] = 1.0 - fresh_large(n - k);
        } else {
          l[k] = 1.0 - fresh_small(n - k);
        }
      }
      return l;
    }
    const int lower = 2 * phi - 2 + (j - e) * level;
    for (int k = std::max(lower, 1); k < n; ++k) {
      l[k] = k >= n - level ? 1.0 : 1.0 - fresh_small(n - k);
    }
    return l;
  }
};

}  // namespace

std::string to_string(EventModel m) {
  return m == EventModel::kConditioned ? "conditioned" : "product";
}

std::string to_string(OffsetBound b) { return b == OffsetBound::kDisplay ? "display" : "proof"; }

EventModel parse_event_model(const std::string& s) {
  if (s == "conditioned") return EventModel::kConditioned;
  if (s == "product") return EventModel::kProduct;
  throw ConfigError("event_model", "expected 'conditioned' or 'product', got '" + s + "'");
}

OffsetBound parse_offset_bound(const std::string& s) {
  if (s == "display") return OffsetBound::kDisplay;
  if (s == "proof") return OffsetBound::kProof;
  throw ConfigError("phi_bound", "expected 'display' or 'proof', got '" + s + "'");
}

double starvation_prob_small_offset(const SessionParams& params) {
  if (params.offset() > params.startup()) {
    throw RegimeError("small-offset formula requires offset_phi <= startup_x");
  }
  const int level = params.prefetch_level();
  return sum_first_emptiness(level, params.file_size() - 1, level, event_probs(params));
}

double early_starvation_prob(const SessionParams& params) {
  return sum_first_emptiness(params.startup(), params.offset() - 2, params.startup(),
                             event_probs(params));
}

double starvation_prob_large_offset(const SessionParams& params, const AnalysisOptions& options) {
  if (params.offset() <= params.startup()) {
    throw RegimeError("large-offset formula requires offset_phi > startup_x");
  }
  const auto pq = event_probs(params);
  const int n = params.file_size();
  const int level = params.prefetch_level();
  if (options.model == EventModel::kProduct) {
    const double early = early_starvation_prob(params);
    const double late =
        sum_first_emptiness(offset_bound(params, options.offset_bound), n - 1, level, pq);
    return early + (1.0 - early) * late;
  }
  if (params.startup() >= params.offset() - 1) {
    // The shifted layers are contiguous from the first frame on.
    return sum_first_emptiness(level, n - 1, level, pq);
  }
  const auto walk = kernels::Walk::from(pq);
  const LogFactorials lf(2 * static_cast<std::int64_t>(n) + 2);
  const auto row = kernels::conditioned_early_row(n, params.offset(), params.startup(), 0, walk, lf);
  return std::min(1.0, kernels::sum(row));
}

double starvation_prob(const SessionParams& params, const AnalysisOptions& options) {
  return params.offset() <= params.startup() ? starvation_prob_small_offset(params)
                                             : starvation_prob_large_offset(params, options);
}

EventVectors build_event_vectors(const SessionParams& params, int count,
                                 const AnalysisOptions& options) {
  if (count < 1) throw ConfigError("max_count", "must be >= 1");
  const Setup setup(params, options);
  EventVectors ev;
  ev.first = setup.first_vector();
  const auto kernel = setup.transition();
  ev.transitions.assign(static_cast<std::size_t>(count - 1), kernel);
  ev.last.reserve(count);
  if (options.model == EventModel::kConditioned) {
    const auto l = setup.conditioned_last(*kernel);
    ev.last.assign(static_cast<std::size_t>(count), l);
  } else {
    for (int j = 1; j <= count; ++j) ev.last.push_back(setup.product_last(j));
  }
  return ev;
}

double StarvationPmf::at_least(int j) const {
  if (j <= 0) return 1.0;
  double acc = tail_mass;
  for (int i = static_cast<int>(probs.size()) - 1; i >= j; --i) acc += probs[i];
  return acc;
}

StarvationPmf starvation_count_pmf(const SessionParams& params, const AnalysisOptions& options) {
  const int max_count = options.max_count;
  if (max_count < 1) throw ConfigError("max_count", "must be >= 1");
  // One transition past max_count measures the mass that truncation drops.
  const EventVectors ev = build_event_vectors(params, max_count + 1, options);
  const int n = params.file_size();

  std::vector<double> probs(1, 0.0);
  std::vector<double> vec = ev.first;
  std::vector<double> next(n + 1, 0.0);
  const double first_mass = kernels::sum(vec);
  double tail = first_mass;  // P(at least j starvations) entering iteration j
  int reached = 0;
  for (int j = 1; j <= max_count && tail > kNegligibleMass; ++j) {
    probs.push_back(kernels::dot(vec, ev.last_for(j)));
    reached = j;
    kernels::propagate(vec, ev.transition(j), next);
    vec.swap(next);
    tail = kernels::sum(vec);
  }
  if (tail <= kNegligibleMass) tail = 0.0;
  if (tail > options.truncation_tolerance) {
    throw BudgetError("starvation count pmf: mass " + std::to_string(tail) + " beyond " +
                      std::to_string(max_count) + " starvations exceeds the truncation tolerance");
  }

  if (options.model == EventModel::kConditioned) {
    // P(no starvation) = 1 - P(first starvation before the end).
    probs[0] = std::clamp(1.0 - first_mass, 0.0, 1.0);
  } else {
    double rest = 0.0;
    for (std::size_t j = 1; j < probs.size(); ++j) rest += probs[j];
    probs[0] = std::clamp(1.0 - rest, 0.0, 1.0);
  }
  return StarvationPmf{std::move(probs), reached, tail, params};
}

double pgf_evaluate(const StarvationPmf& pmf, double z) {
  double acc = 0.0;
  for (auto it = pmf.probs.rbegin(); it != pmf.probs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double expected_starvations(const StarvationPmf& pmf) {
  double acc = 0.0;
  for (std::size_t j = 1; j < pmf.probs.size(); ++j) acc += static_cast<double>(j) * pmf.probs[j];
  return acc;
}

}  // namespace bsc
