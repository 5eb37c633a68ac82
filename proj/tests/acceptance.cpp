// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bsc/ballot_analysis.hpp"
#include "bsc/des_simulator.hpp"
#include "bsc/path_oracle.hpp"
#include "bsc/qoe_planner.hpp"
#include "bsc/quality_markov.hpp"

using namespace bsc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// G(1) of every pmf produced by criteria 1-4, checked by criterion 5.
std::vector<double> g1_values;

void record(const StarvationPmf& pmf) { g1_values.push_back(pgf_evaluate(pmf, 1.0)); }

// Larger of the standard error under the analytic value and the empirical one.
double binomial_se(double analytic, double empirical, int runs) {
  const double under_null = std::sqrt(analytic * (1.0 - analytic) / runs);
  const double observed = std::sqrt(empirical * (1.0 - empirical) / runs);
  return std::max(under_null, observed);
}

bool within(double analytic, double empirical, double se, double k = 3.0) {
  if (se == 0.0) return analytic == empirical || std::abs(analytic - empirical) < 1e-12;
  return std::abs(analytic - empirical) <= k * se;
}

Outcome oracle_equivalence() {
  struct Load {
    double rho;
    long num, den;
  };
  const Load loads[] = {{0.5, 1, 2}, {1.0, 1, 1}, {2.0, 2, 1}};
  double worst = 0.0;
  int cases = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int x = 1; x <= 3; ++x) {
      for (int phi = 1; phi <= 4; ++phi) {
        if (x + phi - 1 > n) continue;
        for (const auto& load : loads) {
          const auto params = SessionParams::from_load(load.rho, n, x, phi);
          const Rational p = exact_arrival_prob(load.num, load.den);
          const auto oracle = enumerate_paths_exact(params, p, Rational(1) - p);
          const auto pmf = starvation_count_pmf(params);
          record(pmf);
          for (std::size_t j = 0; j < std::max(pmf.probs.size(), oracle.count_pmf.size()); ++j) {
            const double o = j < oracle.count_pmf.size() ? oracle.count_pmf[j].convert_to<double>() : 0.0;
            const double a = j < pmf.probs.size() ? pmf.probs[j] : 0.0;
            worst = std::max(worst, std::abs(a - o));
          }
          const double o0 = oracle.count_pmf[0].convert_to<double>();
          worst = std::max(worst, std::abs(starvation_prob(params) - (1.0 - o0)));
          ++cases;
        }
      }
    }
  }
  return {worst <= 1e-9, fmt("%.0f cases, worst abs error %.3g", cases, worst)};
}

Outcome small_offset_collapse() {
  double worst = 0.0;
  int cases = 0;
  for (int n : {50, 100, 300, 600, 1000}) {
    for (int x : {1, 5, 10, 20, 40}) {
      for (double rho : {0.8, 1.2}) {
        const auto params = SessionParams::from_load(rho, n, x, 1);
        const auto ev = event_probs(params);
        worst = std::max(worst, std::abs(starvation_prob_small_offset(params) -
                                         baseline_starvation_prob(n, x, ev.p, ev.q)));
        ++cases;
      }
    }
  }
  return {cases == 50 && worst <= 1e-12, fmt("%.0f points, worst abs difference %.3g", cases, worst)};
}

constexpr int kMcRuns = 4000;
const int kSweepN[] = {200, 600, 1000, 1500};
const double kSweepRho[] = {0.9, 0.95, 1.1};

Outcome monte_carlo_agreement() {
  Outcome out;
  double worst_z = 0.0;
  int points = 0;
  SimulationOptions opts;
  opts.stop_at_first_starvation = true;
  for (int n : kSweepN) {
    double prev = 2.0;
    for (double rho : kSweepRho) {
      const auto params = SessionParams::from_load(rho, n, 40, 50);
      const double analytic = starvation_prob(params);
      record(starvation_count_pmf(params));
      const auto st = replicate(params, ArrivalProcess::poisson(rho), kMcRuns, 1000 + points, opts);
      const double sim = st.starvation_prob.value;
      const double se = binomial_se(analytic, sim, kMcRuns);
      if (!within(analytic, sim, se)) {
        out.pass = false;
        out.detail += fmt(" [N=%.0f rho=%.2f analytic %.4g sim %.4g]", n, rho, analytic, sim);
      }
      if (se > 0.0) worst_z = std::max(worst_z, std::abs(analytic - sim) / se);
      if (!(analytic < prev)) {
        out.pass = false;
        out.detail += fmt(" [not decreasing in rho at N=%.0f]", n);
      }
      prev = analytic;
      ++points;
    }
  }
  out.detail = fmt("%.0f points x %.0f runs, worst |z| %.2f, decreasing in rho", points, kMcRuns, worst_z) +
               out.detail;
  return out;
}

Outcome count_distribution() {
  Outcome out;
  const double rho = 0.66;
  double worst_z = 0.0;
  double prev_p0 = 2.0, prev_p1 = -1.0, first_p0 = 0.0, last_p0 = 0.0, last_p1 = 0.0;
  const int sizes[] = {100, 200, 300, 400, 500, 600, 800, 1000};
  for (int n : sizes) {
    const auto params = SessionParams::from_load(rho, n, 40, 50);
    const auto pmf = starvation_count_pmf(params);
    record(pmf);
    const auto st = replicate(params, ArrivalProcess::poisson(rho), kMcRuns, 5000 + n);
    const double analytic[3] = {pmf.probs[0], pmf.at_least(1), pmf.at_least(2)};
    const double sim[3] = {1.0 - st.at_least(1).value, st.at_least(1).value, st.at_least(2).value};
    for (int i = 0; i < 3; ++i) {
      const double se = binomial_se(analytic[i], sim[i], kMcRuns);
      if (!within(analytic[i], sim[i], se)) {
        out.pass = false;
        out.detail += fmt(" [N=%.0f stat %.0f analytic %.4g sim %.4g]", n, i, analytic[i], sim[i]);
      }
      if (se > 0.0) worst_z = std::max(worst_z, std::abs(analytic[i] - sim[i]) / se);
    }
    if (analytic[0] > prev_p0 + 1e-12 || analytic[1] < prev_p1 - 1e-12) {
      out.pass = false;
      out.detail += fmt(" [not monotone at N=%.0f]", n);
    }
    if (n == sizes[0]) first_p0 = analytic[0];
    prev_p0 = last_p0 = analytic[0];
    prev_p1 = last_p1 = analytic[1];
  }
  if (!(first_p0 > 0.99 && last_p0 < 0.01 && last_p1 > 0.99)) out.pass = false;
  out.detail = fmt("P0 %.4f -> %.3g, P>=1 -> %.4f, worst |z| %.2f", first_p0, last_p0, last_p1, worst_z) +
               out.detail;
  return out;
}

Outcome pgf_normalization() {
  const auto [lo, hi] = std::minmax_element(g1_values.begin(), g1_values.end());
  const bool ok = !g1_values.empty() && *lo >= 1.0 - 1e-6 - 1e-9 && *hi <= 1.0 + 1e-9;
  return {ok, fmt("%.0f pmfs, G(1) in [1 %+.3g, 1 %+.3g]", g1_values.size(), *lo - 1.0, *hi - 1.0)};
}

Outcome quasi_stationary_check() {
  double worst_residual = 0.0, worst_norm = 0.0;
  int grid = 0;
  for (int x : {1, 3, 10, 40}) {
    for (int phi : {1, 2, 5, 50}) {
      for (double rho : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        const double lambda = rho, mu = 1.0;
        const auto dist = quasi_stationary(x, phi, rho);
        double total = dist.tail_mass();
        for (double v : dist.table()) total += v;
        worst_norm = std::max(worst_norm, std::abs(total - 1.0));
        for (int s = dist.lowest_state(); s <= dist.tail_truncated_at(); ++s) {
          worst_residual = std::max(worst_residual, std::abs(balance_residual(dist, lambda, mu, s)));
        }
        ++grid;
      }
    }
  }
  const int x = 40, phi = 50;
  const double lambda = 0.95, mu = 1.0;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kMcRuns; ++i) {
    const double t = simulate_quality_chain(x, phi, lambda, mu, 9000 + i).absorption_time;
    sum += t;
    sum_sq += t * t;
  }
  const double mean = sum / kMcRuns;
  const double se = std::sqrt((sum_sq / kMcRuns - mean * mean) / (kMcRuns - 1));
  const double expected = absorption_time(x, phi, lambda, mu);
  const bool ok = worst_residual < 1e-10 && worst_norm <= 1e-12 && std::abs(mean - expected) <= 3.0 * se;
  return {ok, fmt("%.0f grid points, residual %.3g, |sum-1| %.3g", grid, worst_residual, worst_norm) +
                  fmt("; absorption %.1f vs %.1f (SE %.1f)", mean, expected, se)};
}

Outcome busy_periods() {
  constexpr std::size_t kSpells = 10000;
  const double rho = 0.5, mu = 1.0;
  const auto params = SessionParams::from_load(rho, 20000, 1, 3, mu);
  std::vector<double> spells;
  for (std::uint64_t seed = 1; spells.size() < kSpells; ++seed) {
    const auto t = simulate_session(params, ArrivalProcess::poisson(rho * mu), 70000 + seed);
    std::vector<double> these;
    for (const auto& q : t.quality_intervals) {
      if (q.level == Quality::kOptimal && q.opened_by_switch && q.closed_by_switch) {
        these.push_back(q.end - q.start);
      }
    }
    // The spell that sees the last download ends without arrivals; drop it.
    if (!these.empty()) these.pop_back();
    for (double d : these) {
      if (spells.size() < kSpells) spells.push_back(d);
    }
  }
  const double n = static_cast<double>(spells.size());
  double mean = 0.0;
  for (double d : spells) mean += d;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double d : spells) {
    const double c = d - mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m4 /= n;
  const double var = m2 * n / (n - 1.0);
  const double se_mean = std::sqrt(var / n);
  const double se_var = std::sqrt((m4 - m2 * m2) / n);
  const auto expected = busy_period_stats(rho * mu, mu);
  const bool ok = std::abs(mean - expected.mean) <= 3.0 * se_mean &&
                  std::abs(var - expected.variance) <= 3.0 * se_var;
  return {ok, fmt("%.0f spells, mean %.3f vs %.0f (SE %.3f), ", n, mean, expected.mean, se_mean) +
                  fmt("variance %.2f vs %.0f (SE %.2f)", var, expected.variance, se_var)};
}

Outcome dominance() {
  double worst_gap = -1.0;
  int points = 0;
  for (int n : kSweepN) {
    for (double rho : kSweepRho) {
      const auto params = SessionParams::from_load(rho, n, 40, 50);
      const auto ev = event_probs(params);
      worst_gap = std::max(worst_gap, starvation_prob(params) - baseline_starvation_prob(n, 40, ev.p, ev.q));
      ++points;
    }
  }
  return {worst_gap <= 0.0, fmt("%.0f points, max (BSC - baseline) %.3g", points, worst_gap)};
}

Outcome ladder_ordering() {
  Outcome out;
  const auto ladder = BitrateLadder::reference();
  const QoEWeights weights{0.1, 1.0, 0.01};
  const double throughput = 2200.0;
  for (int n : {100, 200, 500, 1000, 1500}) {
    const auto rows = compare_ladder(ladder, throughput, n, weights);
    auto cost_of = [&](const std::string& label) {
      for (const auto& r : rows) {
        if (r.label == label) return r.cost;
      }
      return std::nan("");
    };
    std::string best_dash;
    for (const auto& r : rows) {
      if (!r.bsc) {
        best_dash = r.label;
        break;
      }
    }
    const double dash = cost_of("480p");
    const bool pair_wins = cost_of("720p+360p") < dash || cost_of("720p+480p") < dash;
    const bool low_pair_loses = cost_of("480p+360p") > dash;
    if (best_dash != "480p" || !pair_wins || !low_pair_loses) {
      out.pass = false;
      out.detail += " [N=" + std::to_string(n) + " dash=" + best_dash + "]";
    }
    if (n == 1500) {
      out.detail = fmt("N=1500 cost 720p+480p %.3f, 720p+360p %.3f, 480p %.3f, 480p+360p %.3f",
                       cost_of("720p+480p"), cost_of("720p+360p"), dash, cost_of("480p+360p")) +
                   out.detail;
    }
  }
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"offset-1 collapse to the baseline", small_offset_collapse},
      {"starvation probability vs Monte Carlo", monte_carlo_agreement},
      {"starvation counts vs N at rho 0.66", count_distribution},
      {"pgf normalisation", pgf_normalization},
      {"quasi-stationary law", quasi_stationary_check},
      {"optimal spells are busy periods", busy_periods},
      {"offset never adds starvation", dominance},
      {"ladder ordering at 2200 Kbps", ladder_ordering},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
