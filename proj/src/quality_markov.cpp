#include "bsc/quality_markov.hpp"

#include <cmath>
#include <string>

#include "bsc/errors.hpp"

namespace bsc {
namespace {

void check_rates(double lambda, double mu) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu", "must be > 0");
  if (mu <= lambda) {
    throw RegimeError("quality analysis needs mu > lambda (rho < 1); the chain is not absorbed a.s.");
  }
}

constexpr int kMaxTableStates = 5000000;

}  // namespace

double QuasiStationaryDist::at(int state) const {
  if (state < lowest_state()) return 0.0;
  const double norm = static_cast<double>(phi_ + x_);
  if (state <= x_) return (1.0 - std::pow(rho_, state + phi_)) / norm;
  return (1.0 - std::pow(rho_, x_ + phi_)) * std::pow(rho_, state - x_) / norm;
}

double QuasiStationaryDist::mass_from(int state) const {
  const double norm = static_cast<double>(phi_ + x_);
  if (state > x_) {
    return (1.0 - std::pow(rho_, x_ + phi_)) * std::pow(rho_, state - x_) / ((1.0 - rho_) * norm);
  }
  double acc = 0.0;
  for (int j = std::max(state, lowest_state()); j <= x_; ++j) acc += at(j);
  return acc + mass_from(x_ + 1);
}

double QuasiStationaryDist::tail_mass() const { return mass_from(last_ + 1); }

QuasiStationaryDist QuasiStationaryDist::closed_form(int x, int phi, double rho) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  if (phi < 1) throw ConfigError("offset_phi", "must be >= 1");
  if (!(rho >= 0.0)) throw ConfigError("rho", "must be >= 0");
  if (rho >= 1.0) throw RegimeError("quasi-stationary distribution requires rho < 1");
  QuasiStationaryDist d;
  d.x_ = x;
  d.phi_ = phi;
  d.rho_ = rho;
  d.last_ = x;
  return d;
}

QuasiStationaryDist quasi_stationary(int x, int phi, double rho, double tail_tolerance) {
  auto d = QuasiStationaryDist::closed_form(x, phi, rho);
  // mass_from(x + k) = head * rho^(k-1), so solve for the first k below tolerance.
  const double head = d.mass_from(x + 1);
  if (head >= tail_tolerance && rho > 0.0) {
    const double k = std::ceil(std::log(tail_tolerance / head) / std::log(rho));
    if (!(k < static_cast<double>(kMaxTableStates))) {
      throw BudgetError("quasi-stationary table would exceed " + std::to_string(kMaxTableStates) +
                        " states at rho = " + std::to_string(rho));
    }
    d.last_ = x + static_cast<int>(k);
    while (d.last_ > x && d.mass_from(d.last_) < tail_tolerance) --d.last_;
    while (d.mass_from(d.last_ + 1) >= tail_tolerance) ++d.last_;
  }
  d.table_.reserve(static_cast<std::size_t>(d.last_ - d.lowest_state() + 1));
  for (int j = d.lowest_state(); j <= d.last_; ++j) d.table_.push_back(d.at(j));
  return d;
}

double absorption_time(int x, int phi, double lambda, double mu) {
  if (x < 1) throw ConfigError("startup_x", "must be >= 1");
  if (phi < 1) throw ConfigError("offset_phi", "must be >= 1");
  check_rates(lambda, mu);
  return static_cast<double>(x + phi) / (mu - lambda);
}

QualityTimes quality_times(int x, int phi, double lambda, double mu, double low_kbps,
                           double high_kbps) {
  const double tau = absorption_time(x, phi, lambda, mu);
  // Closed forms only; the explicit table is never needed here.
  const auto dist = QuasiStationaryDist::closed_form(x, phi, lambda / mu);
  double low_mass = 0.0;
  for (int j = dist.lowest_state(); j <= -1; ++j) low_mass += dist.at(j);
  const double low = low_mass * tau;
  const double high = dist.mass_from(0) * tau;
  const double avg = (low * low_kbps + high * high_kbps) / (low + high);
  return {low, high, avg, tau};
}

BusyPeriodStats busy_period_stats(double lambda, double mu) {
  check_rates(lambda, mu);
  const double rho = lambda / mu;
  return {1.0 / (mu - lambda), (1.0 + rho) / (mu * mu * std::pow(1.0 - rho, 3))};
}

double balance_residual(const QuasiStationaryDist& dist, double lambda, double mu, int state) {
  const int bottom = dist.lowest_state();
  const double out = (lambda + mu) * dist.at(state);
  if (state == bottom) return mu * dist.at(bottom + 1) - out;
  double in = lambda * dist.at(state - 1) + mu * dist.at(state + 1);
  if (state == dist.startup()) in += mu * dist.at(bottom);  // redirected absorption
  return in - out;
}

}  // namespace bsc
