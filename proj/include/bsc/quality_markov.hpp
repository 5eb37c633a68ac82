#pragma once

// Quality switching as a birth-death chain on n = A - D, where A is the last
// optimal frame downloaded and D the frame on screen. n >= 0 plays at optimal
// quality, -phi < n < 0 plays base layers only, n = -phi is starvation.

#include <vector>

namespace bsc {

// Stationary law of the chain whose absorption into -phi is redirected to the
// start state x. States -phi+1 .. tail_truncated_at are held explicitly; the
// geometric tail beyond is summed analytically.
class QuasiStationaryDist {
 public:
  int startup() const { return x_; }
  int offset() const { return phi_; }
  double rho() const { return rho_; }
  int lowest_state() const { return 1 - phi_; }
  int tail_truncated_at() const { return last_; }

  // Closed form, valid for any state (zero below -phi+1).
  double at(int state) const;
  // Explicit table, index 0 is state -phi+1.
  const std::vector<double>& table() const { return table_; }
  // Mass of states beyond tail_truncated_at().
  double tail_mass() const;
  // Mass of all states >= `state`, summed analytically.
  double mass_from(int state) const;

  // Closed forms only: no table, tail_truncated_at() == startup().
  static QuasiStationaryDist closed_form(int x, int phi, double rho);

 private:
  friend QuasiStationaryDist quasi_stationary(int, int, double, double);
  int x_ = 1;
  int phi_ = 1;
  double rho_ = 0.0;
  int last_ = 0;
  std::vector<double> table_;
};

// Throws RegimeError for rho >= 1, ConfigError for x < 1, phi < 1, rho < 0,
// and BudgetError when the table would be too long (rho very close to 1).
QuasiStationaryDist quasi_stationary(int x, int phi, double rho, double tail_tolerance = 1e-9);

// Mean time from state x to absorption at -phi: (x + phi) / (mu - lambda).
double absorption_time(int x, int phi, double lambda, double mu);

struct QualityTimes {
  double low_time;         // T_L
  double high_time;        // T_H
  double average_bitrate;  // Kbps
  double absorption_time;  // E[tau_x]

  double low_fraction() const { return low_time / (low_time + high_time); }
};

QualityTimes quality_times(int x, int phi, double lambda, double mu, double low_kbps,
                           double high_kbps);

struct BusyPeriodStats {
  double mean;
  double variance;
};

// Optimal-quality spells are M/M/1 busy periods.
BusyPeriodStats busy_period_stats(double lambda, double mu);

// lambda*q[n-1] + mu*q[n+1] (+ redirected inflow) - (lambda+mu)*q[n] for the
// redirected chain; zero when the closed forms are exact.
double balance_residual(const QuasiStationaryDist& dist, double lambda, double mu, int state);

}  // namespace bsc
