#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsc/qoe_planner.hpp"
#include "bsc/report.hpp"

namespace bsc::cli {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kRegime = 3, kBudget = 4 };

struct SweepSpec {
  std::string field;
  double start;
  double stop;
  double step;

  static SweepSpec parse(const std::string& text);  // FIELD=START:STOP:STEP
  std::string str() const;
  std::vector<double> values() const;
};

struct ArrivalConfig {
  std::string kind = "poisson";  // poisson | logistic | on_off
  // Zero means "derive from the mean rate".
  double location = 0.0;
  double scale = 0.0;
  double on_rate = 0.0;
  double on_mean = 0.0;
  double off_mean = 0.0;

  ArrivalProcess build(double rate) const;
};

// Every knob of every subcommand. Only the fields a command reads are echoed.
struct RunConfig {
  std::string command;
  std::string format = "csv";

  double rho = 0.95;
  double mu = 1.0;
  int file_size = 600;
  int startup = 40;
  int offset = 50;
  std::vector<SweepSpec> sweeps;

  std::string event_model = "conditioned";
  std::string phi_bound = "display";
  int max_count = 32;
  double truncation_tolerance = 1e-6;

  std::uint64_t seed = 1;
  int runs = 4000;
  ArrivalConfig arrivals;
  bool with_baseline = false;

  double low_kbps = 1000.0;
  double high_kbps = 2500.0;

  double throughput_kbps = 2200.0;
  QoEWeights weights;
  std::vector<Rung> ladder = BitrateLadder::reference().levels();
  std::string weight_mode = "bitrate";  // bitrate | proportional
  double frame_rate = 25.0;
  std::string quality_mode = "fraction";
  double svc_overhead = 1.0;
  int fallback_runs = 200;

  double risk_threshold = 0.001;

  bool exact = true;

  Json to_json() const;
  // Strict: unknown keys and wrong types are ConfigErrors.
  static RunConfig from_json(const Json& j, const std::string& command);
};

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsc::cli
