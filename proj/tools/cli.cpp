#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "bsc/ballot_analysis.hpp"
#include "bsc/des_simulator.hpp"
#include "bsc/errors.hpp"
#include "bsc/path_oracle.hpp"
#include "bsc/quality_markov.hpp"

namespace bsc::cli {
namespace {

const std::vector<std::string> kCommands = {"analyze", "quality", "simulate", "compare", "oracle", "offset"};

// Keys each command reads, in echo order.
const std::vector<std::string>& keys_for(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"analyze",
       {"command", "format", "rho", "mu", "file_size_N", "startup_x", "offset_phi", "sweep",
        "event_model", "phi_bound", "max_count", "truncation_tolerance"}},
      {"quality",
       {"command", "format", "rho", "mu", "startup_x", "offset_phi", "sweep", "low_kbps", "high_kbps"}},
      {"simulate",
       {"command", "format", "rho", "mu", "file_size_N", "startup_x", "offset_phi", "sweep", "seed",
        "runs", "arrivals", "with_baseline", "event_model", "phi_bound", "max_count",
        "truncation_tolerance"}},
      {"compare",
       {"command", "format", "file_size_N", "startup_x", "offset_phi", "sweep", "throughput_kbps",
        "weights", "ladder", "weight_mode", "frame_rate", "quality_mode", "svc_overhead",
        "fallback_runs", "seed", "event_model", "max_count", "truncation_tolerance"}},
      {"oracle", {"command", "format", "rho", "file_size_N", "startup_x", "offset_phi", "exact"}},
      {"offset",
       {"command", "format", "rho", "file_size_N", "startup_x", "sweep", "risk_threshold",
        "event_model", "phi_bound", "max_count", "truncation_tolerance"}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("command", "unknown command '" + command + "'");
  return it->second;
}

double parse_double(const std::string& s, const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(field, "'" + s + "' is not a number");
  }
  return v;
}

int as_int(double v, const std::string& field) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(field, "must be an integer");
  return static_cast<int>(v);
}

template <class T>
T get(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

int get_int(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(key, "must be a number");
  return as_int(v.get<double>(), key);
}

double rung_weight(const Rung& r, double top, const std::string& mode) {
  if (!std::isnan(r.weight)) return r.weight;
  return mode == "proportional" ? r.kbps / top : r.kbps;
}

std::vector<Rung> default_ladder() {
  auto levels = BitrateLadder::reference().levels();
  for (auto& r : levels) r.weight = std::nan("");
  return levels;
}

AnalysisOptions analysis_options(const RunConfig& c) {
  AnalysisOptions o;
  o.model = parse_event_model(c.event_model);
  o.offset_bound = parse_offset_bound(c.phi_bound);
  o.max_count = c.max_count;
  o.truncation_tolerance = c.truncation_tolerance;
  if (o.max_count < 1) throw ConfigError("max_count", "must be >= 1");
  if (!(o.truncation_tolerance > 0.0)) throw ConfigError("truncation_tolerance", "must be > 0");
  return o;
}

// Exact rational value of the decimal text of v.
Rational decimal_rational(double v) {
  const std::string s = format_number(v);
  const auto epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  int exp10 = epos == std::string::npos ? 0 : std::stoi(s.substr(epos + 1));
  const auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<int>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  // A leading zero would make cpp_int read the digits as octal.
  mant.erase(0, std::min(mant.find_first_not_of('0'), mant.size() - 1));
  boost::multiprecision::cpp_int num(mant);
  boost::multiprecision::cpp_int scale = 1;
  for (int i = 0; i < std::abs(exp10); ++i) scale *= 10;
  return exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(int v) { return std::to_string(v); }

// One sweep point: the config with every swept field overwritten.
std::vector<RunConfig> expand(const RunConfig& base) {
  std::vector<RunConfig> points{base};
  for (const auto& sw : base.sweeps) {
    std::vector<RunConfig> next;
    for (const auto& p : points) {
      for (double v : sw.values()) {
        RunConfig c = p;
        if (sw.field == "rho") c.rho = v;
        else if (sw.field == "mu") c.mu = v;
        else if (sw.field == "file_size_N") c.file_size = as_int(v, sw.field);
        else if (sw.field == "startup_x") c.startup = as_int(v, sw.field);
        else if (sw.field == "offset_phi") c.offset = as_int(v, sw.field);
        else if (sw.field == "throughput_kbps") c.throughput_kbps = v;
        else if (sw.field == "risk_threshold") c.risk_threshold = v;
        else throw ConfigError("sweep", "field '" + sw.field + "' cannot be swept");
        next.push_back(c);
      }
    }
    points = std::move(next);
  }
  return points;
}

struct Output {
  std::vector<std::string> notes;
  std::optional<CsvTable> table;
  Json data;  // used when there is no table
};

Output cmd_analyze(const RunConfig& cfg) {
  const auto opts = analysis_options(cfg);
  struct Row {
    SessionParams params;
    StarvationPmf pmf;
    double ps;
    double baseline;
  };
  std::vector<Row> rows;
  int width = 0;
  for (const auto& c : expand(cfg)) {
    const auto params = SessionParams::from_load(c.rho, c.file_size, c.startup, c.offset, c.mu);
    auto pmf = starvation_count_pmf(params, opts);
    const double ps = starvation_prob(params, opts);
    const auto e = event_probs(params);
    const double base = baseline_starvation_prob(c.file_size, c.startup, e.p, e.q);
    width = std::max(width, static_cast<int>(pmf.probs.size()));
    rows.push_back({params, std::move(pmf), ps, base});
  }
  std::vector<std::string> header = {"N", "rho", "x", "phi", "P_starv", "P_baseline", "E_starv",
                                     "G_0.5", "G_1", "tail_mass"};
  for (int j = 0; j < width; ++j) header.push_back("P_s" + std::to_string(j));
  CsvTable t(header);
  for (const auto& r : rows) {
    std::vector<std::string> cells = {
        fmt(r.params.file_size()), fmt(r.params.rho()), fmt(r.params.startup()),
        fmt(r.params.offset()), fmt(r.ps), fmt(r.baseline), fmt(expected_starvations(r.pmf)),
        fmt(pgf_evaluate(r.pmf, 0.5)), fmt(pgf_evaluate(r.pmf, 1.0)), fmt(r.pmf.tail_mass)};
    for (int j = 0; j < width; ++j) {
      cells.push_back(fmt(j < static_cast<int>(r.pmf.probs.size()) ? r.pmf.probs[j] : 0.0));
    }
    t.add_row(cells);
  }
  Output out;
  out.table = std::move(t);
  return out;
}

Output cmd_quality(const RunConfig& cfg) {
  CsvTable t({"x", "phi", "rho", "lambda", "mu", "low_kbps", "high_kbps", "E_tau", "T_low", "T_high",
              "low_fraction", "b_avg", "busy_mean", "busy_var"});
  for (const auto& c : expand(cfg)) {
    if (!(c.rho > 0.0)) throw ConfigError("rho", "must be > 0");
    if (!(c.mu > 0.0)) throw ConfigError("mu", "must be > 0");
    const double lambda = c.rho * c.mu;
    const auto qt = quality_times(c.startup, c.offset, lambda, c.mu, c.low_kbps, c.high_kbps);
    const auto bp = busy_period_stats(lambda, c.mu);
    t.add_row({fmt(c.startup), fmt(c.offset), fmt(c.rho), fmt(lambda), fmt(c.mu), fmt(c.low_kbps),
               fmt(c.high_kbps), fmt(qt.absorption_time), fmt(qt.low_time), fmt(qt.high_time),
               fmt(qt.low_fraction()), fmt(qt.average_bitrate), fmt(bp.mean), fmt(bp.variance)});
  }
  Output out;
  out.table = std::move(t);
  return out;
}

Output cmd_simulate(const RunConfig& cfg, const std::string& trace_path) {
  if (cfg.runs < 1) throw ConfigError("runs", "must be >= 1");
  const bool poisson = cfg.arrivals.kind == "poisson";
  const auto opts = analysis_options(cfg);
  std::vector<std::string> header = {
      "N", "rho", "x", "phi", "arrivals", "runs", "seed", "P_starv_hat", "P_starv_se", "P_ge2_hat",
      "P_ge2_se", "E_starv_hat", "E_starv_se", "optimal_fraction_hat", "optimal_fraction_se",
      "rebuffer_time_hat", "rebuffer_time_se", "initial_delay_hat", "initial_delay_se"};
  if (poisson) {
    for (const char* h : {"P_starv", "P_ge2", "E_starv", "z_P_starv"}) header.push_back(h);
  }
  if (cfg.with_baseline) {
    for (const char* h : {"nobsc_P_starv_hat", "nobsc_P_starv_se"}) header.push_back(h);
  }
  CsvTable t(header);
  Output out;
  if (!poisson) {
    out.notes.push_back("analytic columns omitted: no closed form for " + cfg.arrivals.kind +
                        " arrivals");
    out.notes.push_back("arrival shape parameters are experiment defaults, not measured values");
  }
  if (cfg.with_baseline) {
    out.notes.push_back("no-BSC baseline simulated as phi = 1, which is the same playback rule");
  }
  bool first = true;
  for (const auto& c : expand(cfg)) {
    const auto params = SessionParams::from_load(c.rho, c.file_size, c.startup, c.offset, c.mu);
    const auto arrivals = c.arrivals.build(params.lambda());
    if (first && !trace_path.empty()) {
      SimulationOptions so;
      so.record_events = true;
      std::ofstream f(trace_path, std::ios::binary);
      if (!f) throw ConfigError("trace", "cannot write " + trace_path);
      f << trace_to_csv(simulate_session(params, arrivals, c.seed, so));
    }
    first = false;
    const auto st = replicate(params, arrivals, c.runs, c.seed);
    const auto ge2 = st.at_least(2);
    std::vector<std::string> cells = {
        fmt(c.file_size), fmt(c.rho), fmt(c.startup), fmt(c.offset), arrivals.name(), fmt(c.runs),
        std::to_string(c.seed), fmt(st.starvation_prob.value), fmt(st.starvation_prob.std_error),
        fmt(ge2.value), fmt(ge2.std_error), fmt(st.mean_starvations.value),
        fmt(st.mean_starvations.std_error), fmt(st.optimal_fraction.value),
        fmt(st.optimal_fraction.std_error), fmt(st.mean_rebuffer_time.value),
        fmt(st.mean_rebuffer_time.std_error), fmt(st.mean_initial_delay.value),
        fmt(st.mean_initial_delay.std_error)};
    if (poisson) {
      const auto pmf = starvation_count_pmf(params, opts);
      const double ps = pmf.at_least(1);
      // Standard error under the analytic value, floored by the empirical one.
      const double se = std::max(std::sqrt(ps * (1.0 - ps) / c.runs),
                                 std::isnan(st.starvation_prob.std_error) ? 0.0 : st.starvation_prob.std_error);
      const double z = se > 0.0 ? (st.starvation_prob.value - ps) / se : 0.0;
      for (double v : {ps, pmf.at_least(2), expected_starvations(pmf), z}) cells.push_back(fmt(v));
    }
    if (c.with_baseline) {
      const auto nob = replicate(params.with_offset(1), arrivals, c.runs, c.seed);
      cells.push_back(fmt(nob.starvation_prob.value));
      cells.push_back(fmt(nob.starvation_prob.std_error));
    }
    t.add_row(cells);
  }
  out.table = std::move(t);
  return out;
}

Output cmd_compare(const RunConfig& cfg) {
  if (cfg.weight_mode != "bitrate" && cfg.weight_mode != "proportional") {
    throw ConfigError("weight_mode", "must be 'bitrate' or 'proportional'");
  }
  if (cfg.ladder.empty()) throw ConfigError("ladder", "must contain at least one level");
  double top = 0.0;
  for (const auto& r : cfg.ladder) top = std::max(top, r.kbps);
  std::vector<Rung> levels = cfg.ladder;
  for (auto& r : levels) r.weight = rung_weight(r, top, cfg.weight_mode);
  const auto ladder = BitrateLadder::make(levels);

  PlannerSettings s;
  s.frame_rate = cfg.frame_rate;
  s.startup = cfg.startup;
  s.offset = cfg.offset;
  if (cfg.quality_mode == "fraction") s.quality_mode = QualityMode::kFraction;
  else if (cfg.quality_mode == "absolute") s.quality_mode = QualityMode::kAbsolute;
  else throw ConfigError("quality_mode", "must be 'fraction' or 'absolute'");
  s.svc_overhead = cfg.svc_overhead;
  s.fallback_runs = cfg.fallback_runs;
  s.fallback_seed = cfg.seed;
  s.analysis = analysis_options(cfg);
  const auto weights = QoEWeights::make(cfg.weights.gamma1, cfg.weights.gamma2, cfg.weights.gamma3);

  CsvTable t({"N", "throughput_kbps", "rank", "config", "kind", "lambda", "rho", "initial_delay",
              "E_starv", "optimal_fraction", "quality_term", "cost", "quality_simulated"});
  for (const auto& c : expand(cfg)) {
    const auto ranked = compare_ladder(ladder, c.throughput_kbps, c.file_size, weights, s);
    int rank = 1;
    for (const auto& r : ranked) {
      t.add_row({fmt(c.file_size), fmt(c.throughput_kbps), fmt(rank++), r.label, r.bsc ? "bsc" : "dash",
                 fmt(r.lambda), fmt(r.rho), fmt(r.initial_delay), fmt(r.expected_starvations),
                 fmt(r.optimal_fraction), fmt(r.quality_term), fmt(r.cost),
                 r.quality_simulated ? "true" : "false"});
    }
  }
  Output out;
  out.table = std::move(t);
  return out;
}

Output cmd_oracle(const RunConfig& cfg) {
  const auto params = SessionParams::from_load(cfg.rho, cfg.file_size, cfg.startup, cfg.offset);
  Output out;
  if (cfg.exact) {
    const Rational p = [&] {
      const Rational rho = decimal_rational(cfg.rho);
      return rho / (1 + rho);
    }();
    const Rational q = 1 - p;
    const auto res = enumerate_paths_exact(params, p, q);
    CsvTable t({"j", "P_exact", "P"});
    Rational total = 0;
    for (std::size_t j = 0; j < res.count_pmf.size(); ++j) {
      total += res.count_pmf[j];
      t.add_row({std::to_string(j), rational_str(res.count_pmf[j]),
                 fmt(res.count_pmf[j].convert_to<double>())});
    }
    auto to_rows = [](const std::vector<std::vector<Rational>>& m, const char* a, const char* b) {
      Json arr = Json::array();
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t k = 0; k < m[i].size(); ++k) {
          if (m[i][k] == 0) continue;
          arr.push_back(Json{{a, i}, {b, k}, {"exact", rational_str(m[i][k])},
                             {"value", json_number(m[i][k].convert_to<double>())}});
        }
      }
      return arr;
    };
    out.data = Json{{"p_exact", rational_str(p)},
                    {"q_exact", rational_str(q)},
                    {"pmf_sum_exact", rational_str(total)},
                    {"count_pmf", t.to_json()},
                    {"nth_starvation_at", to_rows(res.nth_starvation_at, "j_minus_1", "k")},
                    {"last_starvation_at", to_rows(res.last_starvation_at, "j_minus_1", "k")},
                    {"first_second", to_rows(res.first_second, "k1", "k2")}};
    out.table = std::move(t);
  } else {
    const auto res = enumerate_paths(params);
    CsvTable t({"j", "P"});
    for (std::size_t j = 0; j < res.count_pmf.size(); ++j) t.add_row({std::to_string(j), fmt(res.count_pmf[j])});
    out.data = Json{{"count_pmf", t.to_json()}};
    out.table = std::move(t);
  }
  return out;
}

Output cmd_offset(const RunConfig& cfg) {
  const auto opts = analysis_options(cfg);
  CsvTable t({"N", "x", "rho", "risk_threshold", "phi", "P_starv", "threshold_met"});
  Output out;
  for (const auto& c : expand(cfg)) {
    const auto choice = select_offset(c.file_size, c.startup, c.rho, c.risk_threshold, opts);
    if (!choice.warning.empty()) {
      out.notes.push_back("N=" + fmt(c.file_size) + " rho=" + fmt(c.rho) + ": " + choice.warning);
    }
    t.add_row({fmt(c.file_size), fmt(c.startup), fmt(c.rho), fmt(c.risk_threshold), fmt(choice.phi),
               fmt(choice.starvation_prob), choice.threshold_met ? "true" : "false"});
  }
  out.table = std::move(t);
  return out;
}

std::string render(const RunConfig& cfg, const Output& o) {
  const Json config = cfg.to_json();
  if (cfg.format == "csv") {
    std::string s = std::string("# ") + kToolkitName + " " + kToolkitVersion + "\n";
    s += "# config: " + config.dump() + "\n";
    for (const auto& n : o.notes) s += "# note: " + n + "\n";
    return s + o.table->str();
  }
  Json doc = Json::object();
  doc["toolkit"] = kToolkitName;
  doc["version"] = kToolkitVersion;
  doc["config"] = config;
  doc["notes"] = o.notes;
  doc["data"] = o.data.is_null() ? o.table->to_json() : o.data;
  return doc.dump(2) + "\n";
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

// Flag values; unset ones leave the file/default value alone.
struct Overrides {
  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::optional<std::string> format, phi_bound, event_model, arrivals, quality_mode, weight_mode, ladder;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs, file_size, startup, offset, max_count, fallback_runs;
  std::optional<double> rho, mu, throughput, threshold, low_kbps, high_kbps, frame_rate, g1, g2, g3,
      svc_overhead;
  std::vector<std::string> sweeps;
  bool float_mode = false;
  bool with_baseline = false;
};

template <class T>
void apply(const std::optional<T>& v, T& dst) {
  if (v) dst = *v;
}

std::vector<Rung> parse_ladder(const std::string& text) {
  std::vector<Rung> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("ladder", "expected LABEL:KBPS, got '" + item + "'");
    out.push_back({item.substr(0, colon), parse_double(item.substr(colon + 1), "ladder"), std::nan("")});
  }
  return out;
}

RunConfig resolve(const std::string& command, const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig::from_json(Json::object(), command)
                                        : RunConfig::from_json(read_json_file(o.config_path), command);
  apply(o.format, cfg.format);
  apply(o.phi_bound, cfg.phi_bound);
  apply(o.event_model, cfg.event_model);
  apply(o.arrivals, cfg.arrivals.kind);
  apply(o.quality_mode, cfg.quality_mode);
  apply(o.weight_mode, cfg.weight_mode);
  apply(o.seed, cfg.seed);
  apply(o.runs, cfg.runs);
  apply(o.file_size, cfg.file_size);
  apply(o.startup, cfg.startup);
  apply(o.offset, cfg.offset);
  apply(o.max_count, cfg.max_count);
  apply(o.fallback_runs, cfg.fallback_runs);
  apply(o.rho, cfg.rho);
  apply(o.mu, cfg.mu);
  apply(o.throughput, cfg.throughput_kbps);
  apply(o.threshold, cfg.risk_threshold);
  apply(o.low_kbps, cfg.low_kbps);
  apply(o.high_kbps, cfg.high_kbps);
  apply(o.frame_rate, cfg.frame_rate);
  apply(o.svc_overhead, cfg.svc_overhead);
  apply(o.g1, cfg.weights.gamma1);
  apply(o.g2, cfg.weights.gamma2);
  apply(o.g3, cfg.weights.gamma3);
  if (o.ladder) cfg.ladder = parse_ladder(*o.ladder);
  if (!o.sweeps.empty()) {
    cfg.sweeps.clear();
    for (const auto& s : o.sweeps) cfg.sweeps.push_back(SweepSpec::parse(s));
  }
  if (o.float_mode) cfg.exact = false;
  if (o.with_baseline) cfg.with_baseline = true;
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format", "must be csv or json");
  // Validate enum-like strings early so every command reports them the same way.
  parse_event_model(cfg.event_model);
  parse_offset_bound(cfg.phi_bound);
  const auto& keys = keys_for(command);
  for (const auto& s : cfg.sweeps) {
    if (std::find(keys.begin(), keys.end(), s.field) == keys.end()) {
      std::string usable;
      for (const char* f : {"rho", "mu", "file_size_N", "startup_x", "offset_phi", "throughput_kbps",
                            "risk_threshold"}) {
        if (std::find(keys.begin(), keys.end(), f) == keys.end()) continue;
        usable += usable.empty() ? f : std::string(", ") + f;
      }
      throw ConfigError("sweep", "field '" + s.field + "' is not used by " + command + " (sweepable: " +
                                     usable + ")");
    }
  }
  // Re-read through JSON so flag values get the same checks as file values.
  return RunConfig::from_json(cfg.to_json(), command);
}

void add_flags(CLI::App* sub, Overrides& o, const std::string& command) {
  sub->add_option("--config", o.config_path, "JSON config file; flags override it");
  sub->add_option("--out", o.out_path, "Output path (default stdout)");
  sub->add_option("--format", o.format, "csv or json");
  const auto& keys = keys_for(command);
  const auto has = [&](const char* k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  if (has("rho")) sub->add_option("--rho", o.rho, "Traffic intensity lambda/mu");
  if (has("mu")) sub->add_option("--mu", o.mu, "Service rate");
  if (has("file_size_N")) sub->add_option("-N,--file-size", o.file_size, "Frames in the file");
  if (has("startup_x")) sub->add_option("-x,--startup", o.startup, "Prefetch threshold x");
  if (has("offset_phi")) sub->add_option("--phi,--offset", o.offset, "BSC offset phi");
  if (has("sweep")) sub->add_option("--sweep", o.sweeps, "FIELD=START:STOP:STEP (repeatable)");
  if (has("event_model")) sub->add_option("--event-model", o.event_model, "conditioned or product");
  if (has("phi_bound")) sub->add_option("--phi-bound", o.phi_bound, "display or proof");
  if (has("max_count")) sub->add_option("--max-count", o.max_count, "Largest starvation count J");
  if (has("seed")) sub->add_option("--seed", o.seed, "Base seed");
  if (has("runs")) sub->add_option("--runs", o.runs, "Replications per point");
  if (has("arrivals")) sub->add_option("--arrivals", o.arrivals, "poisson, logistic or on_off");
  if (has("with_baseline")) sub->add_flag("--with-baseline", o.with_baseline, "Also simulate without BSC");
  if (command == "simulate") sub->add_option("--trace", o.trace_path, "Write the event trace of run 0 as CSV");
  if (has("low_kbps")) sub->add_option("--low-kbps", o.low_kbps, "Base-layer bitrate");
  if (has("high_kbps")) sub->add_option("--high-kbps", o.high_kbps, "Optimal bitrate");
  if (has("throughput_kbps")) sub->add_option("--throughput", o.throughput, "Network throughput, Kbps");
  if (has("ladder")) sub->add_option("--ladder", o.ladder, "LABEL:KBPS,... (empty string for none)");
  if (has("weight_mode")) sub->add_option("--weight-mode", o.weight_mode, "bitrate or proportional");
  if (has("frame_rate")) sub->add_option("--frame-rate", o.frame_rate, "Frames per second");
  if (has("quality_mode")) sub->add_option("--quality-mode", o.quality_mode, "fraction or absolute");
  if (has("svc_overhead")) sub->add_option("--svc-overhead", o.svc_overhead, "Multiplier on BSC pair bitrate");
  if (has("fallback_runs")) sub->add_option("--fallback-runs", o.fallback_runs, "Runs for simulated quality");
  if (has("weights")) {
    sub->add_option("--gamma1", o.g1, "Weight of the initial delay");
    sub->add_option("--gamma2", o.g2, "Weight of expected starvations");
    sub->add_option("--gamma3", o.g3, "Weight of the quality term");
  }
  if (has("risk_threshold")) sub->add_option("--threshold", o.threshold, "Acceptable starvation probability");
  if (has("exact")) sub->add_flag("--float", o.float_mode, "Double precision instead of rationals");
}

}  // namespace

SweepSpec SweepSpec::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep", "expected FIELD=START:STOP:STEP");
  static const std::map<std::string, std::string> kAliases = {
      {"N", "file_size_N"}, {"x", "startup_x"}, {"phi", "offset_phi"},
      {"throughput", "throughput_kbps"}, {"threshold", "risk_threshold"}};
  SweepSpec s;
  s.field = text.substr(0, eq);
  if (const auto it = kAliases.find(s.field); it != kAliases.end()) s.field = it->second;
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : rest.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ConfigError("sweep", "expected FIELD=START:STOP:STEP");
  s.start = parse_double(rest.substr(0, c1), "sweep");
  s.stop = parse_double(rest.substr(c1 + 1, c2 - c1 - 1), "sweep");
  s.step = parse_double(rest.substr(c2 + 1), "sweep");
  if (!(s.step > 0.0)) throw ConfigError("sweep", "step must be > 0");
  if (s.stop < s.start) throw ConfigError("sweep", "stop must be >= start");
  if ((s.stop - s.start) / s.step > 1e6) throw ConfigError("sweep", "too many points");
  return s;
}

std::string SweepSpec::str() const {
  return field + "=" + format_number(start) + ":" + format_number(stop) + ":" + format_number(step);
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  const double slack = 1e-9 * step;
  for (long i = 0;; ++i) {
    const double x = start + static_cast<double>(i) * step;
    if (x > stop + slack) break;
    v.push_back(round12(x));
  }
  return v;
}

ArrivalProcess ArrivalConfig::build(double rate) const {
  if (kind == "poisson") return ArrivalProcess::poisson(rate);
  if (kind == "logistic") {
    if (location == 0.0 && scale == 0.0) return ArrivalProcess::logistic_for_rate(rate);
    return ArrivalProcess::logistic(location, scale);
  }
  if (kind == "on_off") {
    if (on_rate == 0.0 && on_mean == 0.0 && off_mean == 0.0) return ArrivalProcess::on_off_for_rate(rate);
    return ArrivalProcess::on_off(on_rate, on_mean, off_mean);
  }
  throw ConfigError("arrivals", "kind must be poisson, logistic or on_off");
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& key : keys_for(command)) {
    if (key == "command") j[key] = command;
    else if (key == "format") j[key] = format;
    else if (key == "rho") j[key] = json_number(rho);
    else if (key == "mu") j[key] = json_number(mu);
    else if (key == "file_size_N") j[key] = file_size;
    else if (key == "startup_x") j[key] = startup;
    else if (key == "offset_phi") j[key] = offset;
    else if (key == "sweep") {
      Json arr = Json::array();
      for (const auto& s : sweeps) arr.push_back(s.str());
      j[key] = arr;
    } else if (key == "event_model") j[key] = event_model;
    else if (key == "phi_bound") j[key] = phi_bound;
    else if (key == "max_count") j[key] = max_count;
    else if (key == "truncation_tolerance") j[key] = json_number(truncation_tolerance);
    else if (key == "seed") j[key] = seed;
    else if (key == "runs") j[key] = runs;
    else if (key == "arrivals") {
      Json a{{"kind", arrivals.kind}};
      if (arrivals.kind == "logistic") {
        a["location"] = json_number(arrivals.location);
        a["scale"] = json_number(arrivals.scale);
      } else if (arrivals.kind == "on_off") {
        a["on_rate"] = json_number(arrivals.on_rate);
        a["on_mean"] = json_number(arrivals.on_mean);
        a["off_mean"] = json_number(arrivals.off_mean);
      }
      j[key] = a;
    } else if (key == "with_baseline") j[key] = with_baseline;
    else if (key == "low_kbps") j[key] = json_number(low_kbps);
    else if (key == "high_kbps") j[key] = json_number(high_kbps);
    else if (key == "throughput_kbps") j[key] = json_number(throughput_kbps);
    else if (key == "weights") {
      j[key] = Json{{"gamma1", json_number(weights.gamma1)},
                    {"gamma2", json_number(weights.gamma2)},
                    {"gamma3", json_number(weights.gamma3)}};
    } else if (key == "ladder") {
      double top = 0.0;
      for (const auto& r : ladder) top = std::max(top, r.kbps);
      Json arr = Json::array();
      for (const auto& r : ladder) {
        arr.push_back(Json{{"label", r.label},
                           {"kbps", json_number(r.kbps)},
                           {"weight", json_number(rung_weight(r, top, weight_mode))}});
      }
      j[key] = arr;
    } else if (key == "weight_mode") j[key] = weight_mode;
    else if (key == "frame_rate") j[key] = json_number(frame_rate);
    else if (key == "quality_mode") j[key] = quality_mode;
    else if (key == "svc_overhead") j[key] = json_number(svc_overhead);
    else if (key == "fallback_runs") j[key] = fallback_runs;
    else if (key == "risk_threshold") j[key] = json_number(risk_threshold);
    else if (key == "exact") j[key] = exact;
  }
  return j;
}

RunConfig RunConfig::from_json(const Json& j, const std::string& command) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  const auto& keys = keys_for(command);
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError(k, "is not a setting of the " + command + " command");
    }
  }
  RunConfig c;
  c.command = command;
  c.ladder = default_ladder();
  if (j.contains("command") && get<std::string>(j, "command") != command) {
    throw ConfigError("command", "config was written for '" + get<std::string>(j, "command") + "'");
  }
  if (j.contains("format")) c.format = get<std::string>(j, "format");
  if (j.contains("rho")) c.rho = get<double>(j, "rho");
  if (j.contains("mu")) c.mu = get<double>(j, "mu");
  if (j.contains("file_size_N")) c.file_size = get_int(j, "file_size_N");
  if (j.contains("startup_x")) c.startup = get_int(j, "startup_x");
  if (j.contains("offset_phi")) c.offset = get_int(j, "offset_phi");
  if (j.contains("sweep")) {
    for (const auto& s : get<std::vector<std::string>>(j, "sweep")) c.sweeps.push_back(SweepSpec::parse(s));
  }
  if (j.contains("event_model")) c.event_model = get<std::string>(j, "event_model");
  if (j.contains("phi_bound")) c.phi_bound = get<std::string>(j, "phi_bound");
  if (j.contains("max_count")) c.max_count = get_int(j, "max_count");
  if (j.contains("truncation_tolerance")) c.truncation_tolerance = get<double>(j, "truncation_tolerance");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("runs")) c.runs = get_int(j, "runs");
  if (j.contains("arrivals")) {
    const Json& a = j.at("arrivals");
    if (!a.is_object()) throw ConfigError("arrivals", "must be an object");
    for (const auto& [k, v] : a.items()) {
      (void)v;
      static const std::set<std::string> ok = {"kind", "location", "scale", "on_rate", "on_mean", "off_mean"};
      if (!ok.count(k)) throw ConfigError("arrivals." + k, "unknown arrival setting");
    }
    if (a.contains("kind")) c.arrivals.kind = get<std::string>(a, "kind");
    if (a.contains("location")) c.arrivals.location = get<double>(a, "location");
    if (a.contains("scale")) c.arrivals.scale = get<double>(a, "scale");
    if (a.contains("on_rate")) c.arrivals.on_rate = get<double>(a, "on_rate");
    if (a.contains("on_mean")) c.arrivals.on_mean = get<double>(a, "on_mean");
    if (a.contains("off_mean")) c.arrivals.off_mean = get<double>(a, "off_mean");
  }
  if (j.contains("with_baseline")) c.with_baseline = get<bool>(j, "with_baseline");
  if (j.contains("low_kbps")) c.low_kbps = get<double>(j, "low_kbps");
  if (j.contains("high_kbps")) c.high_kbps = get<double>(j, "high_kbps");
  if (j.contains("throughput_kbps")) c.throughput_kbps = get<double>(j, "throughput_kbps");
  if (j.contains("weights")) {
    const Json& w = j.at("weights");
    if (!w.is_object()) throw ConfigError("weights", "must be an object");
    if (w.contains("gamma1")) c.weights.gamma1 = get<double>(w, "gamma1");
    if (w.contains("gamma2")) c.weights.gamma2 = get<double>(w, "gamma2");
    if (w.contains("gamma3")) c.weights.gamma3 = get<double>(w, "gamma3");
  }
  if (j.contains("ladder")) {
    const Json& l = j.at("ladder");
    if (!l.is_array()) throw ConfigError("ladder", "must be an array");
    c.ladder.clear();
    for (const auto& r : l) {
      if (!r.is_object() || !r.contains("label") || !r.contains("kbps")) {
        throw ConfigError("ladder", "each level needs label and kbps");
      }
      c.ladder.push_back({get<std::string>(r, "label"), get<double>(r, "kbps"),
                          r.contains("weight") ? get<double>(r, "weight") : std::nan("")});
    }
  }
  if (j.contains("weight_mode")) c.weight_mode = get<std::string>(j, "weight_mode");
  if (j.contains("frame_rate")) c.frame_rate = get<double>(j, "frame_rate");
  if (j.contains("quality_mode")) c.quality_mode = get<std::string>(j, "quality_mode");
  if (j.contains("svc_overhead")) c.svc_overhead = get<double>(j, "svc_overhead");
  if (j.contains("fallback_runs")) c.fallback_runs = get_int(j, "fallback_runs");
  if (j.contains("risk_threshold")) c.risk_threshold = get<double>(j, "risk_threshold");
  if (j.contains("exact")) c.exact = get<bool>(j, "exact");
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Backward-shifted coding streaming toolkit", "bsc"};
  app.set_version_flag("--version", std::string(kToolkitName) + " " + kToolkitVersion);
  app.require_subcommand(1);
  Overrides o;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"analyze", "Starvation probability and count distribution"},
      {"quality", "Time in each quality level and busy-period moments"},
      {"simulate", "Monte Carlo replication with analytic comparison"},
      {"compare", "Rank DASH rungs and BSC pairs by QoE cost"},
      {"oracle", "Exact small-file starvation distribution"},
      {"offset", "Largest offset meeting a starvation risk threshold"}};
  for (const auto& c : kCommands) {
    subs[c] = app.add_subcommand(c, help.at(c));
    add_flags(subs[c], o, c);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  try {
    const RunConfig cfg = resolve(command, o);
    Output res;
    if (command == "analyze") res = cmd_analyze(cfg);
    else if (command == "quality") res = cmd_quality(cfg);
    else if (command == "simulate") res = cmd_simulate(cfg, o.trace_path);
    else if (command == "compare") res = cmd_compare(cfg);
    else if (command == "oracle") res = cmd_oracle(cfg);
    else res = cmd_offset(cfg);
    const std::string text = render(cfg, res);
    if (o.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(o.out_path, std::ios::binary);
      if (!f) throw ConfigError("out", "cannot write " + o.out_path);
      f << text;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << "\n";
    return kRegime;
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace bsc::cli
