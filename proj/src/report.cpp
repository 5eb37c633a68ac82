#include "bsc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace bsc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_number(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  cells.resize(header_.size());
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

Json CsvTable::to_json() const {
  Json arr = Json::array();
  for (const auto& r : rows_) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < header_.size(); ++i) {
      const std::string& cell = r[i];
      const char* end = cell.data() + cell.size();
      long long whole = 0;
      const auto ires = std::from_chars(cell.data(), end, whole);
      double num = 0.0;
      const auto res = std::from_chars(cell.data(), end, num);
      if (cell == "nan" || cell == "inf" || cell == "-inf") {
        obj[header_[i]] = nullptr;
      } else if (!cell.empty() && ires.ec == std::errc() && ires.ptr == end) {
        obj[header_[i]] = whole;
      } else if (!cell.empty() && res.ec == std::errc() && res.ptr == end) {
        obj[header_[i]] = num;
      } else {
        obj[header_[i]] = cell;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::string trace_to_csv(const SessionTrace& trace) {
  CsvTable t({"time", "type", "buffer_level", "state_n"});
  for (const auto& e : trace.events) {
    t.add_row({format_number(e.time), to_string(e.type), std::to_string(e.buffer_level),
               std::to_string(e.state_n)});
  }
  return t.str();
}

Json estimate_to_json(const Estimate& e) {
  return Json{{"value", json_number(e.value)}, {"std_error", json_number(e.std_error)}};
}

Json stats_to_json(const EmpiricalStats& s) {
  Json pmf = Json::array();
  for (const auto& e : s.count_pmf) pmf.push_back(estimate_to_json(e));
  return Json{{"runs", s.runs},
              {"arrivals", s.arrivals},
              {"starvation_prob", estimate_to_json(s.starvation_prob)},
              {"count_pmf", pmf},
              {"mean_starvations", estimate_to_json(s.mean_starvations)},
              {"optimal_fraction", estimate_to_json(s.optimal_fraction)},
              {"mean_rebuffer_time", estimate_to_json(s.mean_rebuffer_time)},
              {"mean_initial_delay", estimate_to_json(s.mean_initial_delay)}};
}

}  // namespace bsc
