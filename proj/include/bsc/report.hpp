#pragma once

// Locale-free number formatting and the CSV/JSON shapes shared by the CLI.

#include <string>
#include <vector>

#include <json.hpp>

#include "bsc/des_simulator.hpp"

namespace bsc {

inline constexpr const char* kToolkitName = "bsc-toolkit";
inline constexpr const char* kToolkitVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// 12 significant digits, '.' separator; "nan", "inf", "-inf" for non-finite.
std::string format_number(double v);
// v rounded to 12 significant digits, for JSON output.
double round12(double v);
// Json number rounded to 12 significant digits, or null when not finite.
Json json_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const;
  // Rows as JSON objects keyed by the header, numbers kept as numbers.
  Json to_json() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string trace_to_csv(const SessionTrace& trace);
Json estimate_to_json(const Estimate& e);
Json stats_to_json(const EmpiricalStats& stats);

}  // namespace bsc
