#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bandlab/deloc.hpp"
#include "bandlab/lindeberg.hpp"
#include "bandlab/locallaw.hpp"

namespace bandlab {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256Hex(std::string_view data);

// Shortest round-trip representation, '.' decimal separator.
std::string formatNumber(double x);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// "# bandlab v<version> config=<sha256 of the canonical config dump>"
std::string metadataLine(const nlohmann::json& resolvedConfig);
void writeCsv(std::ostream& out, const nlohmann::json& resolvedConfig, const CsvTable& table);
std::string toCsvString(const nlohmann::json& resolvedConfig, const CsvTable& table);

CsvTable localLawTable(const LocalLawReport& r);
CsvTable localLawSummaryTable(const LocalLawReport& r);
CsvTable delocTable(const DelocReport& r);
CsvTable decayTable(const DecayReport& r);
CsvTable compareTable(const CompareReport& r);

}  // namespace bandlab
