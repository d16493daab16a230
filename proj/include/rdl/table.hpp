#pragma once

// Tabular artifacts. CSV output opens with '#' comment lines carrying the
// schema version and the full run config; JSON output wraps the same data.
// Doubles are printed with 17 significant digits, so values round-trip.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdl/errors.hpp"

namespace rdl {

inline constexpr const char* kSchemaVersion = "v1";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<nlohmann::json> cells) {
    require_same_length(cells.size(), columns_.size(), "Table::add_row");
    rows_.push_back(std::move(cells));
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<nlohmann::json>>& rows() const noexcept { return rows_; }

  void write_csv(std::ostream& os, const nlohmann::json& config) const {
    os << "# schema: " << kSchemaVersion << '\n';
    os << "# config: " << config.dump() << '\n';
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
      os << '\n';
    }
  }

  /// {"schema", "config", "columns", "rows"}; non-finite doubles become strings.
  nlohmann::json to_json(const nlohmann::json& config) const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rows_) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& cell : row) {
        if (cell.is_number_float() && !std::isfinite(cell.get<double>()))
          r.push_back(format_double(cell.get<double>()));
        else
          r.push_back(cell);
      }
      rows.push_back(std::move(r));
    }
    return {{"schema", kSchemaVersion}, {"config", config}, {"columns", columns_}, {"rows", std::move(rows)}};
  }

 private:
  static std::string cell_text(const nlohmann::json& cell) {
    if (cell.is_number_float()) return format_double(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "1" : "0";
    return cell.dump();
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::json>> rows_;
};

}  // namespace rdl
