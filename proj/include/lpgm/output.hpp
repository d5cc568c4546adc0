#pragma once

// Flat tables with a metadata header, written as CSV ('#'-prefixed metadata
// lines, then a header row) or as JSON ({"meta": {...}, "rows": [...]}).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lpgm::output {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  /// Emitted in order; keys may be dotted (e.g. "config.p", "result.ks_distance").
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table);

}  // namespace lpgm::output
