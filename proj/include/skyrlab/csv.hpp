#pragma once

#include <string>
#include <vector>

namespace skyrlab {

// Rectangular table of formatted cells. Rows are appended already formatted;
// numeric cells should go through format_double so output bytes do not
// depend on locale or printf quirks.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Table() = default;
  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  // Appends one row; throws ArgumentError when the cell count does not
  // match the header.
  void add_row(std::vector<std::string> cells);

  bool empty() const { return rows.empty(); }
};

// Serializes the table as CSV: header row first, '\n' line endings, no
// quoting (cells never contain commas by construction).
std::string to_csv(const Table& t);

// Writes to_csv(t) to path, creating parent directories. Throws IoError on
// any filesystem failure and ArgumentError for a header-less table.
void write_csv(const Table& t, const std::string& path);

// Writes an arbitrary text body to path (used for SVG and manifest files).
void write_text_file(const std::string& path, const std::string& body);

}  // namespace skyrlab
