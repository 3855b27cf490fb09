#include "skyrlab/csv.hpp"

#include <cstdio>
#include <filesystem>

#include "skyrlab/error.hpp"

namespace skyrlab {

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) {
    throw Error(ErrorKind::ArgumentError,
                "row has " + std::to_string(cells.size()) + " cells, table has " +
                    std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(cells));
}

std::string to_csv(const Table& t) {
  if (t.columns.empty()) {
    throw Error(ErrorKind::ArgumentError, "table has no columns");
  }
  std::string out;
  out.reserve(32 * (t.rows.size() + 1));
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      throw Error(ErrorKind::IoError,
                  "cannot create directory " + p.parent_path().string() + ": " +
                      ec.message());
    }
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  const std::size_t n = std::fwrite(body.data(), 1, body.size(), f);
  const bool bad = (n != body.size()) | (std::fclose(f) != 0);
  if (bad) throw Error(ErrorKind::IoError, "short write to " + path);
}

void write_csv(const Table& t, const std::string& path) {
  write_text_file(path, to_csv(t));
}

}  // namespace skyrlab
