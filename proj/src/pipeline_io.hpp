#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace memoed::io {

using Cell = std::variant<std::monostate, std::string, std::int64_t, std::uint64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void log(const std::string& message);

// Writes through a temporary file so a failed run never leaves a truncated output.
void write_text(const std::filesystem::path& path, const std::string& text);

// CSV at dir/name.csv; with `json`, also dir/name.json.
std::vector<std::filesystem::path> write_table(const std::filesystem::path& dir, const std::string& name,
                                               const Table& table, bool json);

std::string dump_json(const nlohmann::json& doc);
// Rounded to six significant digits; non-finite values become null.
nlohmann::json json_real(double value);

struct CsvFile {
  std::filesystem::path path;
  std::vector<std::vector<std::string>> rows;
};

// Reads an upstream CSV and checks its header. A missing file names the
// stage that produces it.
CsvFile read_upstream_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                          const std::string& producing_stage);

}  // namespace memoed::io
