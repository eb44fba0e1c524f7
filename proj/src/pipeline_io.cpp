#include "pipeline_io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "csv.hpp"
#include "memoed/error.hpp"
#include "memoed/pipeline.hpp"

namespace memoed {

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace io {

void log(const std::string& message) { std::cerr << "memoed: " << message << '\n'; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) fail(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return csv::quote(s); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return std::isfinite(v) ? format_real(v) : std::string(); }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::json cell_json(const Cell& cell) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(const std::string& s) const { return s; }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(std::uint64_t v) const { return v; }
    nlohmann::json operator()(double v) const { return json_real(v); }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

nlohmann::json json_real(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::stod(format_real(value));
}

std::vector<std::filesystem::path> write_table(const std::filesystem::path& dir, const std::string& name,
                                               const Table& table, bool json) {
  std::vector<std::filesystem::path> written;
  std::ostringstream csv_out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) csv_out << (i ? "," : "") << table.columns[i];
  csv_out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv_out << (i ? "," : "") << cell_text(row[i]);
    csv_out << '\n';
  }
  const auto csv_path = dir / (name + ".csv");
  write_text(csv_path, csv_out.str());
  written.push_back(csv_path);

  if (json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    nlohmann::json doc = {{"schema_version", 1}, {"columns", table.columns}, {"rows", std::move(rows)}};
    const auto json_path = dir / (name + ".json");
    write_text(json_path, dump_json(doc));
    written.push_back(json_path);
  }
  return written;
}

CsvFile read_upstream_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                          const std::string& producing_stage) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorCode::kNotFound, path.string() + " not found; run `memoed " + producing_stage + "` first");
  }
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  CsvFile file{path, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    auto fields = csv::split_row(line, where);
    if (line_no == 1) {
      if (fields != columns) fail(ErrorCode::kFormat, where + "unexpected header");
      continue;
    }
    if (line.empty()) continue;
    if (fields.size() != columns.size()) {
      fail(ErrorCode::kFormat, where + "expected " + std::to_string(columns.size()) + " columns, got " +
                                   std::to_string(fields.size()));
    }
    file.rows.push_back(std::move(fields));
  }
  if (line_no == 0) fail(ErrorCode::kFormat, path.string() + ": empty file, expected a header");
  return file;
}

}  // namespace io
}  // namespace memoed
