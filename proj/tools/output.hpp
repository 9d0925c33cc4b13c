#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace rabi::cli {

/// Empty cell, number, integer or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

enum class Format { Csv, Json };

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

std::string to_csv(const Table& t);
/// Array of row objects; empty cells and non-finite numbers become null.
nlohmann::json to_json(const Table& t);
std::string render(const Table& t, Format f);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Writes `content` to `path` (atomically) plus its metadata sidecar, or to
/// `out` when `path` is empty.
void emit(const std::string& path, const std::string& content, const nlohmann::json& meta, std::ostream& out);

}  // namespace rabi::cli
