#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "regx/graph.hpp"

namespace regx::io {

using Json = nlohmann::json;

/// Shortest-free fixed format: 17 significant digits, round-trips exactly.
std::string format_real(double v);

/// JSON string literal with escaping.
std::string quote(std::string_view s);

void append_reals(std::string& out, std::span<const double> v);

/// {"rows":r,"cols":c,"data":[row-major]}
void append_matrix(std::string& out, const Matrix& m);

Matrix matrix_from_json(const Json& j);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary file and renames, so readers never observe a
/// partially written artifact.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Reads a line-delimited JSON file; ParseError names the 1-based line.
std::vector<Json> read_json_lines(const std::filesystem::path& path);

}  // namespace regx::io
