#include "regx/text_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "regx/errors.hpp"

namespace regx::io {

std::string format_real(double v) {
  if (!std::isfinite(v)) {
    throw ValidationError("cannot serialize non-finite real");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quote(std::string_view s) { return Json(std::string(s)).dump(); }

void append_reals(std::string& out, std::span<const double> v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_real(v[i]);
  }
  out += ']';
}

void append_matrix(std::string& out, const Matrix& m) {
  out += "{\"rows\":" + std::to_string(m.rows()) +
         ",\"cols\":" + std::to_string(m.cols()) + ",\"data\":[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i || j) out += ',';
      out += format_real(m(i, j));
    }
  }
  out += "]}";
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ParseError("matrix record has inconsistent shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = data[k++].get<double>();
    }
  }
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw IoError("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Json> read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<Json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " +
                       e.what());
    }
  }
  return out;
}

}  // namespace regx::io
