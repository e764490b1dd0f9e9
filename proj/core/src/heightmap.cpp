#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "terradeploy/terrain.hpp"

namespace terradeploy {

HeightmapError::HeightmapError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) +
                         (column ? ", column " + std::to_string(column) : std::string()) + ": " +
                         what),
      line_(line),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view tok) {
  tok = trim(tok);
  if (tok.empty()) return std::nullopt;
  if (tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return r;
}

HeightGrid parse_esri(std::istream& in) {
  std::optional<double> ncols, nrows, xll, yll, cellsize, nodata;
  bool center_registered = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tokens;

  // Header: "key value" lines until the first line starting with a number.
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    tokens = split_ws(line);
    if (parse_number(tokens.front())) break;
    if (tokens.size() != 2) throw HeightmapError("malformed header line", line_no, 0);
    const std::string key = lower(tokens[0]);
    const auto value = parse_number(tokens[1]);
    if (!value) throw HeightmapError("non-numeric header value for '" + key + "'", line_no, 2);
    if (key == "ncols") ncols = value;
    else if (key == "nrows") nrows = value;
    else if (key == "xllcorner") xll = value;
    else if (key == "yllcorner") yll = value;
    else if (key == "xllcenter") { xll = value; center_registered = true; }
    else if (key == "yllcenter") { yll = value; center_registered = true; }
    else if (key == "cellsize") cellsize = value;
    else if (key == "nodata_value") nodata = value;
    else throw HeightmapError("unknown header key '" + std::string(tokens[0]) + "'", line_no, 1);
    tokens.clear();
  }

  const auto require = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw HeightmapError(std::string("missing header key '") + name + "'", line_no, 0);
    return *v;
  };
  const double nc = require(ncols, "ncols");
  const double nr = require(nrows, "nrows");
  HeightGrid g;
  g.cell_size = require(cellsize, "cellsize");
  g.origin_x = require(xll, "xllcorner");
  g.origin_y = require(yll, "yllcorner");
  if (nc < 1 || nr < 1 || nc != std::floor(nc) || nr != std::floor(nr))
    throw HeightmapError("empty grid or non-integer dimensions", line_no, 0);
  if (!(g.cell_size > 0.0)) throw HeightmapError("cellsize must be positive", line_no, 0);
  if (center_registered) {
    g.origin_x -= 0.5 * g.cell_size;
    g.origin_y -= 0.5 * g.cell_size;
  }
  g.n_cols = static_cast<std::size_t>(nc);
  g.n_rows = static_cast<std::size_t>(nr);
  g.values.reserve(g.n_rows * g.n_cols);

  std::size_t rows_read = 0;
  auto consume_row = [&](const std::vector<std::string_view>& toks) {
    if (rows_read == g.n_rows)
      throw HeightmapError("more data rows than nrows=" + std::to_string(g.n_rows), line_no, 0);
    if (toks.size() != g.n_cols)
      throw HeightmapError("ragged row: expected " + std::to_string(g.n_cols) + " values, got " +
                               std::to_string(toks.size()),
                           line_no, 0);
    for (std::size_t c = 0; c < toks.size(); ++c) {
      const auto v = parse_number(toks[c]);
      if (!v)
        throw HeightmapError("non-numeric cell '" + std::string(toks[c]) + "'", line_no, c + 1);
      if (nodata && *v == *nodata) throw HeightmapError("NODATA cell", line_no, c + 1);
      g.values.push_back(*v);
    }
    ++rows_read;
  };

  if (!tokens.empty()) consume_row(tokens);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    consume_row(split_ws(line));
  }
  if (rows_read != g.n_rows)
    throw HeightmapError("expected " + std::to_string(g.n_rows) + " data rows, got " +
                             std::to_string(rows_read),
                         line_no, 0);
  return g;
}

HeightGrid parse_csv(std::istream& in, const CsvGridOptions& opt) {
  HeightGrid g;
  g.origin_x = opt.origin_x;
  g.origin_y = opt.origin_y;
  g.cell_size = opt.cell_size;
  if (!(g.cell_size > 0.0)) throw HeightmapError("cell size must be positive", 0, 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto toks = split_csv(line);
    if (g.n_rows == 0) g.n_cols = toks.size();
    else if (toks.size() != g.n_cols)
      throw HeightmapError("ragged row: expected " + std::to_string(g.n_cols) + " values, got " +
                               std::to_string(toks.size()),
                           line_no, 0);
    for (std::size_t c = 0; c < toks.size(); ++c) {
      const auto v = parse_number(toks[c]);
      if (!v)
        throw HeightmapError("non-numeric cell '" + std::string(toks[c]) + "'", line_no, c + 1);
      g.values.push_back(*v);
    }
    ++g.n_rows;
  }
  if (g.n_rows == 0) throw HeightmapError("empty grid", line_no, 0);
  return g;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

HeightGrid load_heightmap(std::istream& in, HeightmapFormat format, const CsvGridOptions& csv) {
  HeightGrid g = format == HeightmapFormat::esri_ascii ? parse_esri(in) : parse_csv(in, csv);
  g.validate();
  return g;
}

HeightGrid load_heightmap_file(const std::string& path, const CsvGridOptions& csv) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open heightmap '" + path + "'");
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  const auto fmt = (ext == "csv") ? HeightmapFormat::csv : HeightmapFormat::esri_ascii;
  return load_heightmap(in, fmt, csv);
}

void write_esri_ascii(const HeightGrid& grid, std::ostream& out) {
  grid.validate();
  out << "ncols " << grid.n_cols << '\n'
      << "nrows " << grid.n_rows << '\n'
      << "xllcorner " << format_double(grid.origin_x) << '\n'
      << "yllcorner " << format_double(grid.origin_y) << '\n'
      << "cellsize " << format_double(grid.cell_size) << '\n';
  for (std::size_t r = 0; r < grid.n_rows; ++r) {
    for (std::size_t c = 0; c < grid.n_cols; ++c) {
      if (c) out << ' ';
      out << format_double(grid.at(r, c));
    }
    out << '\n';
  }
}

}  // namespace terradeploy
