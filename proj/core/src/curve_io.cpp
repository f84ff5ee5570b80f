#include "thermolab/convex.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

namespace thermolab {

namespace {

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (trim(field.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("curve csv line " + std::to_string(line) + ": cannot parse '" + field + "'");
}

// Recognizes a row-major product grid among scattered points.
std::optional<std::vector<std::vector<double>>> detect_product_grid(std::size_t m, const std::vector<double>& coords,
                                                                    std::size_t n) {
  std::vector<std::vector<double>> axes(m);
  std::size_t count = 1;
  for (std::size_t k = 0; k < m; ++k) {
    std::set<double> unique;
    for (std::size_t i = 0; i < n; ++i) unique.insert(coords[i * m + k]);
    axes[k].assign(unique.begin(), unique.end());
    count *= axes[k].size();
  }
  if (count != n) return std::nullopt;
  std::vector<std::size_t> multi(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k)
      if (coords[i * m + k] != axes[k][multi[k]]) return std::nullopt;
    for (std::size_t k = m; k-- > 0;) {
      if (++multi[k] < axes[k].size()) break;
      multi[k] = 0;
    }
  }
  return axes;
}

}  // namespace

void write_csv(std::ostream& out, const CurveSamples& f, std::span<const std::string> extra_header) {
  out << "# orientation=" << to_string(f.orientation()) << '\n';
  for (const auto& line : extra_header) out << "# " << line << '\n';
  for (std::size_t k = 0; k < f.dimension(); ++k) out << "q_" << k << ',';
  out << "value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < f.dimension(); ++k) out << full_precision(f.coordinate(i, k)) << ',';
    out << full_precision(f.value(i)) << '\n';
  }
}

CurveSamples read_csv(std::istream& in) {
  std::optional<Orientation> orientation;
  std::optional<std::size_t> dimension;
  std::vector<double> coords, values;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      constexpr std::string_view key = "orientation=";
      if (body.rfind(key, 0) == 0) orientation = parse_orientation(trim(body.substr(key.size())));
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!dimension) {
      if (fields.back() != "value" || fields.size() < 2)
        throw DataError("curve csv line " + std::to_string(line_no) + ": expected header q_0,...,value");
      for (std::size_t k = 0; k + 1 < fields.size(); ++k)
        if (fields[k] != "q_" + std::to_string(k))
          throw DataError("curve csv line " + std::to_string(line_no) + ": unexpected column '" + fields[k] + "'");
      dimension = fields.size() - 1;
      continue;
    }
    if (fields.size() != *dimension + 1)
      throw DataError("curve csv line " + std::to_string(line_no) + ": wrong number of columns");
    for (std::size_t k = 0; k < *dimension; ++k) coords.push_back(parse_double(fields[k], line_no));
    values.push_back(parse_double(fields.back(), line_no));
  }
  if (!orientation) throw DataError("curve csv: missing '# orientation=' header");
  if (!dimension) throw DataError("curve csv: missing column header");

  if (*dimension == 1) return CurveSamples::on_axis(std::move(coords), std::move(values), *orientation);
  if (auto axes = detect_product_grid(*dimension, coords, values.size()))
    return CurveSamples::on_product_grid(std::move(*axes), std::move(values), *orientation);
  return CurveSamples::scattered(*dimension, std::move(coords), std::move(values), *orientation);
}

}  // namespace thermolab
