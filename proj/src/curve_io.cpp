#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "vista/equilibrium.hpp"
#include "vista/errors.hpp"

namespace vista {

namespace {

constexpr const char* kCurveHeader = "eta,pa,mse,r_star,pa_stderr,mse_stderr";
constexpr std::size_t kCurveColumns = 6;

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_curve(const EquilibriumCurve& curve, std::ostream& out) {
  out << kCurveHeader << '\n';
  for (const auto& p : curve.points()) {
    out << format17(p.eta) << ',' << format17(p.pa) << ',' << format17(p.mse) << ','
        << format17(p.r_star) << ',' << format17(p.pa_stderr) << ',' << format17(p.mse_stderr)
        << '\n';
  }
}

EquilibriumCurve read_curve(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1, 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCurveHeader) {
    throw ParseError(std::string("expected header '") + kCurveHeader + "'", line_no, 1);
  }

  std::vector<EquilibriumPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double fields[kCurveColumns];
    std::size_t pos = 0;
    for (std::size_t c = 0; c < kCurveColumns; ++c) {
      const std::size_t column = pos + 1;
      if (pos > line.size()) throw ParseError("too few fields", line_no, line.size() + 1);
      const char* first = line.data() + pos;
      const char* last = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(first, last, fields[c]);
      if (ec != std::errc() || ptr == first) {
        throw ParseError("expected a number", line_no, column);
      }
      pos = static_cast<std::size_t>(ptr - line.data());
      if (c + 1 < kCurveColumns) {
        if (pos >= line.size() || line[pos] != ',') {
          throw ParseError("expected ','", line_no, pos + 1);
        }
        ++pos;
      } else if (pos != line.size()) {
        throw ParseError("unexpected trailing characters", line_no, pos + 1);
      }
    }
    EquilibriumPoint p;
    p.eta = fields[0];
    p.pa = fields[1];
    p.mse = fields[2];
    p.r_star = fields[3];
    p.pa_stderr = fields[4];
    p.mse_stderr = fields[5];
    if (!points.empty() && !(p.eta > points.back().eta)) {
      throw ParseError("eta must be strictly increasing", line_no, 1);
    }
    if (p.eta < 2.0) throw ParseError("eta must be at least 2", line_no, 1);
    points.push_back(p);
  }
  if (points.empty()) throw ParseError("curve has no rows", line_no + 1, 1);
  return EquilibriumCurve(std::move(points));
}

void save_curve(const EquilibriumCurve& curve, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write curve file " + path.string());
  write_curve(curve, out);
  if (!out) throw ConfigError("failed writing curve file " + path.string());
}

EquilibriumCurve load_curve(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open curve file " + path.string());
  return read_curve(in);
}

}  // namespace vista
