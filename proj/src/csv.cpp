#include "eitlab/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eitlab::csvio {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool numeric_cell(const std::string& cell) {
  // plain number, nan/inf, or an a/b rational
  const auto slash = cell.find('/');
  if (slash != std::string::npos) {
    const std::string num = cell.substr(0, slash), den = cell.substr(slash + 1);
    if (num.empty() || den.empty()) return false;
    for (const auto part : {&num, &den}) {
      std::size_t i = part->front() == '-' ? 1 : 0;
      if (i == part->size()) return false;
      for (; i < part->size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>((*part)[i]))) return false;
    }
    return true;
  }
  char* end = nullptr;
  const std::string c = cell;
  std::strtod(c.c_str(), &end);
  return end == c.c_str() + c.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const std::string& path, const Table& t,
                 const std::map<std::string, std::string>& resolved_config,
                 std::uint64_t seed) {
  const std::string tmp = path + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << "# eitlab " << kToolVersion << "\n";
    char stamp[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    out << "# generated: " << stamp << "\n";
    out << "# seed: " << seed << "\n";
    for (const auto& [k, v] : resolved_config) out << "# config " << k << " = " << v << "\n";
    for (const auto& line : t.meta) out << "# " << line << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      out << (c ? "," : "") << t.columns[c];
    out << "\n";
    for (const auto& row : t.rows) {
      if (row.size() != t.columns.size())
        throw std::runtime_error("row width mismatch while writing " + path);
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + tmp);
  } catch (...) {
    std::remove(tmp.c_str());
    throw;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

std::string validate_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot open " + path;
  std::string line;
  bool saw_version = false, saw_seed = false, in_header = true;
  std::size_t width = 0, rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header && line.rfind("#", 0) == 0) {
      if (line.rfind("# eitlab ", 0) == 0) saw_version = true;
      if (line.rfind("# seed: ", 0) == 0) saw_seed = true;
      continue;
    }
    if (in_header) {
      in_header = false;
      if (line.empty()) return "missing column header";
      width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    if (line.empty()) continue;
    std::size_t cells = 1;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && !numeric_cell(trim(cell)))
        return "non-numeric cell '" + cell + "' in row " + std::to_string(rows + 1);
    }
    cells = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cells != width)
      return "row " + std::to_string(rows + 1) + " has " + std::to_string(cells) +
             " cells, header has " + std::to_string(width);
    ++rows;
  }
  if (in_header) return "no column header";
  if (!saw_version) return "missing tool-version line";
  if (!saw_seed) return "missing seed line";
  if (rows == 0) return "no data rows";
  return "";
}

std::string comparable_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("# generated:", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

Experiment parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  Experiment exp;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      if (!exp.kind.empty())
        throw std::invalid_argument("config has a second section at line " +
                                    std::to_string(lineno) +
                                    "; one experiment per file");
      exp.kind = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not key = value");
    if (exp.kind.empty())
      throw std::invalid_argument("config key before any [section]");
    const std::string key = trim(t.substr(0, eq));
    if (exp.values.count(key))
      throw std::invalid_argument("duplicate config key '" + key + "'");
    exp.values[key] = trim(t.substr(eq + 1));
  }
  if (exp.kind.empty()) throw std::invalid_argument("config names no experiment kind");
  return exp;
}

const std::map<std::string, std::string>& config_schema(const std::string& kind) {
  static const std::map<std::string, std::map<std::string, std::string>> schemas = {
      {"pmf", {{"ell", "2"}, {"r", "1"}, {"n", "3"}, {"out", "pmf.csv"}}},
      {"profile",
       {{"ell", "2"}, {"r", "1"}, {"level", "3"}, {"n", "8"}, {"k_lo", "3"},
        {"k_hi", "7"}, {"out", "profile.csv"}}},
      {"eit",
       {{"measure", "z3"}, {"ell", "3"}, {"r", "1"}, {"d", "3"}, {"length", "512"},
        {"pairs", "20000"}, {"seed", "7"}, {"out", "eit.csv"}}},
      {"theta_d",
       {{"d", "4"}, {"walks", "2000"}, {"horizon", "10000"}, {"seed", "7"},
        {"out", "theta_d.csv"}}},
      {"survival",
       {{"ell", "3"}, {"r", "1"}, {"p", "0.95"}, {"n", "32"}, {"trials", "1000"},
        {"seed", "41"}, {"theta", "registry"}, {"c", "registry"},
        {"assert", "true"}, {"out", "survival.csv"}}},
      {"flow-energy",
       {{"ell", "3"}, {"r", "1"}, {"p", "0.95"}, {"n", "20"}, {"replicas", "1000"},
        {"samples", "256"}, {"seed", "11"}, {"theta", "registry"},
        {"c", "registry"}, {"assert", "true"}, {"out", "flow_energy.csv"}}},
      {"resistance",
       {{"d", "3"}, {"p", "0.95"}, {"radii", "4,8,16"}, {"replicas", "50"},
        {"seed", "20260822"}, {"theta", "registry"}, {"out", "resistance.csv"}}},
  };
  const auto it = schemas.find(kind);
  if (it == schemas.end())
    throw std::invalid_argument("unknown experiment kind '" + kind + "'");
  return it->second;
}

std::map<std::string, std::string> resolve_config(const Experiment& exp) {
  auto resolved = config_schema(exp.kind);
  for (const auto& [k, v] : exp.values) {
    const auto it = resolved.find(k);
    if (it == resolved.end())
      throw std::invalid_argument("unknown config key '" + k + "' for kind '" +
                                  exp.kind + "'");
    it->second = v;
  }
  resolved["kind"] = exp.kind;
  return resolved;
}

std::map<std::string, double> read_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read constants file " + path);
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::stringstream ss(t);
    std::string name;
    double value = 0;
    if (!(ss >> name >> value))
      throw std::runtime_error("bad constants line: " + line);
    out[name] = value;
  }
  return out;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("plot needs matched, nonempty series");
  double xlo = xs[0], xhi = xs[0], ylo = ys[0], yhi = ys[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xlo = std::min(xlo, xs[i]);
    xhi = std::max(xhi, xs[i]);
    ylo = std::min(ylo, ys[i]);
    yhi = std::max(yhi, ys[i]);
  }
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  const double w = 640, h = 400, ml = 60, mr = 20, mt = 30, mb = 40;
  const auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (w - ml - mr); };
  const auto py = [&](double y) { return h - mb - (y - ylo) / (yhi - ylo) * (h - mt - mb); };

  const std::string tmp = path + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
        << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << h - mb + 16
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(xlo)
        << "</text>\n";
    out << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(xhi)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(ylo)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(yhi)
        << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << px(xs[i]) << "," << py(ys[i]) << " ";
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i])
          << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed for " + tmp);
  } catch (...) {
    std::remove(tmp.c_str());
    throw;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

}  // namespace eitlab::csvio
