#pragma once

#include <map>
#include <string>
#include <vector>

namespace eitlab::csvio {

inline constexpr const char* kToolVersion = "1.0.0";

// one emitted table: metadata header block ('#' lines), column names, rows.
// cells hold already-formatted text; format_double for numeric cells
struct Table {
  std::vector<std::string> meta;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);  // %.17g, round-trip safe

// writes via a temp file and renames into place, so failures leave nothing
// half-written; prepends tool version, timestamp, seed, and the resolved
// config to the metadata block
void write_table(const std::string& path, const Table& t,
                 const std::map<std::string, std::string>& resolved_config,
                 std::uint64_t seed);

// re-parses an emitted file: metadata block, then a column header, then rows
// of equal width whose non-empty cells are numbers or a/b rationals.
// returns an empty string when the file checks out, else the complaint
std::string validate_file(const std::string& path);

// strips lines beginning "# generated:" — the only part of an emission that
// may differ between identical runs
std::string comparable_bytes(const std::string& path);

// flat key = value config with one [kind] section
struct Experiment {
  std::string kind;
  std::map<std::string, std::string> values;
};

Experiment parse_config(const std::string& path);

// known keys and their defaults for one experiment kind; parse errors throw
// std::invalid_argument with the offending key named
const std::map<std::string, std::string>& config_schema(const std::string& kind);

// defaults overlaid with the file's values; unknown keys throw
std::map<std::string, std::string> resolve_config(const Experiment& exp);

// measured-constant registry: "name value" lines with '#' comments
std::map<std::string, double> read_constants(const std::string& path);

// minimal line/scatter rendering of one series
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace eitlab::csvio
