#ifndef SEGDEP_IO_HPP
#define SEGDEP_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segdep/evaluation.hpp"
#include "segdep/segment_model.hpp"

namespace segdep::io {

// Numeric CSV table with a header row. Decimal point, no locale, LF endings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Source line of each row (1-based, header is usually line 1).
  std::vector<int> lines;

  std::optional<std::size_t> column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

// Throws InvalidArgument naming the offending line.
Table parse_table(const std::string& text, const std::string& source = "input");
Table read_table(const std::filesystem::path& path);

// Series from an `x,y[,z]` table; z (the truth curve) is optional.
struct SeriesFile {
  TimeSeries series;
  std::optional<std::vector<double>> z;
};
SeriesFile series_from_table(const Table& table, const std::string& source = "input");
SeriesFile read_series(const std::filesystem::path& path);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string series_to_csv(const TimeSeries& series, const std::vector<double>* z = nullptr);

// `key = value` lines; `#` starts a comment. Unknown keys are rejected.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "config");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  std::string to_text() const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

// Analysis options from a config. p defaults to min(4/n, 0.5) when absent.
FitOptions fit_options_from_config(const Config& cfg, int n);

}  // namespace segdep::io

#endif  // SEGDEP_IO_HPP
