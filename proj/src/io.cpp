#include "segdep/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace segdep::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) parts.push_back(trim(field));
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::optional<std::size_t> Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const auto idx = column_index(name);
  if (!idx) throw InvalidArgument("missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[*idx]);
  return out;
}

Table parse_table(const std::string& text, const std::string& source) {
  Table table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (header) {
      for (const auto& f : fields)
        if (f.empty()) throw InvalidArgument(source + ":" + std::to_string(line_no) + ": empty column name");
      table.columns = std::move(fields);
      header = false;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.columns.size()) + " fields, found " +
                            std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) throw InvalidArgument(source + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
      row.push_back(*v);
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  if (header) throw InvalidArgument(source + ": missing header row");
  return table;
}

Table read_table(const std::filesystem::path& path) { return parse_table(slurp(path), path.string()); }

SeriesFile series_from_table(const Table& table, const std::string& source) {
  const auto xi = table.column_index("x");
  const auto yi = table.column_index("y");
  if (!xi || !yi) throw InvalidArgument(source + ": header must contain x and y columns");
  for (const auto& c : table.columns)
    if (c != "x" && c != "y" && c != "z") throw InvalidArgument(source + ": unexpected column '" + c + "'");
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i - 1][*xi] < table.rows[i][*xi]))
      throw InvalidArgument(source + ":" + std::to_string(table.lines[i]) + ": x must be strictly increasing");
  SeriesFile out{TimeSeries(table.column("x"), table.column("y")), std::nullopt};
  if (table.column_index("z")) out.z = table.column("z");
  return out;
}

SeriesFile read_series(const std::filesystem::path& path) {
  return series_from_table(read_table(path), path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out << content;
    if (!out) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string series_to_csv(const TimeSeries& series, const std::vector<double>* z) {
  std::string out = z ? "x,y,z\n" : "x,y\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.x()[i]);
    out += ',';
    out += format_double(series.y()[i]);
    if (z) {
      out += ',';
      out += format_double((*z)[i]);
    }
    out += '\n';
  }
  return out;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      // model and analysis
      "p", "nu0", "gamma0", "delta0", "delta1", "delta2", "model_prior", "resample_threshold",
      "max_particles", "n_draws", "seed", "eb_iterations", "eb_draws", "resimulate", "window_halfwidth",
      // simulation and studies
      "n", "sigma2", "generator", "cubic_d", "replicates", "coverage_level", "power_c", "power_xc",
      "power_n"};
  return keys;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw InvalidArgument(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw InvalidArgument(where + "unknown config key '" + key + "'");
    if (value.empty()) throw InvalidArgument(where + "empty value for '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) { return parse(slurp(path), path.string()); }

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto v = parse_number(it->second);
  if (!v) throw InvalidArgument("config key '" + key + "' is not a number: " + it->second);
  return *v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::int64_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("config key '" + key + "' is not an integer: " + s);
  return v;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("config key '" + key + "' is not an unsigned integer: " + s);
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& s = it->second;
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw InvalidArgument("config key '" + key + "' is not a boolean: " + s);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& part : split(it->second, ',')) {
    const auto v = parse_number(part);
    if (!v) throw InvalidArgument("config key '" + key + "' has a non-numeric entry: " + part);
    out.push_back(*v);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw InvalidArgument("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

FitOptions fit_options_from_config(const Config& cfg, int n) {
  FitOptions opts;
  Hyperparams& hp = opts.hp;
  hp.nu0 = cfg.get_double("nu0", 0.0);
  hp.gamma0 = cfg.get_double("gamma0", 0.0);
  hp.delta = Vec3(cfg.get_double("delta0", 1.0), cfg.get_double("delta1", 100.0), cfg.get_double("delta2", 1600.0));
  hp.model_prior = cfg.get_double("model_prior", 0.5);
  hp.segment_length = SegmentLengthPrior::geometric(cfg.get_double("p", std::min(4.0 / n, 0.5)));
  hp.validate();

  opts.resample.threshold = cfg.get_double("resample_threshold", 1e-6);
  const auto cap = cfg.get_int("max_particles", 0);
  if (cap < 0) throw InvalidArgument("max_particles must be >= 0");
  opts.resample.max_particles = static_cast<std::size_t>(cap);
  opts.resample.validate();

  const auto draws = cfg.get_int("n_draws", 1000);
  if (draws < 1) throw InvalidArgument("n_draws must be >= 1");
  opts.n_draws = static_cast<std::size_t>(draws);
  const auto eb = cfg.get_int("eb_iterations", 0);
  if (eb < 0) throw InvalidArgument("eb_iterations must be >= 0");
  opts.eb_iterations = static_cast<int>(eb);
  const auto eb_draws = cfg.get_int("eb_draws", static_cast<std::int64_t>(opts.n_draws));
  if (eb_draws < 1) throw InvalidArgument("eb_draws must be >= 1");
  opts.eb_draws = static_cast<std::size_t>(eb_draws);
  opts.resimulate = cfg.get_bool("resimulate", true);
  opts.seed = cfg.get_seed("seed", 1);
  return opts;
}

}  // namespace segdep::io
