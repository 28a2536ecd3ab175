#include "proso/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "proso/formats.hpp"

namespace proso {

namespace {

struct ConfigValue {
  enum class Kind { Number, String, Bool, Pair } kind = Kind::Number;
  double number = 0.0;
  std::string string;
  bool boolean = false;
  Interval pair;
  std::size_t line = 0;
  std::size_t column = 0;
};

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + message);
}

std::string_view strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_number(std::string_view text, std::size_t line, std::size_t column) {
  std::string cell(strip(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (...) {
    fail(line, column, "expected a number, got '" + cell + "'");
  }
  if (used != cell.size() || !std::isfinite(v))
    fail(line, column, "expected a finite number, got '" + cell + "'");
  return v;
}

ConfigValue parse_value(std::string_view text, std::size_t line, std::size_t column) {
  ConfigValue value;
  value.line = line;
  value.column = column;
  const std::string_view v = strip(text);
  if (v.empty()) fail(line, column, "missing value");

  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      fail(line, column, "unterminated string");
    value.kind = ConfigValue::Kind::String;
    value.string = std::string(v.substr(1, v.size() - 2));
    return value;
  }
  if (v == "true" || v == "false") {
    value.kind = ConfigValue::Kind::Bool;
    value.boolean = (v == "true");
    return value;
  }
  if (v.front() == '[') {
    if (v.back() != ']') fail(line, column, "unterminated array");
    const std::string_view inner = v.substr(1, v.size() - 2);
    const std::size_t comma = inner.find(',');
    if (comma == std::string_view::npos || inner.find(',', comma + 1) != std::string_view::npos)
      fail(line, column, "expected exactly two numbers in [lo, hi]");
    value.kind = ConfigValue::Kind::Pair;
    value.pair.lo = parse_number(inner.substr(0, comma), line, column);
    value.pair.hi = parse_number(inner.substr(comma + 1), line, column);
    return value;
  }
  value.kind = ConfigValue::Kind::Number;
  value.number = parse_number(v, line, column);
  return value;
}

class KeyTable {
 public:
  void add(std::string section, std::string key, ConfigValue value) {
    entries_.push_back({std::move(section), std::move(key), std::move(value), false});
  }

  const ConfigValue* find(std::string_view section, std::string_view key) {
    for (auto& e : entries_)
      if (e.section == section && e.key == key) {
        e.consumed = true;
        return &e.value;
      }
    return nullptr;
  }

  void reject_unconsumed() const {
    for (const auto& e : entries_)
      if (!e.consumed)
        fail(e.value.line, e.value.column,
             "unknown key '" + e.section + "." + e.key + "'");
  }

 private:
  struct Entry {
    std::string section;
    std::string key;
    ConfigValue value;
    bool consumed;
  };
  std::vector<Entry> entries_;
};

double get_number(KeyTable& table, std::string_view section, std::string_view key,
                  double fallback) {
  const ConfigValue* v = table.find(section, key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::Number)
    fail(v->line, v->column, "'" + std::string(key) + "' must be a number");
  return v->number;
}

std::string get_string(KeyTable& table, std::string_view section, std::string_view key,
                       std::string fallback) {
  const ConfigValue* v = table.find(section, key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::String)
    fail(v->line, v->column, "'" + std::string(key) + "' must be a quoted string");
  return v->string;
}

bool get_bool(KeyTable& table, std::string_view section, std::string_view key,
              bool fallback) {
  const ConfigValue* v = table.find(section, key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::Bool)
    fail(v->line, v->column, "'" + std::string(key) + "' must be true or false");
  return v->boolean;
}

Interval get_pair(KeyTable& table, std::string_view section, std::string_view key,
                  Interval fallback) {
  const ConfigValue* v = table.find(section, key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::Pair)
    fail(v->line, v->column, "'" + std::string(key) + "' must be [lo, hi]");
  return v->pair;
}

void check_ordered(const Interval& r, const char* what) {
  if (!(r.lo < r.hi))
    throw ConfigError(std::string(what) + " range [" + format_double(r.lo) + ", " +
                      format_double(r.hi) + "] is not increasing");
}

}  // namespace

ScalingMaps RunConfig::scaling_maps() const {
  ScalingMaps maps{QuadraticMap::solve(duration_raw, duration_target),
                   QuadraticMap::solve(energy_raw, energy_target), pitch_raw, pitch_gain};
  return maps;
}

RawRanges RunConfig::raw_ranges() const {
  return RawRanges{pitch_raw, energy_raw, duration_raw};
}

RunConfig parse_config(std::string_view text) {
  KeyTable table;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view raw_line = text.substr(pos, end - pos);
    ++line_no;

    const std::size_t hash = raw_line.find('#');
    if (hash != std::string_view::npos && raw_line.find('"') == std::string_view::npos)
      raw_line = raw_line.substr(0, hash);
    const std::string_view line = strip(raw_line);

    if (!line.empty()) {
      if (line.front() == '[' && line.back() == ']') {
        section = std::string(strip(line.substr(1, line.size() - 2)));
        if (section.empty()) fail(line_no, 1, "empty section name");
      } else {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, 1, "expected key = value");
        const std::string key(strip(line.substr(0, eq)));
        if (key.empty()) fail(line_no, 1, "empty key");
        if (section.empty()) fail(line_no, 1, "key '" + key + "' outside any [section]");
        const std::size_t column = eq + 2;
        table.add(section, key, parse_value(line.substr(eq + 1), line_no, column));
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  RunConfig cfg;

  cfg.provider.base_url = get_string(table, "provider", "base_url", cfg.provider.base_url);
  cfg.provider.model_name = get_string(table, "provider", "model_name", cfg.provider.model_name);
  cfg.provider.api_key_env = get_string(table, "provider", "api_key_env", cfg.provider.api_key_env);
  cfg.provider.timeout_s = get_number(table, "provider", "timeout_s", cfg.provider.timeout_s);
  cfg.provider.max_retries =
      static_cast<int>(get_number(table, "provider", "max_retries", cfg.provider.max_retries));
  cfg.provider.max_concurrent_requests = static_cast<int>(get_number(
      table, "provider", "max_concurrent_requests", cfg.provider.max_concurrent_requests));
  cfg.provider.temperature = get_number(table, "provider", "temperature", cfg.provider.temperature);

  cfg.duration_raw = get_pair(table, "scaling", "duration_raw", cfg.duration_raw);
  cfg.duration_target = get_pair(table, "scaling", "duration_target", cfg.duration_target);
  cfg.energy_raw = get_pair(table, "scaling", "energy_raw", cfg.energy_raw);
  cfg.energy_target = get_pair(table, "scaling", "energy_target", cfg.energy_target);
  cfg.pitch_raw = get_pair(table, "scaling", "pitch_raw", cfg.pitch_raw);
  cfg.pitch_gain = get_number(table, "scaling", "pitch_gain", cfg.pitch_gain);

  cfg.rank.hp.C = get_number(table, "rank", "C", cfg.rank.hp.C);
  cfg.rank.hp.tol = get_number(table, "rank", "tol", cfg.rank.hp.tol);
  cfg.rank.hp.max_iter =
      static_cast<int>(get_number(table, "rank", "max_iter", cfg.rank.hp.max_iter));
  cfg.rank.hp.pair_limit = static_cast<std::size_t>(
      get_number(table, "rank", "pair_limit", double(cfg.rank.hp.pair_limit)));
  cfg.rank.seed =
      static_cast<std::uint64_t>(get_number(table, "rank", "seed", double(cfg.rank.seed)));
  cfg.rank.feature_dim = static_cast<std::size_t>(
      get_number(table, "rank", "feature_dim", double(cfg.rank.feature_dim)));

  cfg.bucket.mode = get_string(table, "bucket", "mode", cfg.bucket.mode);
  cfg.bucket.t_low = get_number(table, "bucket", "t_low", cfg.bucket.t_low);
  cfg.bucket.t_high = get_number(table, "bucket", "t_high", cfg.bucket.t_high);

  cfg.metrics.mcd_exclude_c0 =
      get_bool(table, "metrics", "mcd_exclude_c0", cfg.metrics.mcd_exclude_c0);
  cfg.metrics.mcd_dtw = get_bool(table, "metrics", "mcd_dtw", cfg.metrics.mcd_dtw);

  table.reject_unconsumed();

  // Range sanity; the quadratic solve enforces symmetry and monotonicity.
  check_ordered(cfg.duration_raw, "duration raw");
  check_ordered(cfg.duration_target, "duration target");
  check_ordered(cfg.energy_raw, "energy raw");
  check_ordered(cfg.energy_target, "energy target");
  check_ordered(cfg.pitch_raw, "pitch raw");
  cfg.scaling_maps();
  if (!(cfg.pitch_gain > 0.0)) throw ConfigError("pitch_gain must be positive");
  if (cfg.provider.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (cfg.provider.max_concurrent_requests < 1)
    throw ConfigError("max_concurrent_requests must be >= 1");
  if (!(cfg.rank.hp.C > 0.0)) throw ConfigError("rank C must be positive");
  if (!(cfg.rank.hp.tol > 0.0)) throw ConfigError("rank tol must be positive");
  if (cfg.rank.hp.max_iter < 1) throw ConfigError("rank max_iter must be >= 1");
  if (cfg.rank.feature_dim < 1) throw ConfigError("rank feature_dim must be >= 1");
  if (cfg.bucket.mode != "tertile" && cfg.bucket.mode != "explicit")
    throw ConfigError("bucket mode must be \"tertile\" or \"explicit\"");
  if (cfg.bucket.mode == "explicit" &&
      !(0.0 <= cfg.bucket.t_low && cfg.bucket.t_low < cfg.bucket.t_high &&
        cfg.bucket.t_high <= 1.0))
    throw ConfigError("bucket thresholds must satisfy 0 <= t_low < t_high <= 1");

  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto pair = [](const Interval& r) {
    return "[" + format_double(r.lo) + ", " + format_double(r.hi) + "]";
  };
  out << "[provider]\n";
  out << "base_url = \"" << cfg.provider.base_url << "\"\n";
  out << "model_name = \"" << cfg.provider.model_name << "\"\n";
  out << "api_key_env = \"" << cfg.provider.api_key_env << "\"\n";
  out << "timeout_s = " << format_double(cfg.provider.timeout_s) << "\n";
  out << "max_retries = " << cfg.provider.max_retries << "\n";
  out << "max_concurrent_requests = " << cfg.provider.max_concurrent_requests << "\n";
  out << "temperature = " << format_double(cfg.provider.temperature) << "\n";
  out << "\n[scaling]\n";
  out << "duration_raw = " << pair(cfg.duration_raw) << "\n";
  out << "duration_target = " << pair(cfg.duration_target) << "\n";
  out << "energy_raw = " << pair(cfg.energy_raw) << "\n";
  out << "energy_target = " << pair(cfg.energy_target) << "\n";
  out << "pitch_raw = " << pair(cfg.pitch_raw) << "\n";
  out << "pitch_gain = " << format_double(cfg.pitch_gain) << "\n";
  out << "\n[rank]\n";
  out << "C = " << format_double(cfg.rank.hp.C) << "\n";
  out << "tol = " << format_double(cfg.rank.hp.tol) << "\n";
  out << "max_iter = " << cfg.rank.hp.max_iter << "\n";
  out << "pair_limit = " << cfg.rank.hp.pair_limit << "\n";
  out << "seed = " << cfg.rank.seed << "\n";
  out << "feature_dim = " << cfg.rank.feature_dim << "\n";
  out << "\n[bucket]\n";
  out << "mode = \"" << cfg.bucket.mode << "\"\n";
  out << "t_low = " << format_double(cfg.bucket.t_low) << "\n";
  out << "t_high = " << format_double(cfg.bucket.t_high) << "\n";
  out << "\n[metrics]\n";
  out << "mcd_exclude_c0 = " << (cfg.metrics.mcd_exclude_c0 ? "true" : "false") << "\n";
  out << "mcd_dtw = " << (cfg.metrics.mcd_dtw ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace proso
