#pragma once

// Plain-text config ingestion, CSV emission/parsing and binary PGM/PPM
// rasters.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace qsync::io {

// --- numbers ----------------------------------------------------------------

/// Shortest form is not required; 17 significant digits always round-trip.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

// --- config -----------------------------------------------------------------

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 when the value came from the command line
};

/// Ordered `key = value` store. Later assignments override earlier ones.
class KeyValues {
 public:
  void set(const std::string& key, std::string value, int line = 0) {
    entries_[key] = {std::move(value), line};
  }
  bool has(const std::string& key) const { return entries_.contains(key); }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    double v = 0.0;
    if (!parse_double(it->second.value, v) || !std::isfinite(v))
      fail(it, "expected a finite number, got '" + it->second.value + "'");
    return v;
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string_view s = trim(it->second.value);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      fail(it, "expected an integer, got '" + it->second.value + "'");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string_view s = trim(it->second.value);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(it, "expected a boolean, got '" + it->second.value + "'");
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::string_view rest = it->second.value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      double v = 0.0;
      if (!parse_double(item, v) || !std::isfinite(v))
        fail(it, "bad list element '" + std::string(trim(item)) + "'");
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  [[noreturn]] void error(const std::string& key, const std::string& msg) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key + ": " + msg, 0, key);
    fail(it, msg);
  }

 private:
  [[noreturn]] void fail(std::map<std::string, ConfigEntry>::const_iterator it,
                         const std::string& msg) const {
    const std::string where =
        it->second.line > 0 ? "line " + std::to_string(it->second.line) : "command line";
    throw ConfigError(where + ", field '" + it->first + "': " + msg, it->second.line, it->first);
  }

  std::map<std::string, ConfigEntry> entries_;
};

/// One `key = value` per line; `#` starts a comment.
inline KeyValues parse_config(std::istream& in) {
  KeyValues kv;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no, "");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no, "");
    kv.set(key, std::string(trim(line.substr(eq + 1))), line_no);
  }
  return kv;
}

inline KeyValues parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

// --- CSV --------------------------------------------------------------------

inline void write_csv_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no CSV column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  }
};

/// `#` comment lines, one header line, then numeric rows.
inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string raw;
  bool have_header = false;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw.front() == '#') {
      t.comments.emplace_back(trim(std::string_view(raw).substr(1)));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(raw);
    for (std::string cell; std::getline(ss, cell, ',');) cells.emplace_back(trim(cell));
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      if (!parse_double(c, v)) throw std::runtime_error("bad CSV number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// --- rasters ----------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

/// Linear map of [lo, hi] to [0, 255]; non-finite samples become 0.
inline std::vector<std::uint8_t> to_gray(const std::vector<double>& values) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::vector<std::uint8_t> out(values.size(), 0);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (values[i] - lo) / (hi - lo)));
  }
  return out;
}

/// Dark blue -> teal -> yellow ramp, white kept free for overlays.
inline Rgb colormap(std::uint8_t level) {
  const double t = level / 255.0;
  auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
  double r, g, b;
  if (t < 0.5) {
    const double u = t / 0.5;
    r = lerp(20, 30, u), g = lerp(20, 150, u), b = lerp(90, 140, u);
  } else {
    const double u = (t - 0.5) / 0.5;
    r = lerp(30, 240, u), g = lerp(150, 220, u), b = lerp(140, 40, u);
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

inline void write_pgm(std::ostream& out, int width, int height,
                      const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("PGM pixel count does not match dimensions");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

inline void write_ppm(std::ostream& out, int width, int height, const std::vector<Rgb>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("PPM pixel count does not match dimensions");
  out << "P6\n" << width << ' ' << height << "\n255\n";
  for (const Rgb& p : pixels) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
}

struct Raster {
  std::string magic;  // "P5" or "P6"
  int width = 0, height = 0, maxval = 0;
  std::vector<std::uint8_t> data;  // channels interleaved
};

inline Raster read_pnm(std::istream& in) {
  Raster r;
  in >> r.magic >> r.width >> r.height >> r.maxval;
  if (!in || (r.magic != "P5" && r.magic != "P6")) throw std::runtime_error("not a binary PGM/PPM");
  in.get();  // single whitespace before the payload
  const std::size_t channels = r.magic == "P6" ? 3 : 1;
  r.data.resize(static_cast<std::size_t>(r.width) * r.height * channels);
  in.read(reinterpret_cast<char*>(r.data.data()), static_cast<std::streamsize>(r.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(r.data.size()))
    throw std::runtime_error("truncated raster payload");
  return r;
}

}  // namespace qsync::io
