#include "veyes/config.hpp"

#include <cstdlib>
#include <thread>

#include "veyes/csv.hpp"
#include "veyes/error.hpp"
#include "veyes/util.hpp"

namespace veyes {

namespace {

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw Error(errc::config_error, key + " expects a number, got '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  long v = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw Error(errc::config_error, key + " expects an integer, got '" + value + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(errc::config_error, key + " expects true/false, got '" + value + "'");
}

}  // namespace

int PipelineConfig::effective_workers() const {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(errc::config_error, msg); };
  if (!(detect.hu_low < detect.hu_high)) fail("hu_low must be below hu_high");
  if (detect.open_radius < 1) fail("open_radius must be >= 1");
  if (detect.close_radius < 1) fail("close_radius must be >= 1");
  if (!(detect.min_region_frac > 0.0 && detect.min_region_frac < 1.0))
    fail("min_region_frac must be in (0,1)");
  if (!(detect.min_lung_ratio > 0.0 && detect.min_lung_ratio < 1.0))
    fail("min_lung_ratio must be in (0,1)");
  if (detect.connectivity != 4 && detect.connectivity != 8)
    fail("connectivity must be 4 or 8");
  if (gate.min_slices < 1) fail("min_slices must be >= 1");
  if (gate.required_rows < 1 || gate.required_cols < 1)
    fail("required matrix dimensions must be >= 1");
  if (gate.min_block < 1) fail("min_block must be >= 1");
  if (!(window.width > 0.0)) fail("window_width must be positive");
  if (workers < 0) fail("workers must be >= 1");
  if (montage_columns < 1) fail("montage_columns must be >= 1");
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;
  std::size_t line_start = 0;
  int line_no = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    std::string line = text.substr(line_start, line_end == std::string::npos
                                                   ? line_end
                                                   : line_end - line_start);
    line_start = line_end == std::string::npos ? text.size() + 1 : line_end + 1;
    ++line_no;

    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(errc::config_error,
                  "line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "hu_low") cfg.detect.hu_low = to_double(key, value);
    else if (key == "hu_high") cfg.detect.hu_high = to_double(key, value);
    else if (key == "open_radius") cfg.detect.open_radius = to_int(key, value);
    else if (key == "close_radius") cfg.detect.close_radius = to_int(key, value);
    else if (key == "min_region_frac") cfg.detect.min_region_frac = to_double(key, value);
    else if (key == "min_lung_ratio") cfg.detect.min_lung_ratio = to_double(key, value);
    else if (key == "connectivity") cfg.detect.connectivity = to_int(key, value);
    else if (key == "min_slices") cfg.gate.min_slices = to_int(key, value);
    else if (key == "required_rows") cfg.gate.required_rows = to_int(key, value);
    else if (key == "required_cols") cfg.gate.required_cols = to_int(key, value);
    else if (key == "min_block") cfg.gate.min_block = to_int(key, value);
    else if (key == "window_center") cfg.window.center = to_double(key, value);
    else if (key == "window_width") cfg.window.width = to_double(key, value);
    else if (key == "workers") cfg.workers = to_int(key, value);
    else if (key == "overwrite") cfg.overwrite = to_bool(key, value);
    else if (key == "montage_columns") cfg.montage_columns = to_int(key, value);
    else throw Error(errc::config_error, "unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  return parse_config_text(csv::read_file(path));
}

}  // namespace veyes
