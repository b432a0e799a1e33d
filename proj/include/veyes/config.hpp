#pragma once

#include <filesystem>
#include <string>

#include "veyes/lung_detect.hpp"
#include "veyes/series_qc.hpp"
#include "veyes/volume_export.hpp"

namespace veyes {

struct PipelineConfig {
  LungDetectConfig detect;
  GateConfig gate;
  WindowConfig window;
  int workers = 0;  // 0 = number of logical processors
  bool overwrite = false;
  int montage_columns = 10;

  int effective_workers() const;
  void validate() const;  // throws config_error on bad values
};

/// Plain "key = value" lines, '#' comments. Unknown keys are fatal.
PipelineConfig parse_config_text(const std::string& text);

PipelineConfig load_config_file(const std::filesystem::path& path);

}  // namespace veyes
