#pragma once

#include <filesystem>
#include <vector>

#include "veyes/config.hpp"
#include "veyes/qc_report.hpp"

namespace veyes {

struct PipelineResult {
  std::vector<QcRecord> records;  // sorted by (patient_id, series_uid)
  QcSummary summary;
  int files_examined = 0;
  int skipped_files = 0;
};

/// Full qc run: scan -> assemble -> detect -> gate -> export -> report.
/// Series are fanned out to a worker pool; outputs are written in sorted
/// key order so results are byte-identical for any worker count.
PipelineResult run_qc_pipeline(const std::filesystem::path& input_root,
                               const std::filesystem::path& output_root,
                               const PipelineConfig& cfg);

}  // namespace veyes
