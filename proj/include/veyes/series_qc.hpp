#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "veyes/dicom.hpp"
#include "veyes/lung_block.hpp"
#include "veyes/lung_detect.hpp"

namespace veyes {

struct GateConfig {
  int min_slices = 64;
  int required_rows = 512;
  int required_cols = 512;
  int min_block = 20;
};

enum class RejectReason {
  none,
  too_few_slices,
  bad_matrix,
  not_axial,
  unsupported_transfer_syntax,
  malformed_series,
  missing_geometry,
  no_lung_block,
  block_too_short,
};

const char* to_string(RejectReason reason);

struct SeriesOutcome {
  std::string series_uid;
  std::string patient_id;
  bool accepted = false;
  RejectReason reason = RejectReason::none;
  int original_slices = 0;
  int kept_slices = 0;
  std::optional<std::pair<int, int>> block;  // inclusive, 0-based
  bool orientation_warning = false;          // orientation tag absent
};

struct ProcessResult {
  SeriesOutcome outcome;
  std::optional<LungBlock> block;
};

/// Scanner-level gate: slice count first, then matrix size.
std::optional<RejectReason> gate_series(const SortedSeries& series, const GateConfig& cfg);

/// Longest run of true flags; earliest run wins ties; nullopt when all false.
std::optional<std::pair<int, int>> extract_longest_block(
    const std::vector<std::uint8_t>& flags);

/// Gate, per-slice lung detection, block extraction, and the accept/reject
/// decision. Accepted outcomes carry the quantized lung block.
ProcessResult process_series(const SortedSeries& series,
                             const LungDetectConfig& detect_cfg,
                             const GateConfig& gate_cfg);

/// assemble_series + process_series with ingest failures mapped to
/// rejection reasons, so every record yields exactly one outcome.
ProcessResult process_record(const SeriesRecord& record,
                             const LungDetectConfig& detect_cfg,
                             const GateConfig& gate_cfg);

}  // namespace veyes
