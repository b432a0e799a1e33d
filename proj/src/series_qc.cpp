#include "veyes/series_qc.hpp"

#include <cmath>

#include "veyes/error.hpp"

namespace veyes {

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::none: return "";
    case RejectReason::too_few_slices: return "TOO_FEW_SLICES";
    case RejectReason::bad_matrix: return "BAD_MATRIX";
    case RejectReason::not_axial: return "NOT_AXIAL";
    case RejectReason::unsupported_transfer_syntax: return "UNSUPPORTED_TRANSFER_SYNTAX";
    case RejectReason::malformed_series: return "MALFORMED_SERIES";
    case RejectReason::missing_geometry: return "MISSING_GEOMETRY";
    case RejectReason::no_lung_block: return "NO_LUNG_BLOCK";
    case RejectReason::block_too_short: return "BLOCK_TOO_SHORT";
  }
  return "";
}

std::int16_t quantize_hu(float v) {
  double rounded = std::round(static_cast<double>(v));  // half away from zero
  if (rounded < -32768.0) return -32768;
  if (rounded > 32767.0) return 32767;
  return static_cast<std::int16_t>(rounded);
}

LungBlock quantize_block(const std::vector<HuSlice>& slices, int start, int end) {
  LungBlock block;
  block.depth = end - start + 1;
  block.rows = slices[start].data.rows();
  block.cols = slices[start].data.cols();
  block.start = start;
  block.end = end;
  block.voxels.reserve(static_cast<std::size_t>(block.depth) * block.rows * block.cols);
  for (int i = start; i <= end; ++i) {
    const Grid<float>& g = slices[i].data;
    for (std::size_t k = 0; k < g.size(); ++k) block.voxels.push_back(quantize_hu(g[k]));
  }
  return block;
}

std::optional<RejectReason> gate_series(const SortedSeries& series, const GateConfig& cfg) {
  if (static_cast<int>(series.slices.size()) < cfg.min_slices)
    return RejectReason::too_few_slices;
  if (series.rows != cfg.required_rows || series.cols != cfg.required_cols)
    return RejectReason::bad_matrix;
  return std::nullopt;
}

std::optional<std::pair<int, int>> extract_longest_block(
    const std::vector<std::uint8_t>& flags) {
  int best_start = -1, best_len = 0;
  int run_start = -1;
  const int n = static_cast<int>(flags.size());
  for (int i = 0; i <= n; ++i) {
    bool on = i < n && flags[i];
    if (on && run_start < 0) run_start = i;
    if (!on && run_start >= 0) {
      int len = i - run_start;
      if (len > best_len) {  // strict: earliest run wins ties
        best_len = len;
        best_start = run_start;
      }
      run_start = -1;
    }
  }
  if (best_len == 0) return std::nullopt;
  return std::make_pair(best_start, best_start + best_len - 1);
}

ProcessResult process_series(const SortedSeries& series,
                             const LungDetectConfig& detect_cfg,
                             const GateConfig& gate_cfg) {
  ProcessResult result;
  SeriesOutcome& out = result.outcome;
  out.series_uid = series.series_uid;
  out.patient_id = series.patient_id;
  out.original_slices = static_cast<int>(series.slices.size());
  out.orientation_warning = series.orientation == OrientationStatus::unknown;

  auto reject = [&](RejectReason reason) {
    out.accepted = false;
    out.reason = reason;
    out.kept_slices = 0;
    out.block.reset();
    return result;
  };

  if (auto gate = gate_series(series, gate_cfg)) return reject(*gate);
  if (series.orientation == OrientationStatus::non_axial)
    return reject(RejectReason::not_axial);

  std::vector<std::uint8_t> flags;
  flags.reserve(series.slices.size());
  for (const auto& slice : series.slices)
    flags.push_back(detect_lung_slice(slice, detect_cfg).lung_flag ? 1 : 0);

  auto run = extract_longest_block(flags);
  if (!run) return reject(RejectReason::no_lung_block);
  int len = run->second - run->first + 1;
  if (len < gate_cfg.min_block) return reject(RejectReason::block_too_short);

  out.accepted = true;
  out.reason = RejectReason::none;
  out.block = *run;
  out.kept_slices = len;
  LungBlock block = quantize_block(series.slices, run->first, run->second);
  block.series_uid = series.series_uid;
  block.patient_id = series.patient_id;
  result.block = std::move(block);
  return result;
}

ProcessResult process_record(const SeriesRecord& record,
                             const LungDetectConfig& detect_cfg,
                             const GateConfig& gate_cfg) {
  SortedSeries series;
  try {
    series = assemble_series(record);
  } catch (const Error& e) {
    ProcessResult result;
    SeriesOutcome& out = result.outcome;
    out.series_uid = record.series_uid;
    out.patient_id = record.patient_id;
    out.accepted = false;
    out.original_slices = static_cast<int>(record.files.size());
    out.kept_slices = 0;
    switch (e.code()) {
      case errc::unsupported_transfer_syntax:
        out.reason = RejectReason::unsupported_transfer_syntax;
        break;
      case errc::missing_geometry:
        out.reason = RejectReason::missing_geometry;
        break;
      default:
        out.reason = RejectReason::malformed_series;
        break;
    }
    return result;
  }
  return process_series(series, detect_cfg, gate_cfg);
}

}  // namespace veyes
