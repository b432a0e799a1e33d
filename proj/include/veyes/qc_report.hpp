#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "veyes/series_qc.hpp"

namespace veyes {

struct QcRecord {
  std::string patient_id;
  std::string series_uid;
  bool accepted = false;
  std::string reason;  // empty when accepted
  int original_slices = 0;
  int kept_slices = 0;

  bool operator==(const QcRecord&) const = default;
};

struct QcSummary {
  int total_series = 0;
  int accepted_series = 0;
  long long total_raw_images = 0;
  long long total_kept_images = 0;
  double discard_proportion = 0.0;
};

QcRecord to_qc_record(const SeriesOutcome& outcome);

/// Header + one row per record, sorted by (patient_id, series_uid),
/// RFC-4180 quoting, LF line endings.
void write_qc_csv(const std::vector<QcRecord>& records, const std::filesystem::path& path);

std::vector<QcRecord> read_qc_csv(const std::filesystem::path& path);

QcSummary summarize(const std::vector<QcRecord>& records);

std::string format_summary(const QcSummary& summary);

void write_qc_summary(const QcSummary& summary, const std::filesystem::path& path);

}  // namespace veyes
