#include "veyes/qc_report.hpp"

#include <algorithm>

#include "veyes/csv.hpp"
#include "veyes/error.hpp"
#include "veyes/util.hpp"

namespace veyes {

namespace {
constexpr const char* kHeader = "patient_id,series_uid,status,reason,original_slices,kept_slices";
}

QcRecord to_qc_record(const SeriesOutcome& outcome) {
  QcRecord rec;
  rec.patient_id = outcome.patient_id;
  rec.series_uid = outcome.series_uid;
  rec.accepted = outcome.accepted;
  rec.reason = outcome.accepted ? "" : to_string(outcome.reason);
  rec.original_slices = outcome.original_slices;
  rec.kept_slices = outcome.kept_slices;
  return rec;
}

void write_qc_csv(const std::vector<QcRecord>& records, const std::filesystem::path& path) {
  std::vector<QcRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const QcRecord& a, const QcRecord& b) {
    return std::tie(a.patient_id, a.series_uid) < std::tie(b.patient_id, b.series_uid);
  });

  std::string text = std::string(kHeader) + "\n";
  for (const auto& r : sorted) {
    text += csv::join_row({r.patient_id, r.series_uid, r.accepted ? "accepted" : "rejected",
                           r.reason, std::to_string(r.original_slices),
                           std::to_string(r.kept_slices)});
    text += '\n';
  }
  csv::write_file(path, text);
}

std::vector<QcRecord> read_qc_csv(const std::filesystem::path& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty() || csv::join_row(rows[0]) != kHeader)
    throw Error(errc::schema_error, "bad QC report header in " + path.string());

  std::vector<QcRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() != 6)
      throw Error(errc::schema_error, "QC report row has " + std::to_string(row.size()) + " fields");
    QcRecord rec;
    rec.patient_id = row[0];
    rec.series_uid = row[1];
    if (row[2] == "accepted") rec.accepted = true;
    else if (row[2] == "rejected") rec.accepted = false;
    else throw Error(errc::schema_error, "bad status: " + row[2]);
    rec.reason = row[3];
    try {
      rec.original_slices = std::stoi(row[4]);
      rec.kept_slices = std::stoi(row[5]);
    } catch (const std::exception&) {
      throw Error(errc::schema_error, "bad slice count in QC report");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

QcSummary summarize(const std::vector<QcRecord>& records) {
  QcSummary s;
  for (const auto& r : records) {
    ++s.total_series;
    if (r.accepted) ++s.accepted_series;
    s.total_raw_images += r.original_slices;
    s.total_kept_images += r.kept_slices;
  }
  s.discard_proportion =
      s.total_raw_images > 0
          ? 1.0 - static_cast<double>(s.total_kept_images) / static_cast<double>(s.total_raw_images)
          : 0.0;
  return s;
}

std::string format_summary(const QcSummary& s) {
  std::string out;
  out += "total_series=" + std::to_string(s.total_series) + "\n";
  out += "accepted_series=" + std::to_string(s.accepted_series) + "\n";
  out += "total_raw_images=" + std::to_string(s.total_raw_images) + "\n";
  out += "total_kept_images=" + std::to_string(s.total_kept_images) + "\n";
  out += "discard_proportion=" + format_double(s.discard_proportion) + "\n";
  return out;
}

void write_qc_summary(const QcSummary& summary, const std::filesystem::path& path) {
  csv::write_file(path, format_summary(summary));
}

}  // namespace veyes
