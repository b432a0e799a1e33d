#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "veyes/image.hpp"

namespace veyes {

inline constexpr const char* kImplicitVrLittleEndian = "1.2.840.10008.1.2";
inline constexpr const char* kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";

enum class PixelRepresentation { unsigned_int, signed_int };

struct DicomHeader {
  std::string series_uid;
  std::string sop_uid;
  std::string patient_id;
  std::string transfer_syntax_uid;
  int rows = 0;
  int cols = 0;
  int bits_allocated = 0;  // 8 or 16
  PixelRepresentation pixel_representation = PixelRepresentation::unsigned_int;
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  std::optional<std::array<double, 3>> image_position_patient;
  std::optional<std::array<double, 6>> image_orientation_patient;
  std::optional<int> instance_number;
};

/// One slice in Hounsfield units, 32-bit float, plus its z position (mm).
struct HuSlice {
  Grid<float> data;
  double z = 0.0;
  std::string source_sop_uid;
};

enum class OrientationStatus { axial, non_axial, unknown };

struct SortedSeries {
  std::string series_uid;
  std::string patient_id;
  std::vector<HuSlice> slices;
  int rows = 0;
  int cols = 0;
  OrientationStatus orientation = OrientationStatus::unknown;
};

/// Files grouped by SeriesInstanceUID during the directory scan.
struct SeriesRecord {
  std::string series_uid;
  std::string patient_id;
  std::vector<std::filesystem::path> files;
  bool unsupported_transfer_syntax = false;
};

struct ScanResult {
  std::vector<SeriesRecord> series;  // sorted by (patient_id, series_uid)
  int files_examined = 0;
  int skipped_count = 0;  // non-DICOM or unparseable files
};

/// Parses one DICOM Part-10 file (preamble + "DICM", implicit or explicit VR
/// little endian). Returns the header plus exactly rows*cols*(bits/8) pixel
/// bytes. Throws Error with code not_dicom, unsupported_transfer_syntax or
/// malformed.
std::pair<DicomHeader, std::vector<std::uint8_t>> parse_dicom_file(
    const std::vector<std::uint8_t>& bytes);

/// Header-only parse used for grouping. Tolerates encapsulated transfer
/// syntaxes (whose data sets are still explicit VR little endian) so that
/// such series can be reported as rejected rather than vanish from the scan.
DicomHeader parse_dicom_header(const std::vector<std::uint8_t>& bytes);

/// Converts raw pixel bytes per the header's representation and rescale tags:
/// value = slope * raw + intercept, stored as float32.
Grid<float> hu_convert(const DicomHeader& header, const std::vector<std::uint8_t>& payload);

/// Walks root recursively, grouping parseable DICOM files by series UID.
/// Deterministic: file paths sorted before parsing, output sorted by
/// (patient_id, series_uid).
ScanResult scan_directory(const std::filesystem::path& root);

/// Full parse of every file, HU conversion, and z-sort (ties broken by
/// instance number). Throws Error with code missing_geometry,
/// malformed_series or unsupported_transfer_syntax.
SortedSeries assemble_series(const SeriesRecord& record);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace veyes
