#include "veyes/dicom.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "veyes/error.hpp"
#include "veyes/util.hpp"

namespace veyes {

namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;

struct Tag {
  std::uint16_t group;
  std::uint16_t element;
  bool operator==(const Tag&) const = default;
};

constexpr Tag kTransferSyntax{0x0002, 0x0010};
constexpr Tag kSopInstanceUid{0x0008, 0x0018};
constexpr Tag kPatientId{0x0010, 0x0020};
constexpr Tag kSeriesInstanceUid{0x0020, 0x000E};
constexpr Tag kInstanceNumber{0x0020, 0x0013};
constexpr Tag kImagePositionPatient{0x0020, 0x0032};
constexpr Tag kImageOrientationPatient{0x0020, 0x0037};
constexpr Tag kRows{0x0028, 0x0010};
constexpr Tag kColumns{0x0028, 0x0011};
constexpr Tag kBitsAllocated{0x0028, 0x0100};
constexpr Tag kPixelRepresentation{0x0028, 0x0103};
constexpr Tag kRescaleIntercept{0x0028, 0x1052};
constexpr Tag kRescaleSlope{0x0028, 0x1053};
constexpr Tag kPixelData{0x7FE0, 0x0010};
constexpr Tag kItem{0xFFFE, 0xE000};
constexpr Tag kItemDelimiter{0xFFFE, 0xE00D};
constexpr Tag kSequenceDelimiter{0xFFFE, 0xE0DD};

class Reader {
public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }
  bool eof() const { return pos_ >= size_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) throw Error(errc::malformed, std::string("truncated ") + what);
  }

  std::uint8_t u8() {
    require(1, "byte");
    return data_[pos_++];
  }

  std::uint16_t u16() {
    require(2, "uint16");
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                      static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    require(4, "uint32");
    std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                      static_cast<std::uint32_t>(data_[pos_ + 1]) << 8 |
                      static_cast<std::uint32_t>(data_[pos_ + 2]) << 16 |
                      static_cast<std::uint32_t>(data_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }

  Tag tag() {
    std::uint16_t g = u16();
    std::uint16_t e = u16();
    return Tag{g, e};
  }

  Tag peek_tag() const {
    Reader copy = *this;
    return copy.tag();
  }

  const std::uint8_t* bytes(std::size_t n, const char* what) {
    require(n, what);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  void skip(std::size_t n, const char* what) {
    require(n, what);
    pos_ += n;
  }

private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

struct Element {
  Tag tag;
  std::string vr;  // empty for implicit VR
  std::uint32_t length;
  const std::uint8_t* value;  // nullptr for undefined-length elements
};

bool has_long_length(const std::string& vr) {
  // VRs with the 2-byte reserved field + 4-byte length form.
  return vr == "OB" || vr == "OW" || vr == "OF" || vr == "OD" || vr == "OL" ||
         vr == "OV" || vr == "SQ" || vr == "UC" || vr == "UR" || vr == "UT" ||
         vr == "UN" || vr == "SV" || vr == "UV";
}

void skip_sequence_items(Reader& r, bool explicit_vr);

/// Reads one data element header + value. For undefined-length elements the
/// nested items are skipped and value is null.
Element read_element(Reader& r, bool explicit_vr) {
  Element el{};
  el.tag = r.tag();

  if (el.tag == kItemDelimiter || el.tag == kSequenceDelimiter || el.tag == kItem) {
    el.length = r.u32();
    el.value = nullptr;
    return el;
  }

  if (explicit_vr) {
    const std::uint8_t* vr_bytes = r.bytes(2, "VR");
    el.vr.assign(reinterpret_cast<const char*>(vr_bytes), 2);
    if (!std::isupper(static_cast<unsigned char>(el.vr[0])) ||
        !std::isupper(static_cast<unsigned char>(el.vr[1])))
      throw Error(errc::malformed, "bad VR bytes");
    if (has_long_length(el.vr)) {
      r.skip(2, "VR reserved bytes");
      el.length = r.u32();
    } else {
      el.length = r.u16();
    }
  } else {
    el.length = r.u32();
  }

  if (el.length == kUndefinedLength) {
    el.value = nullptr;
    // Only sequences (and encapsulated pixel data) may carry undefined
    // length; both are skipped item-by-item.
    skip_sequence_items(r, explicit_vr);
  } else {
    el.value = r.bytes(el.length, "element value");
  }
  return el;
}

/// Consumes items up to and including the sequence delimiter.
void skip_sequence_items(Reader& r, bool explicit_vr) {
  for (;;) {
    Tag t = r.tag();
    std::uint32_t len = r.u32();
    if (t == kSequenceDelimiter) return;
    if (t != kItem) throw Error(errc::malformed, "expected item tag in sequence");
    if (len != kUndefinedLength) {
      r.skip(len, "sequence item");
      continue;
    }
    // Undefined-length item: walk nested elements until the item delimiter.
    for (;;) {
      Tag nested = r.peek_tag();
      if (nested == kItemDelimiter) {
        r.tag();
        r.u32();
        break;
      }
      read_element(r, explicit_vr);
    }
  }
}

std::string element_string(const Element& el) {
  if (!el.value) return "";
  return trim(std::string(reinterpret_cast<const char*>(el.value), el.length));
}

std::uint16_t element_u16(const Element& el) {
  if (!el.value || el.length < 2) throw Error(errc::malformed, "short US value");
  return static_cast<std::uint16_t>(el.value[0]) |
         static_cast<std::uint16_t>(el.value[1]) << 8;
}

std::vector<double> element_decimal_list(const Element& el) {
  std::vector<double> out;
  std::string s = element_string(el);
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t sep = s.find('\\', start);
    std::string token = trim(s.substr(start, sep == std::string::npos ? sep : sep - start));
    if (!token.empty()) {
      char* end = nullptr;
      double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str()) throw Error(errc::malformed, "bad decimal string: " + token);
      out.push_back(v);
    }
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return out;
}

std::optional<int> element_integer(const Element& el) {
  std::string s = element_string(el);
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str()) throw Error(errc::malformed, "bad integer string: " + s);
  return static_cast<int>(v);
}

/// Reads the 128-byte preamble + "DICM" magic and the file meta group
/// (always explicit VR little endian). Returns the transfer syntax UID and
/// leaves the reader at the start of the main data set.
std::string read_preamble_and_meta(Reader& r) {
  if (r.remaining() < 132) throw Error(errc::not_dicom, "file shorter than preamble");
  r.skip(128, "preamble");
  const std::uint8_t* magic = r.bytes(4, "magic");
  if (std::memcmp(magic, "DICM", 4) != 0) throw Error(errc::not_dicom, "missing DICM magic");

  std::string transfer_syntax;
  while (!r.eof()) {
    Tag next = r.peek_tag();
    if (next.group != 0x0002) break;
    Element el = read_element(r, /*explicit_vr=*/true);
    if (el.tag == kTransferSyntax) transfer_syntax = element_string(el);
  }
  if (transfer_syntax.empty())
    throw Error(errc::malformed, "file meta lacks transfer syntax UID");
  return transfer_syntax;
}

bool is_supported_syntax(const std::string& ts) {
  return ts == kImplicitVrLittleEndian || ts == kExplicitVrLittleEndian;
}

/// Encapsulated syntaxes encode the data set itself as explicit VR little
/// endian, so header tags stay readable even when pixels are not.
bool dataset_readable_as_explicit(const std::string& ts) {
  return ts.rfind("1.2.840.10008.1.2.4", 0) == 0 ||
         ts.rfind("1.2.840.10008.1.2.5", 0) == 0;
}

void validate_header(const DicomHeader& h) {
  if (h.rows <= 0 || h.cols <= 0)
    throw Error(errc::malformed, "missing or non-positive Rows/Columns");
  if (h.bits_allocated != 8 && h.bits_allocated != 16)
    throw Error(errc::malformed, "BitsAllocated must be 8 or 16");
  if (!std::isfinite(h.rescale_slope) || !std::isfinite(h.rescale_intercept))
    throw Error(errc::malformed, "non-finite rescale slope/intercept");
  if (h.image_orientation_patient) {
    const auto& o = *h.image_orientation_patient;
    double row_norm = std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]);
    double col_norm = std::sqrt(o[3] * o[3] + o[4] * o[4] + o[5] * o[5]);
    if (std::fabs(row_norm - 1.0) > 1e-3 || std::fabs(col_norm - 1.0) > 1e-3)
      throw Error(errc::malformed, "orientation cosines not unit norm");
  }
}

struct ParsedFile {
  DicomHeader header;
  std::vector<std::uint8_t> payload;
};

ParsedFile parse_impl(const std::vector<std::uint8_t>& bytes, bool need_pixels) {
  Reader r(bytes.data(), bytes.size());
  std::string ts = read_preamble_and_meta(r);

  bool supported = is_supported_syntax(ts);
  if (!supported) {
    if (need_pixels || !dataset_readable_as_explicit(ts))
      throw Error(errc::unsupported_transfer_syntax, ts);
  }
  bool explicit_vr = supported ? (ts == kExplicitVrLittleEndian) : true;

  DicomHeader h;
  h.transfer_syntax_uid = ts;
  std::vector<std::uint8_t> payload;

  while (!r.eof()) {
    if (r.remaining() < 8) throw Error(errc::malformed, "truncated element header");
    Element el = read_element(r, explicit_vr);
    if (el.tag == kSopInstanceUid) h.sop_uid = element_string(el);
    else if (el.tag == kPatientId) h.patient_id = element_string(el);
    else if (el.tag == kSeriesInstanceUid) h.series_uid = element_string(el);
    else if (el.tag == kInstanceNumber) h.instance_number = element_integer(el);
    else if (el.tag == kImagePositionPatient) {
      auto v = element_decimal_list(el);
      if (v.size() != 3) throw Error(errc::malformed, "ImagePositionPatient needs 3 values");
      h.image_position_patient = std::array<double, 3>{v[0], v[1], v[2]};
    } else if (el.tag == kImageOrientationPatient) {
      auto v = element_decimal_list(el);
      if (v.size() != 6) throw Error(errc::malformed, "ImageOrientationPatient needs 6 values");
      h.image_orientation_patient =
          std::array<double, 6>{v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (el.tag == kRows) h.rows = element_u16(el);
    else if (el.tag == kColumns) h.cols = element_u16(el);
    else if (el.tag == kBitsAllocated) h.bits_allocated = element_u16(el);
    else if (el.tag == kPixelRepresentation) {
      std::uint16_t v = element_u16(el);
      if (v > 1) throw Error(errc::malformed, "PixelRepresentation must be 0 or 1");
      h.pixel_representation =
          v ? PixelRepresentation::signed_int : PixelRepresentation::unsigned_int;
    } else if (el.tag == kRescaleIntercept) {
      auto v = element_decimal_list(el);
      if (!v.empty()) h.rescale_intercept = v[0];
    } else if (el.tag == kRescaleSlope) {
      auto v = element_decimal_list(el);
      if (!v.empty()) h.rescale_slope = v[0];
    } else if (el.tag == kPixelData) {
      if (!need_pixels) break;
      validate_header(h);
      std::size_t expected = static_cast<std::size_t>(h.rows) * h.cols *
                             (h.bits_allocated / 8);
      if (!el.value || el.length < expected)
        throw Error(errc::malformed, "pixel payload shorter than declared size");
      payload.assign(el.value, el.value + expected);
      break;
    }
  }

  validate_header(h);
  if (need_pixels && payload.empty())
    throw Error(errc::malformed, "no PixelData element");
  return {std::move(h), std::move(payload)};
}

OrientationStatus classify_orientation(const DicomHeader& h) {
  if (!h.image_orientation_patient) return OrientationStatus::unknown;
  const auto& o = *h.image_orientation_patient;
  const double kTol = 0.01;
  bool axial = std::fabs(o[0] - 1.0) <= kTol && std::fabs(o[1]) <= kTol &&
               std::fabs(o[2]) <= kTol && std::fabs(o[3]) <= kTol &&
               std::fabs(o[4] - 1.0) <= kTol && std::fabs(o[5]) <= kTol;
  return axial ? OrientationStatus::axial : OrientationStatus::non_axial;
}

}  // namespace

std::pair<DicomHeader, std::vector<std::uint8_t>> parse_dicom_file(
    const std::vector<std::uint8_t>& bytes) {
  ParsedFile f = parse_impl(bytes, /*need_pixels=*/true);
  return {std::move(f.header), std::move(f.payload)};
}

DicomHeader parse_dicom_header(const std::vector<std::uint8_t>& bytes) {
  return parse_impl(bytes, /*need_pixels=*/false).header;
}

Grid<float> hu_convert(const DicomHeader& header, const std::vector<std::uint8_t>& payload) {
  Grid<float> out(header.rows, header.cols);
  const std::size_t n = out.size();
  const double slope = header.rescale_slope;
  const double intercept = header.rescale_intercept;
  const bool is_signed = header.pixel_representation == PixelRepresentation::signed_int;

  if (header.bits_allocated == 8) {
    for (std::size_t i = 0; i < n; ++i) {
      double raw = is_signed ? static_cast<double>(static_cast<std::int8_t>(payload[i]))
                             : static_cast<double>(payload[i]);
      out[i] = static_cast<float>(slope * raw + intercept);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint16_t v = static_cast<std::uint16_t>(payload[2 * i]) |
                        static_cast<std::uint16_t>(payload[2 * i + 1]) << 8;
      double raw = is_signed ? static_cast<double>(static_cast<std::int16_t>(v))
                             : static_cast<double>(v);
      out[i] = static_cast<float>(slope * raw + intercept);
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::streamsize size = in.tellg();
  if (size < 0) throw Error(errc::io_error, "cannot stat " + path.string());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw Error(errc::io_error, "read failed: " + path.string());
  return bytes;
}

ScanResult scan_directory(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::exists(root, ec) || !std::filesystem::is_directory(root, ec))
    throw Error(errc::io_error, "not a readable directory: " + root.string());

  std::vector<std::filesystem::path> paths;
  for (auto it = std::filesystem::recursive_directory_iterator(
           root, std::filesystem::directory_options::skip_permission_denied, ec);
       it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw Error(errc::io_error, "directory walk failed: " + ec.message());
    if (it->is_regular_file()) paths.push_back(it->path());
  }
  std::sort(paths.begin(), paths.end());

  ScanResult result;
  std::map<std::string, SeriesRecord> by_uid;
  for (const auto& path : paths) {
    ++result.files_examined;
    DicomHeader h;
    bool unsupported = false;
    try {
      h = parse_dicom_header(read_file_bytes(path));
    } catch (const Error& e) {
      if (e.code() == errc::unsupported_transfer_syntax) {
        // Unreadable data set (e.g. big endian): nothing to group by.
        ++result.skipped_count;
        continue;
      }
      ++result.skipped_count;
      continue;
    }
    unsupported = !is_supported_syntax(h.transfer_syntax_uid);
    auto [it, inserted] = by_uid.try_emplace(h.series_uid);
    SeriesRecord& rec = it->second;
    if (inserted) {
      rec.series_uid = h.series_uid;
      rec.patient_id = h.patient_id;
    }
    rec.files.push_back(path);
    rec.unsupported_transfer_syntax |= unsupported;
  }

  for (auto& [uid, rec] : by_uid) result.series.push_back(std::move(rec));
  std::sort(result.series.begin(), result.series.end(),
            [](const SeriesRecord& a, const SeriesRecord& b) {
              return std::tie(a.patient_id, a.series_uid) <
                     std::tie(b.patient_id, b.series_uid);
            });
  return result;
}

SortedSeries assemble_series(const SeriesRecord& record) {
  if (record.unsupported_transfer_syntax)
    throw Error(errc::unsupported_transfer_syntax, record.series_uid);

  struct Entry {
    HuSlice slice;
    std::optional<double> z;
    std::optional<int> instance;
    OrientationStatus orientation;
  };
  std::vector<Entry> entries;
  entries.reserve(record.files.size());

  int rows = -1, cols = -1;
  for (const auto& path : record.files) {
    DicomHeader h;
    std::vector<std::uint8_t> payload;
    try {
      std::tie(h, payload) = parse_dicom_file(read_file_bytes(path));
    } catch (const Error& e) {
      if (e.code() == errc::unsupported_transfer_syntax) throw;
      throw Error(errc::malformed_series,
                  path.filename().string() + " (" + e.what() + ")");
    }
    if (rows < 0) {
      rows = h.rows;
      cols = h.cols;
    } else if (rows != h.rows || cols != h.cols) {
      throw Error(errc::malformed_series, "inconsistent matrix sizes in " + record.series_uid);
    }
    if (!h.image_position_patient && !h.instance_number)
      throw Error(errc::missing_geometry, path.filename().string());

    Entry e;
    e.z = h.image_position_patient
              ? std::optional<double>((*h.image_position_patient)[2])
              : std::nullopt;
    e.instance = h.instance_number;
    e.orientation = classify_orientation(h);
    e.slice.data = hu_convert(h, payload);
    e.slice.source_sop_uid = h.sop_uid;
    // Instance number stands in for z when position is absent.
    e.slice.z = e.z ? *e.z : static_cast<double>(*e.instance);
    entries.push_back(std::move(e));
  }

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.slice.z != b.slice.z) return a.slice.z < b.slice.z;
    int ia = a.instance.value_or(0);
    int ib = b.instance.value_or(0);
    return ia < ib;
  });

  SortedSeries series;
  series.series_uid = record.series_uid;
  series.patient_id = record.patient_id;
  series.rows = rows < 0 ? 0 : rows;
  series.cols = cols < 0 ? 0 : cols;

  bool any_unknown = false, any_non_axial = false;
  for (auto& e : entries) {
    if (e.orientation == OrientationStatus::unknown) any_unknown = true;
    if (e.orientation == OrientationStatus::non_axial) any_non_axial = true;
    series.slices.push_back(std::move(e.slice));
  }
  series.orientation = any_non_axial ? OrientationStatus::non_axial
                       : any_unknown ? OrientationStatus::unknown
                                     : OrientationStatus::axial;
  return series;
}

}  // namespace veyes
