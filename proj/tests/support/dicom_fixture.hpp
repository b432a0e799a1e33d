#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

// Byte-level DICOM Part-10 writer used to build test fixtures. Kept separate
// from the production parser on purpose: round-trip tests are only meaningful
// when the two sides share no code.
namespace testsupport {

struct FixtureSpec {
  std::string transfer_syntax = "1.2.840.10008.1.2.1";  // explicit VR LE
  std::string sop_uid = "1.2.3.4.100";
  std::string patient_id = "P001";
  std::string series_uid = "1.2.3.4";
  std::uint16_t rows = 4;
  std::uint16_t cols = 4;
  std::uint16_t bits_allocated = 16;
  std::uint16_t pixel_representation = 1;  // signed
  std::optional<std::string> rescale_slope = "1";
  std::optional<std::string> rescale_intercept = "-1024";
  std::optional<std::array<double, 3>> position;  // ImagePositionPatient
  std::optional<std::array<double, 6>> orientation =
      std::array<double, 6>{1, 0, 0, 0, 1, 0};
  std::optional<int> instance_number = 1;
  std::vector<std::int16_t> pixels;  // rows*cols values (low byte used for 8-bit)
  bool include_unknown_tags = false;
  bool include_sequence = false;  // undefined-length SQ the parser must skip
  bool truncate_pixels = false;
};

class FixtureWriter {
public:
  explicit FixtureWriter(const FixtureSpec& spec) : spec_(spec) {}

  std::vector<std::uint8_t> bytes() const {
    std::vector<std::uint8_t> out(128, 0);
    append_text(out, "DICM");
    append_meta(out);
    append_dataset(out);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    auto data = bytes();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  }

private:
  static void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
  }

  static void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 24) & 0xFF);
  }

  static void append_text(std::vector<std::uint8_t>& out, const std::string& s) {
    out.insert(out.end(), s.begin(), s.end());
  }

  static std::string padded(std::string value, char pad) {
    if (value.size() % 2) value.push_back(pad);
    return value;
  }

  // Explicit VR element with a short (2-byte) length field.
  static void explicit_short(std::vector<std::uint8_t>& out, std::uint16_t group,
                             std::uint16_t element, const char* vr,
                             const std::string& value) {
    append_u16(out, group);
    append_u16(out, element);
    out.push_back(vr[0]);
    out.push_back(vr[1]);
    append_u16(out, static_cast<std::uint16_t>(value.size()));
    append_text(out, value);
  }

  static void explicit_short_u16(std::vector<std::uint8_t>& out, std::uint16_t group,
                                 std::uint16_t element, std::uint16_t value) {
    append_u16(out, group);
    append_u16(out, element);
    out.push_back('U');
    out.push_back('S');
    append_u16(out, 2);
    append_u16(out, value);
  }

  static void implicit_element(std::vector<std::uint8_t>& out, std::uint16_t group,
                               std::uint16_t element, const std::string& value) {
    append_u16(out, group);
    append_u16(out, element);
    append_u32(out, static_cast<std::uint32_t>(value.size()));
    append_text(out, value);
  }

  static void implicit_u16(std::vector<std::uint8_t>& out, std::uint16_t group,
                           std::uint16_t element, std::uint16_t value) {
    append_u16(out, group);
    append_u16(out, element);
    append_u32(out, 2);
    append_u16(out, value);
  }

  static std::string decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
  }

  void append_meta(std::vector<std::uint8_t>& out) const {
    std::vector<std::uint8_t> meta;
    explicit_short(meta, 0x0002, 0x0002, "UI",
                   padded("1.2.840.10008.5.1.4.1.1.2", '\0'));  // CT Image Storage
    explicit_short(meta, 0x0002, 0x0003, "UI", padded(spec_.sop_uid, '\0'));
    explicit_short(meta, 0x0002, 0x0010, "UI", padded(spec_.transfer_syntax, '\0'));
    explicit_short(meta, 0x0002, 0x0013, "SH", padded("QC_FIXTURE", ' '));

    append_u16(out, 0x0002);
    append_u16(out, 0x0000);
    out.push_back('U');
    out.push_back('L');
    append_u16(out, 4);
    append_u32(out, static_cast<std::uint32_t>(meta.size()));
    out.insert(out.end(), meta.begin(), meta.end());
  }

  void append_dataset(std::vector<std::uint8_t>& out) const {
    const bool explicit_vr = spec_.transfer_syntax != "1.2.840.10008.1.2";

    auto str_el = [&](std::uint16_t g, std::uint16_t e, const char* vr,
                      const std::string& value, char pad) {
      if (explicit_vr) explicit_short(out, g, e, vr, padded(value, pad));
      else implicit_element(out, g, e, padded(value, pad));
    };
    auto u16_el = [&](std::uint16_t g, std::uint16_t e, std::uint16_t value) {
      if (explicit_vr) explicit_short_u16(out, g, e, value);
      else implicit_u16(out, g, e, value);
    };

    str_el(0x0008, 0x0018, "UI", spec_.sop_uid, '\0');
    if (spec_.include_unknown_tags)
      str_el(0x0008, 0x0060, "CS", "CT", ' ');  // Modality: parser must skip
    str_el(0x0010, 0x0020, "LO", spec_.patient_id, ' ');

    if (spec_.include_sequence) append_sequence(out, explicit_vr);

    str_el(0x0020, 0x000E, "UI", spec_.series_uid, '\0');
    if (spec_.instance_number)
      str_el(0x0020, 0x0013, "IS", std::to_string(*spec_.instance_number), ' ');
    if (spec_.position) {
      std::string v = decimal((*spec_.position)[0]) + "\\" +
                      decimal((*spec_.position)[1]) + "\\" +
                      decimal((*spec_.position)[2]);
      str_el(0x0020, 0x0032, "DS", v, ' ');
    }
    if (spec_.orientation) {
      std::string v;
      for (int i = 0; i < 6; ++i) {
        if (i) v += "\\";
        v += decimal((*spec_.orientation)[i]);
      }
      str_el(0x0020, 0x0037, "DS", v, ' ');
    }
    u16_el(0x0028, 0x0010, spec_.rows);
    u16_el(0x0028, 0x0011, spec_.cols);
    u16_el(0x0028, 0x0100, spec_.bits_allocated);
    u16_el(0x0028, 0x0103, spec_.pixel_representation);
    if (spec_.rescale_intercept) str_el(0x0028, 0x1052, "DS", *spec_.rescale_intercept, ' ');
    if (spec_.rescale_slope) str_el(0x0028, 0x1053, "DS", *spec_.rescale_slope, ' ');

    std::vector<std::uint8_t> pixel_bytes;
    const std::size_t count = static_cast<std::size_t>(spec_.rows) * spec_.cols;
    pixel_bytes.reserve(count * 2);
    for (std::size_t i = 0; i < count; ++i) {
      std::int16_t v = i < spec_.pixels.size() ? spec_.pixels[i] : 0;
      std::uint16_t u = static_cast<std::uint16_t>(v);
      pixel_bytes.push_back(u & 0xFF);
      if (spec_.bits_allocated == 16) pixel_bytes.push_back(u >> 8);
    }
    if (spec_.truncate_pixels && pixel_bytes.size() > 8)
      pixel_bytes.resize(pixel_bytes.size() - 8);

    append_u16(out, 0x7FE0);
    append_u16(out, 0x0010);
    if (explicit_vr) {
      out.push_back('O');
      out.push_back(spec_.bits_allocated == 16 ? 'W' : 'B');
      append_u16(out, 0);  // reserved
      append_u32(out, static_cast<std::uint32_t>(pixel_bytes.size()));
    } else {
      append_u32(out, static_cast<std::uint32_t>(pixel_bytes.size()));
    }
    out.insert(out.end(), pixel_bytes.begin(), pixel_bytes.end());
  }

  // Undefined-length SQ with one undefined-length item holding one element.
  void append_sequence(std::vector<std::uint8_t>& out, bool explicit_vr) const {
    append_u16(out, 0x0008);
    append_u16(out, 0x1140);  // ReferencedImageSequence
    if (explicit_vr) {
      out.push_back('S');
      out.push_back('Q');
      append_u16(out, 0);
    }
    append_u32(out, 0xFFFFFFFFu);

    append_u16(out, 0xFFFE);
    append_u16(out, 0xE000);  // item, undefined length
    append_u32(out, 0xFFFFFFFFu);

    if (explicit_vr)
      explicit_short(out, 0x0008, 0x1150, "UI", padded("1.2.840.10008.5.1.4.1.1.2", '\0'));
    else
      implicit_element(out, 0x0008, 0x1150, padded("1.2.840.10008.5.1.4.1.1.2", '\0'));

    append_u16(out, 0xFFFE);
    append_u16(out, 0xE00D);  // item delimiter
    append_u32(out, 0);
    append_u16(out, 0xFFFE);
    append_u16(out, 0xE0DD);  // sequence delimiter
    append_u32(out, 0);
  }

  FixtureSpec spec_;
};

}  // namespace testsupport
