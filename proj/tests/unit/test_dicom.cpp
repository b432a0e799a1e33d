#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "veyes/dicom.hpp"
#include "veyes/error.hpp"

#include "support/dicom_fixture.hpp"
#include "support/rng.hpp"

using namespace veyes;
using namespace testsupport;

namespace {

std::filesystem::path make_temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool throws_code(errc code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("parse_dicom_file: explicit VR fixture round-trips every field") {
  FixtureSpec spec;
  spec.rows = 4;
  spec.cols = 4;
  spec.pixel_representation = 1;
  spec.instance_number = 12;
  spec.position = std::array<double, 3>{-1.5, 2.0, 37.5};
  spec.pixels.assign(16, 0);
  spec.pixels[0] = -2000;
  spec.pixels[5] = 1024;

  auto [header, payload] = parse_dicom_file(FixtureWriter(spec).bytes());
  CHECK(header.series_uid == spec.series_uid);
  CHECK(header.sop_uid == spec.sop_uid);
  CHECK(header.patient_id == spec.patient_id);
  CHECK(header.transfer_syntax_uid == spec.transfer_syntax);
  CHECK(header.rows == 4);
  CHECK(header.cols == 4);
  CHECK(header.bits_allocated == 16);
  CHECK(header.pixel_representation == PixelRepresentation::signed_int);
  CHECK(header.rescale_slope == 1.0);
  CHECK(header.rescale_intercept == -1024.0);
  REQUIRE(header.image_position_patient.has_value());
  CHECK((*header.image_position_patient)[2] == 37.5);
  CHECK(header.instance_number == 12);
  CHECK(payload.size() == 32);  // 4*4*2 bytes

  Grid<float> hu = hu_convert(header, payload);
  CHECK(hu(0, 0) == -3024.0f);  // -2000 - 1024
  CHECK(hu(1, 1) == 0.0f);      // 1024 - 1024
  CHECK(hu(0, 1) == -1024.0f);  // raw 0
}

TEST_CASE("parse_dicom_file: implicit VR and unknown tags are handled") {
  FixtureSpec spec;
  spec.transfer_syntax = "1.2.840.10008.1.2";
  spec.include_unknown_tags = true;
  spec.include_sequence = true;
  spec.pixels.assign(16, 100);
  auto [header, payload] = parse_dicom_file(FixtureWriter(spec).bytes());
  CHECK(header.series_uid == spec.series_uid);
  CHECK(payload.size() == 32);
}

TEST_CASE("parse_dicom_file: explicit VR with sequence and unknown tags") {
  FixtureSpec spec;
  spec.include_unknown_tags = true;
  spec.include_sequence = true;
  spec.pixels.assign(16, 7);
  auto [header, payload] = parse_dicom_file(FixtureWriter(spec).bytes());
  CHECK(header.patient_id == "P001");
  CHECK(payload[0] == 7);
}

TEST_CASE("parse_dicom_file: fixture round-trip holds under random headers") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    FixtureSpec spec;
    spec.transfer_syntax = trial % 2 ? "1.2.840.10008.1.2" : "1.2.840.10008.1.2.1";
    spec.rows = static_cast<std::uint16_t>(uniform_int(rng, 1, 12));
    spec.cols = static_cast<std::uint16_t>(uniform_int(rng, 1, 12));
    spec.bits_allocated = trial % 3 ? 16 : 8;
    spec.pixel_representation = static_cast<std::uint16_t>(trial % 2);
    spec.series_uid = "1.2.3." + std::to_string(trial);
    spec.patient_id = "P" + std::to_string(trial);
    spec.instance_number = uniform_int(rng, 1, 500);
    spec.position = std::array<double, 3>{0.0, 0.0, uniform(rng, -400.0, 400.0)};
    spec.rescale_slope = std::to_string(uniform_int(rng, 1, 3));
    spec.rescale_intercept = std::to_string(-uniform_int(rng, 0, 2000));
    std::size_t n = static_cast<std::size_t>(spec.rows) * spec.cols;
    for (std::size_t i = 0; i < n; ++i)
      spec.pixels.push_back(static_cast<std::int16_t>(uniform_int(rng, 0, 127)));

    auto [header, payload] = parse_dicom_file(FixtureWriter(spec).bytes());
    CHECK(header.series_uid == spec.series_uid);
    CHECK(header.patient_id == spec.patient_id);
    CHECK(header.rows == spec.rows);
    CHECK(header.cols == spec.cols);
    CHECK(header.bits_allocated == spec.bits_allocated);
    CHECK(header.instance_number == spec.instance_number);
    CHECK(payload.size() == n * (spec.bits_allocated / 8));
  }
}

TEST_CASE("parse_dicom_file: error taxonomy") {
  FixtureSpec spec;
  spec.pixels.assign(16, 0);
  auto good = FixtureWriter(spec).bytes();

  SUBCASE("broken magic is NOT_DICOM") {
    auto bad = good;
    bad[130] = 'X';
    CHECK(throws_code(errc::not_dicom, [&] { parse_dicom_file(bad); }));
  }
  SUBCASE("short file is NOT_DICOM") {
    std::vector<std::uint8_t> tiny(50, 0);
    CHECK(throws_code(errc::not_dicom, [&] { parse_dicom_file(tiny); }));
  }
  SUBCASE("JPEG transfer syntax is unsupported for pixel parsing") {
    FixtureSpec jpeg = spec;
    jpeg.transfer_syntax = "1.2.840.10008.1.2.4.50";
    auto bytes = FixtureWriter(jpeg).bytes();
    CHECK(throws_code(errc::unsupported_transfer_syntax, [&] { parse_dicom_file(bytes); }));
    // Header-only parse still recovers grouping metadata.
    DicomHeader h = parse_dicom_header(bytes);
    CHECK(h.series_uid == spec.series_uid);
    CHECK(h.transfer_syntax_uid == "1.2.840.10008.1.2.4.50");
  }
  SUBCASE("big-endian syntax cannot be parsed at all") {
    FixtureSpec be = spec;
    be.transfer_syntax = "1.2.840.10008.1.2.2";
    auto bytes = FixtureWriter(be).bytes();
    CHECK(throws_code(errc::unsupported_transfer_syntax, [&] { parse_dicom_header(bytes); }));
  }
  SUBCASE("pixel payload shorter than declared is MALFORMED") {
    FixtureSpec cut = spec;
    cut.truncate_pixels = true;
    auto bytes = FixtureWriter(cut).bytes();
    CHECK(throws_code(errc::malformed, [&] { parse_dicom_file(bytes); }));
  }
  SUBCASE("file truncated mid-element is MALFORMED") {
    auto bytes = good;
    bytes.resize(bytes.size() - 20);
    CHECK(throws_code(errc::malformed, [&] { parse_dicom_file(bytes); }));
  }
  SUBCASE("non-unit orientation cosines are MALFORMED") {
    FixtureSpec skew = spec;
    skew.orientation = std::array<double, 6>{2, 0, 0, 0, 1, 0};
    auto bytes = FixtureWriter(skew).bytes();
    CHECK(throws_code(errc::malformed, [&] { parse_dicom_file(bytes); }));
  }
  SUBCASE("overflowing rescale slope is MALFORMED") {
    FixtureSpec inf_slope = spec;
    inf_slope.rescale_slope = "1e400";
    auto bytes = FixtureWriter(inf_slope).bytes();
    CHECK(throws_code(errc::malformed, [&] { parse_dicom_file(bytes); }));
  }
}

TEST_CASE("hu_convert: affine map at float32 precision") {
  DicomHeader h;
  h.rows = 1;
  h.cols = 3;
  h.bits_allocated = 16;
  h.pixel_representation = PixelRepresentation::unsigned_int;
  h.rescale_slope = 1.0;
  h.rescale_intercept = -1024.0;
  std::vector<std::uint8_t> payload{0, 0, 0x00, 0x04, 0x64, 0x00};  // 0, 1024, 100
  Grid<float> hu = hu_convert(h, payload);
  CHECK(hu(0, 0) == -1024.0f);
  CHECK(hu(0, 1) == 0.0f);

  h.rescale_slope = 2.0;
  h.rescale_intercept = -1000.0;
  Grid<float> hu2 = hu_convert(h, payload);
  CHECK(hu2(0, 2) == -800.0f);  // 2*100 - 1000
}

TEST_CASE("hu_convert: affine relations hold at float32 granularity") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    DicomHeader h;
    h.rows = 1;
    h.cols = 1;
    h.bits_allocated = 16;
    h.pixel_representation = PixelRepresentation::signed_int;
    // Slope/intercept exactly representable in float32.
    h.rescale_slope = uniform_int(rng, 1, 4) * 0.5;
    h.rescale_intercept = -static_cast<double>(uniform_int(rng, 0, 4096));

    auto convert_one = [&](std::int16_t raw) {
      std::uint16_t u = static_cast<std::uint16_t>(raw);
      std::vector<std::uint8_t> payload{static_cast<std::uint8_t>(u & 0xFF),
                                        static_cast<std::uint8_t>(u >> 8)};
      return hu_convert(h, payload)(0, 0);
    };
    std::int16_t raw = static_cast<std::int16_t>(uniform_int(rng, -2048, 2048));
    float expected = static_cast<float>(h.rescale_slope * raw + h.rescale_intercept);
    CHECK(convert_one(raw) == expected);
    // Unit raw step changes the output by exactly the slope.
    CHECK(convert_one(static_cast<std::int16_t>(raw + 2)) - convert_one(raw) ==
          doctest::Approx(2.0 * h.rescale_slope).epsilon(1e-6));
  }
}

TEST_CASE("scan_directory: random corpus grouping is a partition") {
  auto dir = make_temp_dir("veyes_scan_partition");
  std::mt19937_64 rng(123);
  int dicom_files = 0, junk_files = 0;
  std::map<std::string, int> per_series;
  for (int i = 0; i < 40; ++i) {
    if (uniform01(rng) < 0.25) {
      std::ofstream(dir / ("junk" + std::to_string(i) + ".bin")) << "x";
      ++junk_files;
      continue;
    }
    int series = uniform_int(rng, 0, 4);
    FixtureSpec spec;
    spec.series_uid = "1.2.3." + std::to_string(series);
    spec.patient_id = "P" + std::to_string(series % 3);
    spec.sop_uid = spec.series_uid + "." + std::to_string(i);
    spec.instance_number = i + 1;
    spec.position = std::array<double, 3>{0, 0, i * 1.0};
    spec.pixels.assign(16, 0);
    FixtureWriter(spec).write(dir / ("f" + std::to_string(i) + ".dcm"));
    ++dicom_files;
    ++per_series[spec.series_uid];
  }

  ScanResult scan = scan_directory(dir);
  CHECK(scan.files_examined == dicom_files + junk_files);
  CHECK(scan.skipped_count == junk_files);
  CHECK(scan.series.size() == per_series.size());
  std::size_t grouped = 0;
  for (const auto& rec : scan.series) {
    CHECK(rec.files.size() == static_cast<std::size_t>(per_series[rec.series_uid]));
    grouped += rec.files.size();
  }
  CHECK(grouped == static_cast<std::size_t>(dicom_files));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scan_directory: grouping, skip counting, determinism") {
  auto dir = make_temp_dir("veyes_scan_test");

  auto write_slice = [&](const std::string& series, const std::string& patient,
                         const std::string& name, int instance) {
    FixtureSpec spec;
    spec.series_uid = series;
    spec.patient_id = patient;
    spec.sop_uid = series + "." + std::to_string(instance);
    spec.instance_number = instance;
    spec.position = std::array<double, 3>{0, 0, instance * 5.0};
    spec.pixels.assign(16, 0);
    FixtureWriter(spec).write(dir / name);
  };
  write_slice("1.2.9", "PB", "b1.dcm", 1);
  write_slice("1.2.9", "PB", "b2.dcm", 2);
  write_slice("1.2.9", "PB", "b3.dcm", 3);
  write_slice("1.2.5", "PA", "a1.dcm", 1);
  std::ofstream(dir / "notes.txt") << "not a dicom";

  ScanResult scan = scan_directory(dir);
  CHECK(scan.files_examined == 5);
  CHECK(scan.skipped_count == 1);
  REQUIRE(scan.series.size() == 2);
  CHECK(scan.series[0].patient_id == "PA");  // sorted by (patient, series)
  CHECK(scan.series[0].files.size() == 1);
  CHECK(scan.series[1].patient_id == "PB");
  CHECK(scan.series[1].files.size() == 3);

  std::size_t grouped = 0;
  for (const auto& rec : scan.series) grouped += rec.files.size();
  CHECK(grouped + scan.skipped_count == static_cast<std::size_t>(scan.files_examined));

  CHECK(throws_code(errc::io_error, [&] { scan_directory(dir / "missing"); }));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scan_directory: empty directory") {
  auto dir = make_temp_dir("veyes_scan_empty");
  ScanResult scan = scan_directory(dir);
  CHECK(scan.series.empty());
  CHECK(scan.skipped_count == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("assemble_series: z-sort with instance-number tie break") {
  auto dir = make_temp_dir("veyes_assemble_test");
  auto write_slice = [&](const std::string& name, double z, int instance) {
    FixtureSpec spec;
    spec.sop_uid = "1.2.3.4." + std::to_string(instance) + "." + name;
    spec.instance_number = instance;
    spec.position = std::array<double, 3>{0, 0, z};
    spec.pixels.assign(16, static_cast<std::int16_t>(instance));
    FixtureWriter(spec).write(dir / name);
  };
  write_slice("s1.dcm", 30.0, 1);
  write_slice("s2.dcm", 10.0, 2);
  write_slice("s3.dcm", 20.0, 3);
  write_slice("s4.dcm", 20.0, 7);  // tie at z=20
  // instance 5 written after 7 but lower: must sort before it.
  write_slice("s5.dcm", 20.0, 5);

  ScanResult scan = scan_directory(dir);
  REQUIRE(scan.series.size() == 1);
  SortedSeries series = assemble_series(scan.series[0]);
  REQUIRE(series.slices.size() == 5);
  CHECK(series.slices[0].z == 10.0);
  CHECK(series.slices[1].z == 20.0);
  CHECK(series.slices[1].data(0, 0) == doctest::Approx(3 - 1024));  // lowest instance first
  CHECK(series.slices[2].data(0, 0) == doctest::Approx(5 - 1024));
  CHECK(series.slices[3].data(0, 0) == doctest::Approx(7 - 1024));
  CHECK(series.slices[4].z == 30.0);
  CHECK(series.orientation == OrientationStatus::axial);
  std::filesystem::remove_all(dir);
}

TEST_CASE("assemble_series: output independent of enumeration order") {
  auto dir = make_temp_dir("veyes_assemble_order");
  for (int i = 0; i < 6; ++i) {
    FixtureSpec spec;
    spec.sop_uid = "1.2.3.4." + std::to_string(i);
    spec.instance_number = i + 1;
    spec.position = std::array<double, 3>{0, 0, i * 2.5};
    spec.pixels.assign(16, static_cast<std::int16_t>(i));
    FixtureWriter(spec).write(dir / ("f" + std::to_string(i) + ".dcm"));
  }
  ScanResult scan = scan_directory(dir);
  REQUIRE(scan.series.size() == 1);

  SeriesRecord reversed = scan.series[0];
  std::reverse(reversed.files.begin(), reversed.files.end());
  SortedSeries a = assemble_series(scan.series[0]);
  SortedSeries b = assemble_series(reversed);
  REQUIRE(a.slices.size() == b.slices.size());
  for (std::size_t i = 0; i < a.slices.size(); ++i) {
    CHECK(a.slices[i].z == b.slices[i].z);
    CHECK(a.slices[i].source_sop_uid == b.slices[i].source_sop_uid);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("assemble_series: error reasons") {
  SUBCASE("slice with neither position nor instance number") {
    auto dir = make_temp_dir("veyes_assemble_nogeom");
    FixtureSpec spec;
    spec.instance_number.reset();
    spec.position.reset();
    spec.pixels.assign(16, 0);
    FixtureWriter(spec).write(dir / "f.dcm");
    ScanResult scan = scan_directory(dir);
    REQUIRE(scan.series.size() == 1);
    CHECK(throws_code(errc::missing_geometry, [&] { assemble_series(scan.series[0]); }));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("mixed matrix sizes") {
    auto dir = make_temp_dir("veyes_assemble_mixed");
    FixtureSpec a;
    a.position = std::array<double, 3>{0, 0, 0};
    a.pixels.assign(16, 0);
    FixtureWriter(a).write(dir / "a.dcm");
    FixtureSpec b = a;
    b.sop_uid = "1.2.3.4.101";
    b.rows = 8;
    b.cols = 8;
    b.position = std::array<double, 3>{0, 0, 5};
    b.pixels.assign(64, 0);
    FixtureWriter(b).write(dir / "b.dcm");
    ScanResult scan = scan_directory(dir);
    REQUIRE(scan.series.size() == 1);
    CHECK(throws_code(errc::malformed_series, [&] { assemble_series(scan.series[0]); }));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("missing position falls back to instance order") {
    auto dir = make_temp_dir("veyes_assemble_instonly");
    for (int i : {3, 1, 2}) {
      FixtureSpec spec;
      spec.sop_uid = "1.2.3.4." + std::to_string(i);
      spec.instance_number = i;
      spec.position.reset();
      spec.pixels.assign(16, static_cast<std::int16_t>(i));
      FixtureWriter(spec).write(dir / ("f" + std::to_string(i) + ".dcm"));
    }
    ScanResult scan = scan_directory(dir);
    SortedSeries series = assemble_series(scan.series[0]);
    REQUIRE(series.slices.size() == 3);
    CHECK(series.slices[0].data(0, 0) == doctest::Approx(1 - 1024));
    CHECK(series.slices[2].data(0, 0) == doctest::Approx(3 - 1024));
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("non-axial and missing orientation classification") {
  auto dir = make_temp_dir("veyes_orientation");
  FixtureSpec sagittal;
  sagittal.orientation = std::array<double, 6>{0, 1, 0, 0, 0, -1};
  sagittal.position = std::array<double, 3>{0, 0, 0};
  sagittal.pixels.assign(16, 0);
  FixtureWriter(sagittal).write(dir / "sag.dcm");
  ScanResult scan = scan_directory(dir);
  SortedSeries series = assemble_series(scan.series[0]);
  CHECK(series.orientation == OrientationStatus::non_axial);
  std::filesystem::remove_all(dir);

  auto dir2 = make_temp_dir("veyes_orientation_none");
  FixtureSpec missing;
  missing.orientation.reset();
  missing.position = std::array<double, 3>{0, 0, 0};
  missing.pixels.assign(16, 0);
  FixtureWriter(missing).write(dir2 / "none.dcm");
  ScanResult scan2 = scan_directory(dir2);
  SortedSeries series2 = assemble_series(scan2.series[0]);
  CHECK(series2.orientation == OrientationStatus::unknown);
  std::filesystem::remove_all(dir2);
}
