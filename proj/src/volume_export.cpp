#include "veyes/volume_export.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "veyes/error.hpp"

namespace veyes {

namespace {

constexpr char kNpyMagic[] = "\x93NUMPY";

std::string npy_header_text(int depth, int rows, int cols) {
  std::string dict = "{'descr': '<i2', 'fortran_order': False, 'shape': (" +
                     std::to_string(depth) + ", " + std::to_string(rows) + ", " +
                     std::to_string(cols) + "), }";
  // magic(6) + version(2) + header length field(2) + header text, padded with
  // spaces to a 64-byte multiple, terminated by '\n'.
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t total = (unpadded + 63) / 64 * 64;
  dict.append(total - unpadded, ' ');
  dict += '\n';
  return dict;
}

}  // namespace

void write_npy_int16(const LungBlock& block, const std::filesystem::path& path) {
  std::string header = npy_header_text(block.depth, block.rows, block.cols);
  assert(header.size() <= 0xFFFF);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");

  out.write(kNpyMagic, 6);
  out.put('\x01');
  out.put('\x00');
  std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  out.put(static_cast<char>(hlen & 0xFF));
  out.put(static_cast<char>(hlen >> 8));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::vector<char> buf(block.voxels.size() * 2);
  for (std::size_t i = 0; i < block.voxels.size(); ++i) {
    std::uint16_t v = static_cast<std::uint16_t>(block.voxels[i]);
    buf[2 * i] = static_cast<char>(v & 0xFF);
    buf[2 * i + 1] = static_cast<char>(v >> 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw Error(errc::io_error, "write failed: " + path.string());
}

LungBlock read_npy_int16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());

  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kNpyMagic, 6) != 0)
    throw Error(errc::malformed, "not an NPY file: " + path.string());
  if (magic[6] != 1 || magic[7] != 0)
    throw Error(errc::malformed, "unsupported NPY version");

  unsigned char len_bytes[2];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 2))
    throw Error(errc::malformed, "truncated NPY header");
  std::size_t hlen = len_bytes[0] | (len_bytes[1] << 8);
  std::string header(hlen, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(hlen)))
    throw Error(errc::malformed, "truncated NPY header");

  if (header.find("'descr': '<i2'") == std::string::npos)
    throw Error(errc::malformed, "expected dtype '<i2'");
  if (header.find("'fortran_order': False") == std::string::npos)
    throw Error(errc::malformed, "expected C-order data");

  auto open_paren = header.find('(');
  auto close_paren = header.find(')');
  if (open_paren == std::string::npos || close_paren == std::string::npos)
    throw Error(errc::malformed, "missing shape tuple");
  std::string shape = header.substr(open_paren + 1, close_paren - open_paren - 1);
  int dims[3];
  if (std::sscanf(shape.c_str(), "%d , %d , %d", &dims[0], &dims[1], &dims[2]) != 3 ||
      dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
    throw Error(errc::malformed, "expected 3-D shape, got (" + shape + ")");

  LungBlock block;
  block.depth = dims[0];
  block.rows = dims[1];
  block.cols = dims[2];
  block.start = 0;
  block.end = dims[0] - 1;
  std::size_t count = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<char> buf(count * 2);
  if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw Error(errc::malformed, "truncated NPY data section");

  block.voxels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = static_cast<std::uint8_t>(buf[2 * i]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[2 * i + 1])) << 8);
    block.voxels[i] = static_cast<std::int16_t>(v);
  }
  return block;
}

std::filesystem::path export_block(const SeriesOutcome& outcome, const LungBlock& block,
                                   const std::filesystem::path& out_root, bool overwrite) {
  assert(outcome.accepted);
  std::filesystem::path dir = out_root / outcome.patient_id / outcome.series_uid;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

  std::filesystem::path target = dir / "lung_block.npy";
  if (!overwrite && std::filesystem::exists(target))
    throw Error(errc::duplicate_output, target.string());
  write_npy_int16(block, target);
  return target;
}

std::uint8_t window_rescale(double hu, const WindowConfig& cfg) {
  assert(cfg.width > 0);
  double lower = cfg.center - cfg.width / 2.0;
  double v = std::clamp(hu, lower, lower + cfg.width);
  double scaled = (v - lower) / cfg.width * 255.0;
  return static_cast<std::uint8_t>(std::lround(scaled));
}

void write_montage_pgm(const LungBlock& block, const std::filesystem::path& path,
                       int columns, const WindowConfig& cfg) {
  assert(columns >= 1);
  int tile_rows = (block.depth + columns - 1) / columns;
  int width = columns * block.cols;
  int height = tile_rows * block.rows;

  std::vector<std::uint8_t> image(static_cast<std::size_t>(width) * height, 0);
  for (int d = 0; d < block.depth; ++d) {
    int tr = d / columns, tc = d % columns;
    for (int r = 0; r < block.rows; ++r) {
      std::size_t row_base =
          (static_cast<std::size_t>(tr) * block.rows + r) * width +
          static_cast<std::size_t>(tc) * block.cols;
      for (int c = 0; c < block.cols; ++c)
        image[row_base + c] = window_rescale(block.at(d, r, c), cfg);
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()),
            static_cast<std::streamsize>(image.size()));
  out.flush();
  if (!out) throw Error(errc::io_error, "write failed: " + path.string());
}

}  // namespace veyes
