#pragma once

#include <stdexcept>
#include <string>

namespace veyes {

enum class errc {
  io_error,
  not_dicom,
  unsupported_transfer_syntax,
  malformed,
  missing_geometry,
  malformed_series,
  duplicate_output,
  schema_error,
  label_conflict,
  range_error,
  empty_input,
  length_mismatch,
  degenerate_labels,
  degenerate_variance,
  config_error,
};

const char* to_string(errc code);

/// Exception carrying one of the pipeline's error codes.
class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  explicit Error(errc code) : Error(code, "") {}

  errc code() const { return code_; }

private:
  errc code_;
};

}  // namespace veyes
