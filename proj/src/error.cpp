#include "veyes/error.hpp"

namespace veyes {

const char* to_string(errc code) {
  switch (code) {
    case errc::io_error: return "IO_ERROR";
    case errc::not_dicom: return "NOT_DICOM";
    case errc::unsupported_transfer_syntax: return "UNSUPPORTED_TRANSFER_SYNTAX";
    case errc::malformed: return "MALFORMED";
    case errc::missing_geometry: return "MISSING_GEOMETRY";
    case errc::malformed_series: return "MALFORMED_SERIES";
    case errc::duplicate_output: return "DUPLICATE_OUTPUT";
    case errc::schema_error: return "SCHEMA_ERROR";
    case errc::label_conflict: return "LABEL_CONFLICT";
    case errc::range_error: return "RANGE_ERROR";
    case errc::empty_input: return "EMPTY_INPUT";
    case errc::length_mismatch: return "LENGTH_MISMATCH";
    case errc::degenerate_labels: return "DEGENERATE_LABELS";
    case errc::degenerate_variance: return "DEGENERATE_VARIANCE";
    case errc::config_error: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace veyes
