#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace veyes::csv {

/// RFC-4180 field quoting: quotes only when the field needs it.
std::string escape_field(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

/// Parses CSV text into rows of fields. Handles quoted fields, embedded
/// commas/quotes/newlines, and both LF and CRLF row endings.
std::vector<std::vector<std::string>> parse(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace veyes::csv
