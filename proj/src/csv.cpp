#include "veyes/csv.hpp"

#include <fstream>
#include <sstream>

#include "veyes/error.hpp"

namespace veyes::csv {

std::string escape_field(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape_field(fields[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  std::size_t i = 0;
  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(row);
    row.clear();
  };

  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
    } else if (c == '"' && field.empty() && !field_started) {
      in_quotes = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      end_field();
      field_started = false;
      ++i;
    } else if (c == '\n') {
      end_row();
      ++i;
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        end_row();
        i += 2;
      } else {
        end_row();
        ++i;
      }
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (in_quotes) throw Error(errc::schema_error, "unterminated quoted field");
  // Trailing content without a final newline still forms a row.
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(errc::io_error, "read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error(errc::io_error, "write failed: " + path.string());
}

}  // namespace veyes::csv
