#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace loadscope::csv {

/// Parsed CSV document: header plus records. Line numbers are 1-based and
/// refer to the physical line where each record starts.
struct Document {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;

  /// Throws Error(SchemaError) unless the header equals `expected`.
  void require_header(const std::vector<std::string>& expected) const;
};

/// RFC 4180 reader (quoted fields, doubled quotes, CRLF). Header mandatory.
Document parse(std::string_view text, std::string source = "<memory>");
Document read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
double parse_double(std::string_view text, const Document& doc, std::size_t record);

/// Streams one CSV row, quoting fields when needed.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

/// Writer bound to a file; parent directories are created. Throws
/// Error(Internal) when the file cannot be opened.
class FileWriter {
 public:
  explicit FileWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& fields) { writer_.row(fields); }

 private:
  std::ofstream file_;
  Writer writer_;
};

}  // namespace loadscope::csv
