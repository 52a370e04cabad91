#include "loadscope/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "loadscope/errors.hpp"

namespace loadscope::csv {

void Document::require_header(const std::vector<std::string>& expected) const {
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(Errc::SchemaError, source + ":1: expected header '" + want + "'");
  }
}

Document parse(std::string_view text, std::string source) {
  Document doc;
  doc.source = std::move(source);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> starts;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    bool blank = record.size() == 1 && record[0].empty() && !field_started;
    if (!blank) {
      rows.push_back(std::move(record));
      starts.push_back(record_line);
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(line) + ": stray quote");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(line) + ": unterminated quote");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (rows.empty()) throw Error(Errc::SchemaError, doc.source + ":1: missing header row");
  doc.header = std::move(rows.front());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != doc.header.size()) {
      throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(starts[r]) + ": expected " +
                                         std::to_string(doc.header.size()) + " fields, found " +
                                         std::to_string(rows[r].size()));
    }
    doc.records.push_back(std::move(rows[r]));
    doc.lines.push_back(starts[r]);
  }
  return doc;
}

Document read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const Document& doc, std::size_t record) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::SchemaError,
                doc.source + ":" + std::to_string(doc.lines.at(record)) + ": not a number '" + std::string(text) + "'");
  }
  return value;
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out_ << '"';
      for (char c : f) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    } else {
      out_ << f;
    }
  }
  out_ << '\n';
}

}  // namespace loadscope::csv

namespace loadscope::csv {

FileWriter::FileWriter(const std::filesystem::path& path) : writer_(file_) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file_.open(path, std::ios::binary | std::ios::trunc);
  if (!file_) throw Error(Errc::Internal, "cannot write " + path.string());
}

}  // namespace loadscope::csv
