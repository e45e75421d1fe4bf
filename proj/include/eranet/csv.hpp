#pragma once

// Minimal delimited-text reader/writer (RFC 4180 quoting).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eranet::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

struct Table {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column position by name, or -1.
  int column(std::string_view name) const;
};

/// Splits one record. Quoted fields may contain the delimiter and doubled quotes.
std::vector<std::string> split_line(std::string_view line, char delimiter);

/// Reads a headed file; delimiter is tab if the header line holds a tab,
/// otherwise comma. Blank lines are skipped. Throws Error(Parse) when the
/// file is unreadable or empty.
Table read_file(const std::filesystem::path& path);
Table read_stream(std::istream& in, std::string_view source_name);

std::string escape(std::string_view field, char delimiter = ',');

class Writer {
 public:
  explicit Writer(std::ostream& out, char delimiter = ',') : out_(out), delimiter_(delimiter) {}

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  char delimiter_;
};

}  // namespace eranet::csv
