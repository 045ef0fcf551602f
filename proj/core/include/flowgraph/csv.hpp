#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace flowgraph::csv {

// Minimal RFC-4180 style CSV. Fields may be quoted with '"', embedded quotes
// are doubled. Rows are '\n' terminated; a trailing '\r' is stripped.
std::vector<std::string> split_row(const std::string& line);
std::string join_row(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row padded/checked against header
};

Table read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Table& table);

}  // namespace flowgraph::csv
