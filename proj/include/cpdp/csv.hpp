#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cpdp::csv {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// RFC-4180 parsing: quoted fields may contain commas, line breaks and
/// doubled quotes. Blank lines are skipped; a UTF-8 BOM is dropped.
std::vector<Record> parse(std::string content);
std::vector<Record> read_file(const std::filesystem::path& path);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(const std::string& field);
std::string join(const std::vector<std::string>& fields);

}  // namespace cpdp::csv
