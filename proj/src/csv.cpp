#include "cpdp/csv.hpp"

#include "cpdp/error.hpp"
#include "cpdp/text.hpp"

#include <fstream>
#include <sstream>

namespace cpdp::csv {

std::vector<Record> parse(std::string content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.erase(0, 3);

  std::vector<Record> records;
  Record record;
  std::string field;
  bool quoted = false;
  bool started = false;
  std::size_t line = 1;
  record.line = 1;

  auto end_record = [&] {
    record.fields.push_back(std::move(field));
    field.clear();
    const bool blank = record.fields.size() == 1 && !started && text::trim(record.fields[0]).empty();
    if (!blank) records.push_back(std::move(record));
    record = Record{};
    started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        started = true;
        break;
      case ',':
        record.fields.push_back(std::move(field));
        field.clear();
        started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        record.line = ++line;
        break;
      default:
        field.push_back(c);
        started = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  if (started || !field.empty() || !record.fields.empty()) end_record();
  return records;
}

std::vector<Record> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace cpdp::csv
