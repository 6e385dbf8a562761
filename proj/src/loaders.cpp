#include "cpdp/corpus.hpp"

#include "cpdp/csv.hpp"
#include "cpdp/error.hpp"
#include "cpdp/text.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace cpdp {
namespace {

struct Column {
  std::string name;
  enum class Kind { Numeric, Nominal, Text } kind = Kind::Numeric;
  std::vector<std::string> nominal_values;
};

struct RawTable {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
};

bool same_name(const std::string& a, const std::string& b) {
  return text::lower(text::trim(a)) == text::lower(text::trim(b));
}

Project build_project(const RawTable& table, const SchemaConfig& config, const std::string& name,
                      const std::string& family) {
  const auto& cols = table.columns;
  std::size_t label_index = cols.size() - 1;
  std::string label_name = config.label_column;
  if (label_name.empty()) {
    label_name = cols.back().name;
  } else {
    bool found = false;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (same_name(cols[j].name, label_name)) {
        label_index = j;
        found = true;
        break;
      }
    }
    if (!found) throw DataError("missing label column '" + label_name + "'");
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j == label_index) continue;
    bool ignored = false;
    for (const auto& ig : config.ignored_columns) ignored = ignored || same_name(ig, cols[j].name);
    if (ignored) continue;
    if (cols[j].kind == Column::Kind::Text) {
      throw DataError("attribute '" + cols[j].name + "' is not numeric or nominal");
    }
    feature_cols.push_back(j);
    feature_names.push_back(text::trim(cols[j].name));
  }
  if (table.rows.empty()) throw DataError("empty file");
  if (feature_cols.empty()) throw DataError("no feature columns");

  FeatureSchema schema(std::move(feature_names), cols[label_index].name, config.alias_map);

  const auto m = static_cast<Eigen::Index>(table.rows.size());
  Matrix matrix(m, static_cast<Eigen::Index>(feature_cols.size()));
  Labels labels(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = " at line " + std::to_string(table.row_lines[i]);
    if (row.size() != cols.size()) throw DataError("row arity mismatch" + where);

    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto& col = cols[feature_cols[k]];
      const std::string cell = text::trim(row[feature_cols[k]]);
      double value = 0.0;
      if (cell.empty() || cell == "?") {
        throw DataError("missing value in column '" + col.name + "'" + where);
      }
      if (col.kind == Column::Kind::Nominal) {
        auto it = std::find(col.nominal_values.begin(), col.nominal_values.end(), cell);
        if (it == col.nominal_values.end()) {
          throw DataError("unknown value token '" + cell + "' in column '" + col.name + "'" + where);
        }
        value = static_cast<double>(it - col.nominal_values.begin());
      } else {
        auto parsed = text::parse_double(cell);
        if (!parsed) {
          throw DataError("non-numeric feature cell '" + cell + "' in column '" + col.name + "'" +
                          where);
        }
        if (!std::isfinite(*parsed)) {
          throw DataError("non-finite value in column '" + col.name + "'" + where);
        }
        value = *parsed;
      }
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = value;
    }

    const auto& label_col = cols[label_index];
    const std::string label_cell = text::trim(row[label_index]);
    if (label_col.kind == Column::Kind::Nominal &&
        std::find(label_col.nominal_values.begin(), label_col.nominal_values.end(), label_cell) ==
            label_col.nominal_values.end()) {
      throw DataError("unknown value token '" + label_cell + "' in label column" + where);
    }
    try {
      labels[i] = binarize_label(label_cell);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + where);
    }
  }
  return Project(name, family, std::move(schema), std::move(matrix), std::move(labels));
}

std::string default_name(const std::string& name, const std::filesystem::path& path) {
  return name.empty() ? path.stem().string() : name;
}

// Splits an ARFF data row or nominal list on commas, honouring ' and " quoting.
std::vector<std::string> split_arff_values(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && i + 1 < line.size()) {
        field.push_back(line[++i]);
      } else if (c == quote) {
        quote = 0;
      } else {
        field.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ',') {
      out.push_back(text::trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quote) throw DataError("unterminated quote");
  out.push_back(text::trim(field));
  return out;
}

Column parse_attribute(const std::string& line, std::size_t line_no) {
  const std::string where = " at line " + std::to_string(line_no);
  std::string rest = text::trim(std::string_view(line).substr(std::string_view("@attribute").size()));
  if (rest.empty()) throw DataError("malformed attribute declaration" + where);

  Column col;
  std::size_t pos = 0;
  if (rest[0] == '\'' || rest[0] == '"') {
    const auto close = rest.find(rest[0], 1);
    if (close == std::string::npos) throw DataError("malformed attribute declaration" + where);
    col.name = rest.substr(1, close - 1);
    pos = close + 1;
  } else {
    pos = rest.find_first_of(" \t{");
    if (pos == std::string::npos) throw DataError("malformed attribute declaration" + where);
    col.name = rest.substr(0, pos);
  }
  const std::string type = text::trim(std::string_view(rest).substr(pos));
  if (type.empty()) throw DataError("malformed attribute declaration" + where);

  if (type.front() == '{') {
    if (type.back() != '}') throw DataError("malformed attribute declaration" + where);
    col.kind = Column::Kind::Nominal;
    col.nominal_values = split_arff_values(std::string_view(type).substr(1, type.size() - 2));
    for (const auto& v : col.nominal_values) {
      if (v.empty()) throw DataError("malformed attribute declaration" + where);
    }
    return col;
  }
  const std::string kind = text::lower(type.substr(0, type.find_first_of(" \t")));
  if (kind == "numeric" || kind == "real" || kind == "integer") {
    col.kind = Column::Kind::Numeric;
  } else if (kind == "string" || kind == "date") {
    col.kind = Column::Kind::Text;
  } else {
    throw DataError("malformed attribute declaration" + where);
  }
  return col;
}

}  // namespace

Project load_csv(const std::filesystem::path& path, const SchemaConfig& config,
                 const std::string& name, const std::string& dataset_family) {
  auto records = csv::read_file(path);
  if (records.empty()) throw DataError(path.string() + ": empty file");

  RawTable table;
  for (const auto& header : records.front().fields) table.columns.push_back(Column{text::trim(header), Column::Kind::Numeric, {}});
  for (std::size_t r = 1; r < records.size(); ++r) {
    table.row_lines.push_back(records[r].line);
    table.rows.push_back(std::move(records[r].fields));
  }
  try {
    return build_project(table, config, default_name(name, path), dataset_family);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Project load_arff(const std::filesystem::path& path, const SchemaConfig& config,
                  const std::string& name, const std::string& dataset_family) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  RawTable table;
  bool relation = false;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, raw)) {
      ++line_no;
      if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
      const std::string line = text::trim(raw);
      if (line.empty() || line.front() == '%') continue;
      if (!in_data) {
        const std::string head = text::lower(line.substr(0, line.find_first_of(" \t")));
        if (head == "@relation") {
          relation = true;
        } else if (head == "@attribute") {
          table.columns.push_back(parse_attribute(line, line_no));
        } else if (head == "@data") {
          if (!relation || table.columns.empty()) {
            throw DataError("@data before @relation/@attribute declarations");
          }
          in_data = true;
        } else {
          throw DataError("unexpected header line " + std::to_string(line_no));
        }
        continue;
      }
      if (line.front() == '{') {
        throw DataError("sparse ARFF data is not supported (line " + std::to_string(line_no) + ")");
      }
      table.rows.push_back(split_arff_values(line));
      table.row_lines.push_back(line_no);
    }
    if (!in_data) throw DataError("missing @data section");
    return build_project(table, config, default_name(name, path), dataset_family);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace cpdp
