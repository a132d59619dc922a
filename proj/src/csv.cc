// Copyright 2026 The sparsedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "sparsedet/csv.h"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "sparsedet/errors.h"

namespace sparsedet {

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

bool CsvReader::Next(CsvRow& row) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    row.line = line_;
    row.fields = SplitCsvLine(text);
    return true;
  }
  return false;
}

double ParseDouble(std::string_view field, const std::string& source,
                   std::size_t line, std::string_view column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  // from_chars rejects a leading '+', which some writers emit.
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError(source, line,
                     "column " + std::string(column) + ": '" +
                         std::string(field) + "' is not a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError(source, line,
                     "column " + std::string(column) + " is not finite");
  }
  return value;
}

long long ParseInt(std::string_view field, const std::string& source,
                   std::size_t line, std::string_view column) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError(source, line,
                     "column " + std::string(column) + ": '" +
                         std::string(field) + "' is not an integer");
  }
  return value;
}

std::string FormatDouble(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string CsvEscape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\n") != std::string_view::npos ||
      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void ExpectHeader(const CsvRow& row, const std::vector<std::string>& expected,
                  const std::string& source) {
  bool ok = row.fields.size() >= expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = row.fields[i] == expected[i];
  }
  if (!ok) {
    std::string want;
    for (const auto& col : expected) {
      if (!want.empty()) want += ",";
      want += col;
    }
    throw ParseError(source, row.line, "expected header " + want);
  }
}

}  // namespace sparsedet
