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
#ifndef SPARSEDET_CSV_H_
#define SPARSEDET_CSV_H_

#include <cstddef>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sparsedet {

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line number
  std::vector<std::string> fields;
};

// Splits one CSV record. Double-quoted fields may contain commas and ""
// escapes; embedded newlines are not supported.
std::vector<std::string> SplitCsvLine(std::string_view line);

// Line-oriented reader that skips blank lines and strips a trailing '\r'.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  bool Next(CsvRow& row);
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

// Strict numeric parsing: the whole field must be consumed. Throws
// ParseError citing `source` and `line`.
double ParseDouble(std::string_view field, const std::string& source,
                   std::size_t line, std::string_view column);
long long ParseInt(std::string_view field, const std::string& source,
                   std::size_t line, std::string_view column);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double v);

// Quotes the field only when it contains a comma, quote, or whitespace edge.
std::string CsvEscape(std::string_view field);

// Throws IoError when the file cannot be opened.
std::ifstream OpenInput(const std::string& path);
std::ofstream OpenOutput(const std::string& path);

// Throws ParseError unless `row` starts with `expected` (extra trailing
// columns are allowed).
void ExpectHeader(const CsvRow& row, const std::vector<std::string>& expected,
                  const std::string& source);

}  // namespace sparsedet

#endif  // SPARSEDET_CSV_H_
