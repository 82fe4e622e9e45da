// Copyright 2026 The Emorec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOREC_CSV_H_
#define EMOREC_CSV_H_

#include <fstream>
#include <string>
#include <vector>

namespace emorec {

// Minimal CSV support: comma-separated, optional double-quote quoting with
// "" escapes, UTF-8 passed through, \r\n tolerated.

// Splits one CSV line into fields. Throws ParseError on unbalanced quotes.
std::vector<std::string> split_csv_line(const std::string& line);

// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Line-oriented CSV file reader that tracks line numbers for error messages.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  // Reads the next non-empty row. Returns false at end of file.
  bool next(std::vector<std::string>* fields);

  int line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  int line_number_ = 0;
};

double parse_double_field(const std::string& field, const std::string& path,
                          int line, const std::string& column);

}  // namespace emorec

#endif  // EMOREC_CSV_H_
