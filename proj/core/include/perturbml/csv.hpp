// Copyright 2026 The perturbml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PERTURBML_CSV_HPP_
#define PERTURBML_CSV_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace perturbml {

// 17 significant digits, enough to round-trip any double bit-exactly.
std::string format_double(double value);

// RFC 4180 quoting: fields containing commas, quotes or newlines are wrapped
// in double quotes with embedded quotes doubled.
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace perturbml

#endif  // PERTURBML_CSV_HPP_
