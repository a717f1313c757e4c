// Copyright 2026 The dnti Authors
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

#ifndef DNTI_TEXTIO_HPP_
#define DNTI_TEXTIO_HPP_

#include <string>

#include "json.hpp"

namespace dnti {

// Throws ParseError if the file cannot be read.
std::string read_text_file(const std::string& path);
// Throws DomainError if the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

// Parses JSON, converting syntax errors into ParseError with line/column
// context. `what` names the document kind in messages.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

// Shortest round-trippable decimal form of a double ("%.17g" fallback).
std::string format_double(double v);

}  // namespace dnti

#endif  // DNTI_TEXTIO_HPP_
