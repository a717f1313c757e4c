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

#ifndef DNTI_MILP_MPS_HPP_
#define DNTI_MILP_MPS_HPP_

#include <string>

#include "dnti/milp/model.hpp"

namespace dnti::milp {

// Fixed-format MPS. Field columns: type 2-3, name 5-12, name 15-22,
// number 25-36, name 40-47, number 50-61. One coefficient per line.
// Names that are empty, longer than 8 characters, contain blanks, collide
// with another name or look like a generated name are replaced by C<index>
// (columns) or R<index> (rows) with a zero-padded 7-digit index. Numbers
// are written in shortest round-trip form; the rare value that needs more
// than 12 characters overflows its field rather than losing precision.
std::string export_mps(const MilpModel& model, const std::string& name = "DNTI");

// Whitespace-token reader for the subset written by export_mps plus
// MARKER integer blocks and the usual bound types. Throws ParseError with
// line and section context.
MilpModel import_mps(const std::string& text);

}  // namespace dnti::milp

#endif  // DNTI_MILP_MPS_HPP_
