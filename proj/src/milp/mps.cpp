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

#include "dnti/milp/mps.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "dnti/error.hpp"
#include "dnti/textio.hpp"

namespace dnti::milp {
namespace {

constexpr char kObjectiveRow[] = "COST";
constexpr double kMpsInfinity = 1e30;

bool looks_generated(const std::string& s) {
  if (s.size() != 8 || (s[0] != 'C' && s[0] != 'R')) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool usable(const std::string& s) {
  if (s.empty() || s.size() > 8 || looks_generated(s) || s == kObjectiveRow) {
    return false;
  }
  for (char ch : s) {
    if (!std::isgraph(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

template <typename Items, typename Get>
std::vector<std::string> mangle(const Items& items, char prefix, Get get) {
  std::map<std::string, int> count;
  for (const auto& item : items) ++count[get(item)];
  std::vector<std::string> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& name = get(items[i]);
    if (usable(name) && count[name] == 1) {
      out.push_back(name);
    } else {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%c%07zu", prefix, i);
      out.push_back(buf);
    }
  }
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string entry(const std::string& type, const std::string& name1,
                  const std::string& name2, const std::string& number) {
  std::string line = " " + pad(type, 2) + " " + pad(name1, 8);
  if (!name2.empty() || !number.empty()) line += "  " + pad(name2, 8);
  if (!number.empty()) line += "  " + number;
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line + "\n";
}

const char* sense_code(Sense s) {
  switch (s) {
    case Sense::kLessEqual:
      return "L";
    case Sense::kEqual:
      return "E";
    case Sense::kGreaterEqual:
      return "G";
  }
  return "E";
}

}  // namespace

std::string export_mps(const MilpModel& model, const std::string& name) {
  model.validate();
  const auto cols = mangle(model.variables(), 'C',
                           [](const Variable& v) -> const std::string& { return v.name; });
  const auto rows = mangle(model.constraints(), 'R',
                           [](const Constraint& c) -> const std::string& { return c.name; });

  std::vector<std::vector<std::pair<int, double>>> by_col(model.num_variables());
  for (int i = 0; i < model.num_constraints(); ++i) {
    for (const Term& t : model.constraint(i).terms) by_col[t.var].emplace_back(i, t.coef);
  }

  std::ostringstream out;
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << entry("N", kObjectiveRow, "", "");
  for (int i = 0; i < model.num_constraints(); ++i) {
    out << entry(sense_code(model.constraint(i).sense), rows[i], "", "");
  }
  out << "COLUMNS\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto obj = model.objective().find(j);
    if (obj != model.objective().end()) {
      out << entry("", cols[j], kObjectiveRow, format_double(obj->second));
    } else if (by_col[j].empty()) {
      out << entry("", cols[j], kObjectiveRow, "0");
    }
    for (const auto& [row, coef] : by_col[j]) {
      out << entry("", cols[j], rows[row], format_double(coef));
    }
  }
  out << "RHS\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const double rhs = model.constraint(i).rhs;
    if (rhs != 0.0) out << entry("", "RHS", rows[i], format_double(rhs));
  }
  out << "RANGES\n";
  out << "BOUNDS\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    const std::string& c = cols[j];
    if (v.kind == VarKind::kBinary) {
      out << entry("BV", "BND", c, "");
      if (v.lower != 0.0) out << entry("LO", "BND", c, format_double(v.lower));
      if (v.upper != 1.0) out << entry("UP", "BND", c, format_double(v.upper));
      continue;
    }
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (!lo_inf && v.lower == v.upper) {
      out << entry("FX", "BND", c, format_double(v.lower));
    } else if (lo_inf && hi_inf) {
      out << entry("FR", "BND", c, "");
    } else {
      if (lo_inf) {
        out << entry("MI", "BND", c, "");
      } else if (v.lower != 0.0) {
        out << entry("LO", "BND", c, format_double(v.lower));
      }
      if (!hi_inf) out << entry("UP", "BND", c, format_double(v.upper));
    }
  }
  out << "ENDATA\n";
  return out.str();
}

MilpModel import_mps(const std::string& text) {
  enum class Section { kNone, kName, kRows, kColumns, kRhs, kRanges, kBounds, kEnd };
  Section section = Section::kNone;
  std::string section_name = "header";
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("MPS line " + std::to_string(line_no) + " (" + section_name +
                     "): " + msg);
  };
  auto number = [&](const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || std::isnan(v)) fail("bad number '" + tok + "'");
    return v;
  };

  struct RowInfo {
    std::string name;
    Sense sense;
    double rhs = 0.0;
    std::vector<Term> terms;
  };
  std::string objective_row;
  std::map<std::string, int> row_index;
  std::vector<RowInfo> row_list;
  std::map<std::string, int> col_index;
  MilpModel model;
  std::map<int, double> objective;
  bool in_integer_block = false;

  auto column = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int id = in_integer_block ? model.add_binary(name)
                                    : model.add_continuous(name, 0.0, kInf);
    col_index[name] = id;
    return id;
  };
  auto existing_column = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it == col_index.end()) fail("unknown column '" + name + "'");
    return it->second;
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      section_name = head;
      if (head == "NAME") {
        section = Section::kName;
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "RANGES") {
        section = Section::kRanges;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        section = Section::kEnd;
        break;
      } else {
        fail("unknown section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) fail("expected row type and name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          continue;
        }
        Sense sense = Sense::kEqual;
        if (type == "L") {
          sense = Sense::kLessEqual;
        } else if (type == "G") {
          sense = Sense::kGreaterEqual;
        } else if (type != "E") {
          fail("unknown row type '" + type + "'");
        }
        if (row_index.count(tok[1])) fail("duplicate row '" + tok[1] + "'");
        row_index[tok[1]] = static_cast<int>(row_list.size());
        row_list.push_back(RowInfo{tok[1], sense, 0.0, {}});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            in_integer_block = true;
          } else if (tok[2] == "'INTEND'") {
            in_integer_block = false;
          } else {
            fail("unknown marker '" + tok[2] + "'");
          }
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("expected column, row, value");
        const int col = column(tok[0]);
        for (std::size_t p = 1; p + 1 < tok.size(); p += 2) {
          const double v = number(tok[p + 1]);
          if (tok[p] == objective_row) {
            objective[col] += v;
            continue;
          }
          auto it = row_index.find(tok[p]);
          if (it == row_index.end()) fail("unknown row '" + tok[p] + "'");
          if (v != 0.0) row_list[it->second].terms.push_back({col, v});
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) fail("expected set, row, value");
        for (std::size_t p = 1; p + 1 < tok.size(); p += 2) {
          const double v = number(tok[p + 1]);
          if (tok[p] == objective_row) continue;
          auto it = row_index.find(tok[p]);
          if (it == row_index.end()) fail("unknown row '" + tok[p] + "'");
          row_list[it->second].rhs = v;
        }
        break;
      }
      case Section::kRanges:
        fail("ranged rows are not supported");
        break;
      case Section::kBounds: {
        if (tok.size() < 3) fail("expected bound type, set, column");
        const std::string& type = tok[0];
        const int col = existing_column(tok[2]);
        Variable& v = model.mutable_variable(col);
        const bool needs_value = type == "UP" || type == "LO" || type == "FX";
        if (needs_value && tok.size() != 4) fail("bound type " + type + " needs a value");
        const double val = needs_value ? number(tok[3]) : 0.0;
        if (type == "UP") {
          v.upper = val >= kMpsInfinity ? kInf : val;
        } else if (type == "LO") {
          v.lower = val <= -kMpsInfinity ? -kInf : val;
        } else if (type == "FX") {
          v.lower = val;
          v.upper = val;
        } else if (type == "FR") {
          v.lower = -kInf;
          v.upper = kInf;
        } else if (type == "MI") {
          v.lower = -kInf;
        } else if (type == "PL") {
          v.upper = kInf;
        } else if (type == "BV") {
          v.kind = VarKind::kBinary;
          v.lower = 0.0;
          v.upper = 1.0;
        } else {
          fail("unsupported bound type '" + type + "'");
        }
        break;
      }
      case Section::kName:
      case Section::kNone:
      case Section::kEnd:
        fail("data outside a section");
        break;
    }
  }
  if (section != Section::kEnd) {
    section_name = "end";
    fail("missing ENDATA");
  }
  for (RowInfo& r : row_list) {
    model.add_constraint(r.name, std::move(r.terms), r.sense, r.rhs);
  }
  for (const auto& [col, coef] : objective) model.set_objective(col, coef);
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("MPS model invalid: ") + e.what());
  }
  return model;
}

}  // namespace dnti::milp
