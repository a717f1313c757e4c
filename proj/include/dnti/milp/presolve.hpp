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

#ifndef DNTI_MILP_PRESOLVE_HPP_
#define DNTI_MILP_PRESOLVE_HPP_

#include <vector>

#include "dnti/milp/model.hpp"

namespace dnti::milp {

struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;
  double lower = -kInf;
  double upper = kInf;
};

// Activity-based bound tightening over a fixed set of rows.
class Propagator {
 public:
  Propagator(const std::vector<SparseRow>* rows, std::vector<char> is_int,
             int num_cols);

  // Tightens lo/hi in place. Returns false when the domain is empty.
  bool propagate(std::vector<double>& lo, std::vector<double>& hi) const;

 private:
  bool tighten_row(int r, std::vector<double>& lo, std::vector<double>& hi,
                   std::vector<int>& changed) const;

  const std::vector<SparseRow>* rows_;
  std::vector<char> is_int_;
  std::vector<std::vector<int>> col_rows_;
};

// Root reduction: hints, bound propagation, fixed-column removal and
// redundant-row removal.
struct ReducedProblem {
  bool infeasible = false;
  int num_original = 0;
  std::vector<int> col_to_var;
  std::vector<int> var_to_col;  // -1 when removed
  std::vector<double> fixed_value;
  std::vector<SparseRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> cost;
  std::vector<char> is_int;
  std::vector<int> priority;
  double objective_offset = 0.0;

  int num_cols() const { return static_cast<int>(col_to_var.size()); }
  std::vector<double> postsolve(const std::vector<double>& reduced) const;
};

ReducedProblem presolve(const MilpModel& model, const SolveOptions& opts);

}  // namespace dnti::milp

#endif  // DNTI_MILP_PRESOLVE_HPP_
