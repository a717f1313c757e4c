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

#ifndef DNTI_IDENTIFY_HPP_
#define DNTI_IDENTIFY_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dnti/formulation.hpp"
#include "dnti/milp/model.hpp"
#include "dnti/netmodel.hpp"
#include "dnti/simkit.hpp"

namespace dnti {

struct TopologyEstimate {
  Scheme scheme = Scheme::kProposed;
  milp::SolveStatus solver_status = milp::SolveStatus::kInfeasible;
  // Empty maps when the solver returned no solution.
  std::map<int, bool> statuses;
  std::map<int, bool> on_harmonic_path;
  std::map<int, Phasor> estimated_fundamental;
  std::map<HarmonicKey, Phasor> estimated_harmonic;
  double objective = 0.0;
  double gap = 0.0;
  std::int64_t nodes_explored = 0;
  std::int64_t lp_iterations = 0;
  double wall_seconds = 0.0;
  // Constraint families violated by the ground-truth point, filled when a
  // ground truth is supplied and the solve did not end optimal.
  std::map<std::string, double> truth_violations;

  bool has_solution() const { return !statuses.empty(); }
  // Optimal or stopped at the requested gap.
  bool solved() const;
  std::vector<int> open_branches() const;
  std::vector<int> path_branches() const;
  Topology topology() const;
};

TopologyEstimate identify(Scheme scheme, const Network& net,
                          const MeasurementSet& meas, const TiParameters& params,
                          const milp::SolveOptions& opts = {},
                          const GroundTruth* truth = nullptr);
// Same with a precomputed loop set (enumerate_loops(net)).
TopologyEstimate identify(Scheme scheme, const Network& net,
                          const std::vector<Loop>& loops,
                          const MeasurementSet& meas, const TiParameters& params,
                          const milp::SolveOptions& opts = {},
                          const GroundTruth* truth = nullptr);

struct ObservabilityReport {
  bool sufficient = false;
  std::vector<Loop> loops_without_pmu;
  std::vector<int> nodes_without_source;
};

// Sufficient condition only: every independent loop holds a PMU branch and
// every non-substation node hosts a harmonic source.
ObservabilityReport check_observability(const Network& net,
                                        const std::vector<int>& pmu_branches,
                                        const std::vector<int>& source_nodes);

// flag = |Re| + |Im| >= c for any order on the branch.
std::map<int, bool> detect_paths(
    const std::map<HarmonicKey, Phasor>& harmonic_branch, double c);

}  // namespace dnti

#endif  // DNTI_IDENTIFY_HPP_
