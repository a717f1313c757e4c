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

#include "dnti/identify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "dnti/error.hpp"

namespace dnti {

bool TopologyEstimate::solved() const {
  return has_solution() && (solver_status == milp::SolveStatus::kOptimal ||
                            solver_status == milp::SolveStatus::kGapLimit);
}

std::vector<int> TopologyEstimate::open_branches() const {
  std::vector<int> out;
  for (const auto& [id, closed] : statuses) {
    if (!closed) out.push_back(id);
  }
  return out;
}

std::vector<int> TopologyEstimate::path_branches() const {
  std::vector<int> out;
  for (const auto& [id, flag] : on_harmonic_path) {
    if (flag) out.push_back(id);
  }
  return out;
}

Topology TopologyEstimate::topology() const {
  Topology t;
  t.closed = statuses;
  return t;
}

TopologyEstimate identify(Scheme scheme, const Network& net,
                          const MeasurementSet& meas, const TiParameters& params,
                          const milp::SolveOptions& opts,
                          const GroundTruth* truth) {
  return identify(scheme, net, enumerate_loops(net), meas, params, opts, truth);
}

TopologyEstimate identify(Scheme scheme, const Network& net,
                          const std::vector<Loop>& loops,
                          const MeasurementSet& meas, const TiParameters& params,
                          const milp::SolveOptions& opts,
                          const GroundTruth* truth) {
  const auto start = std::chrono::steady_clock::now();
  const Formulation f = build_model(scheme, net, meas, loops, params);
  const milp::MilpSolution sol = milp::solve(f.model, opts);

  TopologyEstimate est;
  est.scheme = scheme;
  est.solver_status = sol.status;
  est.nodes_explored = sol.nodes_explored;
  est.lp_iterations = sol.lp_iterations;
  if (sol.has_solution()) {
    est.objective = sol.objective;
    est.gap = sol.gap;
    const std::vector<double>& x = sol.values;
    for (const auto& [id, v] : f.vars.branch) {
      est.statuses[id] = x[v.s] > 0.5;
      if (v.b >= 0) est.on_harmonic_path[id] = x[v.b] > 0.5;
      if (v.i_re >= 0) est.estimated_fundamental[id] = Phasor(x[v.i_re], x[v.i_im]);
      if (v.h_re >= 0) {
        est.estimated_harmonic[{id, f.harmonic_order}] = Phasor(x[v.h_re], x[v.h_im]);
      }
    }
  }
  if (truth != nullptr && sol.status != milp::SolveStatus::kOptimal) {
    const std::vector<double> x = truth_assignment(f, net, *truth, meas, params);
    est.truth_violations = violated_families(f.model, x, 1e-6);
  }
  est.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

ObservabilityReport check_observability(const Network& net,
                                        const std::vector<int>& pmu_branches,
                                        const std::vector<int>& source_nodes) {
  ObservabilityReport report;
  const std::set<int> pmus(pmu_branches.begin(), pmu_branches.end());
  for (const Loop& loop : independent_loops(net)) {
    const bool covered = std::any_of(loop.branches.begin(), loop.branches.end(),
                                     [&](int id) { return pmus.count(id) != 0; });
    if (!covered) report.loops_without_pmu.push_back(loop);
  }
  const std::set<int> sources(source_nodes.begin(), source_nodes.end());
  for (int node = 2; node <= net.node_count(); ++node) {
    if (!sources.count(node)) report.nodes_without_source.push_back(node);
  }
  report.sufficient =
      report.loops_without_pmu.empty() && report.nodes_without_source.empty();
  return report;
}

std::map<int, bool> detect_paths(
    const std::map<HarmonicKey, Phasor>& harmonic_branch, double c) {
  if (!(c > 0.0)) throw DomainError("detect_paths threshold must be positive");
  std::map<int, bool> flags;
  for (const auto& [key, value] : harmonic_branch) {
    const bool on = std::abs(value.real()) + std::abs(value.imag()) >= c;
    flags[key.first] = flags[key.first] || on;
  }
  return flags;
}

}  // namespace dnti
