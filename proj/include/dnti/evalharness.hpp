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


#ifndef DNTI_EVALHARNESS_HPP_
#define DNTI_EVALHARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dnti/formulation.hpp"
#include "dnti/milp/model.hpp"
#include "dnti/netmodel.hpp"
#include "dnti/simkit.hpp"
#include "json.hpp"

namespace dnti {

enum class SweepAxis {
  kPseudoErrorPct,
  kPmuTvePct,
  kHarmonicTvePct,
  kSourceTvePct,
  kThresholdFraction,
  kNSources,
};

const char* to_string(SweepAxis axis);
// Throws ParseError for unknown names.
SweepAxis parse_sweep_axis(const std::string& text);

struct Experiment {
  std::string name;
  ScenarioConfig base;
  SweepAxis axis = SweepAxis::kPseudoErrorPct;
  // Percent for every axis except n_sources (a count).
  std::vector<double> values;
  std::vector<Scheme> schemes;
  int iterations = 100;
  std::uint64_t seed = 1;
  TiParameters params;
  milp::SolveOptions solve;
  // Same scenario seeds at every sweep value, so cells differ only in the
  // swept parameter.
  bool common_random_numbers = true;
  // Draws a fresh radial topology per iteration instead of base.topology.
  bool randomize_topology = false;
  // Passes the harmonic PMU TVE bound on to the solver as sign hints.
  bool sign_hints = true;
  // Node whose base source current the n_sources axis replicates.
  int reference_node = 11;
  // Free text carried into the metadata document.
  std::string notes;

  // Throws DomainError.
  void validate(const Network& net) const;
};

struct EvalDetail {
  Scheme scheme = Scheme::kProposed;
  std::size_t sweep_index = 0;
  double sweep_value = 0.0;
  int iteration = 0;
  std::uint64_t seed = 0;
  bool correct = false;
  // Solver stopped on a node, time or iteration limit.
  bool limit_hit = false;
  milp::SolveStatus status = milp::SolveStatus::kInfeasible;
  double objective = 0.0;
  std::int64_t nodes = 0;
  double wall_seconds = 0.0;
  // Build or solve error message, empty otherwise.
  std::string error;
};

struct EvalCell {
  Scheme scheme = Scheme::kProposed;
  double sweep_value = 0.0;
  int n_total = 0;
  int n_correct = 0;
  double accuracy_pct = 0.0;
};

struct ImplicationViolation {
  std::size_t sweep_index = 0;
  int iteration = 0;
};

struct EvalReport {
  std::string name;
  SweepAxis axis = SweepAxis::kPseudoErrorPct;
  // Scheme-major, then sweep order.
  std::vector<EvalCell> cells;
  // Ordered by (sweep index, iteration, scheme order of the experiment).
  std::vector<EvalDetail> details;
  // Iterations where harmonic_only and traditional were both correct but
  // proposed was not. Only checked when all three schemes ran.
  std::vector<ImplicationViolation> implication_violations;

  const EvalCell* cell(Scheme scheme, double sweep_value) const;
};

// Worker count from DNTI_THREADS, else the hardware concurrency, at least 1.
int worker_threads();

// Scenario and solver parameters of one (sweep value, iteration) task.
struct TrialSetup {
  ScenarioConfig scenario;
  TiParameters params;
};
TrialSetup make_trial(const Experiment& exp, const Network& net,
                      std::size_t sweep_index, int iteration);

EvalReport run_experiment(const Experiment& exp, const Network& net,
                          int threads = 0);

// Names: fig6, fig7, fig_fund_tve, fig8a, fig8b, fig9, fig10. fig7 is an
// alias of fig_fund_tve. Throws ParseError for unknown names.
Experiment preset(const std::string& name, const ScenarioConfig& base);
std::vector<std::string> preset_names();

// Summary table: scheme,sweep_value,n_total,n_correct,accuracy_pct.
std::string emit_csv(const EvalReport& report);
// One row per (sweep value, iteration, scheme). Wall time is left out so the
// file is byte-stable across reruns.
std::string emit_detail_csv(const EvalReport& report);
std::string emit_timing_csv(const EvalReport& report);
// Experiment configuration plus the noise assumptions of the preset.
nlohmann::json experiment_to_json(const Experiment& exp);
// `scenario` may be omitted, in which case default_base is used. A `preset`
// key starts from that preset and overrides the fields present.
Experiment experiment_from_json(const Network& net, const nlohmann::json& j,
                                const ScenarioConfig& default_base);
Experiment load_experiment_file(const Network& net, const std::string& path,
                                const ScenarioConfig& default_base);

// Shortest decimal rendering with at most 6 significant digits.
std::string format_number(double value);

}  // namespace dnti

#endif  // DNTI_EVALHARNESS_HPP_
