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

#ifndef DNTI_FORMULATION_HPP_
#define DNTI_FORMULATION_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnti/milp/model.hpp"
#include "dnti/netmodel.hpp"
#include "dnti/simkit.hpp"

namespace dnti {

enum class Scheme { kProposed, kHarmonicOnly, kTraditional };

const char* to_string(Scheme scheme);
// Accepts "proposed", "harmonic_only" (alias "harmonic") and "traditional".
// Throws ParseError otherwise.
Scheme parse_scheme(const std::string& text);

struct TiParameters {
  // Path threshold c as a fraction of z.
  double threshold_fraction = 0.25;
  // Big-M in amperes; compute_big_m is used when unset.
  std::optional<double> big_m;
  // Big-M of the harmonic sign and path rows; compute_harmonic_big_m is
  // used when unset.
  std::optional<double> harmonic_big_m;
  // Smallest source-combination magnitude; compute_z on the measured
  // sources is used when unset.
  std::optional<double> z;
  double denom_floor = 1e-3;
  int harmonic_order = 3;
  double harmonic_weight = 1.0;
  double fundamental_weight = 1.0;
  // TVE bound of the harmonic PMU channel. When set, the sign indicators of
  // metered components that cannot flip under this bound are handed to the
  // solver as fixing hints.
  std::optional<double> sign_hint_tve_pct;
  // Adds X >= +-Re/Im rows, which hold at every feasible point.
  bool valid_inequalities = true;

  void validate() const;
};

struct BranchVars {
  int i_re = -1;
  int i_im = -1;
  int h_re = -1;
  int h_im = -1;
  int x_r = -1;
  int x_i = -1;
  int x_h = -1;
  int w_r = -1;
  int w_i = -1;
  int q_r = -1;
  int q_i = -1;
  int b = -1;
  int s = -1;
};

struct PmuVars {
  int g_hr = -1;
  int g_hi = -1;
  int g_r = -1;
  int g_i = -1;
};

struct VarMap {
  std::map<int, BranchVars> branch;
  std::map<int, PmuVars> pmu;
};

struct Formulation {
  Scheme scheme = Scheme::kProposed;
  milp::MilpModel model;
  VarMap vars;
  int harmonic_order = 3;
  double z = 0.0;
  double c = 0.0;
  double big_m = 0.0;
  double harmonic_big_m = 0.0;
};

// Smallest magnitude over all non-empty source subsets, skipping subsets
// that cancel below 1e-9 of the largest source. Throws DomainError for an
// empty list, mixed orders, more than 20 sources or total cancellation.
double compute_z(const std::vector<HarmonicSource>& sources);

// 10 x (sum of pseudo injection magnitudes + sum of source magnitudes),
// at least 1.
double compute_big_m(const Network& net, const MeasurementSet& meas);

// 10 x max(sum of measured source magnitudes of the order, z).
double compute_harmonic_big_m(const MeasurementSet& meas, int order, double z);

Formulation build_proposed(const Network& net, const MeasurementSet& meas,
                           const std::vector<Loop>& loops,
                           const TiParameters& params);
Formulation build_harmonic_only(const Network& net, const MeasurementSet& meas,
                                const std::vector<Loop>& loops,
                                const TiParameters& params);
Formulation build_traditional(const Network& net, const MeasurementSet& meas,
                              const std::vector<Loop>& loops,
                              const TiParameters& params);
Formulation build_model(Scheme scheme, const Network& net,
                        const MeasurementSet& meas,
                        const std::vector<Loop>& loops,
                        const TiParameters& params);

// Model point of the true topology: switch states from the ground truth,
// branch currents that the measured injections (pseudo injections and
// metered sources) drive through that topology, and the sign indicators,
// path flags and residual envelopes that follow. Feasible by construction;
// its objective is what the true topology scores under the measurements.
std::vector<double> truth_assignment(const Formulation& f, const Network& net,
                                     const GroundTruth& truth,
                                     const MeasurementSet& meas,
                                     const TiParameters& params);

// Family of a row name ("hkcl", "abs", "path", "fkcl", "switch", "couple",
// "loop", "radial", "envelope", "valid").
std::string constraint_family(const std::string& row_name);

// Largest violation per family of the rows violated by more than tol.
std::map<std::string, double> violated_families(const milp::MilpModel& model,
                                                const std::vector<double>& x,
                                                double tol);

}  // namespace dnti

#endif  // DNTI_FORMULATION_HPP_
