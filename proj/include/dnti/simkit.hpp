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

#ifndef DNTI_SIMKIT_HPP_
#define DNTI_SIMKIT_HPP_

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dnti/netmodel.hpp"

namespace dnti {

// Current phasor in amperes (real, imaginary).
using Phasor = std::complex<double>;

// Key of a harmonic branch quantity: (branch id, harmonic order).
using HarmonicKey = std::pair<int, int>;

struct HarmonicSource {
  int node = 0;
  int order = 3;
  Phasor current;

  bool operator==(const HarmonicSource&) const = default;
};

// Error levels in percent. TVE values bound the total vector error of
// the respective sensor class; pseudo_error_pct is the 3-sigma relative
// error of pseudo injections.
struct NoiseSpec {
  double pmu_fundamental_tve_pct = 0.0;
  double pmu_harmonic_tve_pct = 0.0;
  double source_meter_tve_pct = 0.0;
  double pseudo_error_pct = 0.0;

  bool operator==(const NoiseSpec&) const = default;
};

struct ScenarioConfig {
  Topology topology;
  std::map<int, Phasor> fundamental_injections;
  std::vector<HarmonicSource> harmonic_sources;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct MeasurementSet {
  std::map<int, Phasor> fundamental_branch;
  std::map<HarmonicKey, Phasor> harmonic_branch;
  std::vector<HarmonicSource> harmonic_source_meas;
  std::map<int, Phasor> pseudo_injections;

  bool operator==(const MeasurementSet&) const = default;
};

// Noise-free branch quantities behind a MeasurementSet.
struct GroundTruth {
  Topology topology;
  std::map<int, Phasor> fundamental;
  std::map<HarmonicKey, Phasor> harmonic;
  std::vector<HarmonicSource> sources;
};

using Rng = std::mt19937_64;

// Deterministic 64-bit mixing of a base seed with stream indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);

// Branch currents from nodal injections (injection = current entering the
// network at the node) by leaf-to-root accumulation. Open branches carry
// exactly zero. Throws DomainError for non-radial topologies.
std::map<int, Phasor> simulate_fundamental(
    const Network& net, const Topology& topo,
    const std::map<int, Phasor>& injections);

// Harmonic branch currents: every source current travels along its path to
// the substation. One entry per (branch, order) for each order present.
std::map<HarmonicKey, Phasor> simulate_harmonic(
    const Network& net, const Topology& topo,
    const std::vector<HarmonicSource>& sources);

// Adds a truncated complex Gaussian error with 3-sigma radius at the TVE
// bound; the result always satisfies |error| <= tve_pct/100 * |value|.
Phasor apply_tve_noise(Phasor value, double tve_pct, Rng& rng);

// Scales each component by (1 + delta), delta ~ N(0, err_pct/300) truncated
// to |delta| <= err_pct/100.
Phasor apply_pseudo_error(Phasor value, double err_pct, Rng& rng);

// Throws DomainError when the scenario breaks its invariants.
void validate_scenario(const Network& net, const ScenarioConfig& sc);

GroundTruth simulate_truth(const Network& net, const ScenarioConfig& sc);

// Simulates the scenario and corrupts it per sc.noise. Each sensor class
// draws from its own stream derived from sc.seed, so changing one noise
// level leaves the others' draws untouched.
MeasurementSet make_measurements(const Network& net, const ScenarioConfig& sc);
MeasurementSet make_measurements(const Network& net, const ScenarioConfig& sc,
                                 const GroundTruth& truth);

// Harmonic path set implied by a topology and a set of source nodes.
std::map<int, bool> harmonic_path_flags(const Network& net,
                                        const Topology& topo,
                                        const std::vector<HarmonicSource>& sources);

// Spanning tree of the all-closed graph from random branch weights
// (Kruskal); every branch outside the tree is open.
Topology random_radial_topology(const Network& net, Rng& rng);

// Balanced per-phase current drawn by a load of p_kw + j q_kvar at the given
// line-to-line voltage, expressed as an injection (negative real part).
Phasor load_injection(double p_kw, double q_kvar, double v_ll_kv);

}  // namespace dnti

#endif  // DNTI_SIMKIT_HPP_
