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

#ifndef DNTI_IO_HPP_
#define DNTI_IO_HPP_

#include <optional>
#include <string>

#include "dnti/identify.hpp"
#include "dnti/netmodel.hpp"
#include "dnti/simkit.hpp"
#include "json.hpp"

namespace dnti {

// Scenario document: `topology` (open branch ids), `injections`
// (node -> [re, im]), `sources` ([{node, h, re, im}]), `noise`
// ({pmu_f_tve, pmu_h_tve, src_tve, pseudo_pct}) and `seed`.
ScenarioConfig load_scenario(const Network& net, const std::string& text);
ScenarioConfig load_scenario_file(const Network& net, const std::string& path);
std::string dump_scenario(const ScenarioConfig& sc);

nlohmann::json noise_to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const nlohmann::json& j, const std::string& where);

// Measurement document. `noise` and `truth_open` are carried along by the
// simulator for sign hints and diagnostics and are optional on input.
struct MeasurementDocument {
  MeasurementSet measurements;
  std::optional<NoiseSpec> noise;
  std::optional<Topology> truth;
};

MeasurementDocument load_measurements(const Network& net, const std::string& text);
MeasurementDocument load_measurements_file(const Network& net,
                                           const std::string& path);
std::string dump_measurements(const MeasurementDocument& doc);

std::string dump_estimate(const TopologyEstimate& est);

}  // namespace dnti

#endif  // DNTI_IO_HPP_
