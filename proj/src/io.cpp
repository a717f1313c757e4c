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

#include "dnti/io.hpp"

#include <cmath>

#include "dnti/error.hpp"
#include "dnti/textio.hpp"

namespace dnti {
namespace {

using nlohmann::json;

json phasor_json(Phasor p) { return json::array({p.real(), p.imag()}); }

Phasor phasor_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(where + " must be a [re, im] pair");
  }
  return Phasor(j[0].get<double>(), j[1].get<double>());
}

double number_field(const json& j, const char* key, const std::string& where,
                    double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ParseError(where + "." + key + " must be a number");
  return j[key].get<double>();
}

int int_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ParseError(where + ": missing integer field '" + key + "'");
  }
  return j[key].get<int>();
}

int node_key(const std::string& key, const std::string& where) {
  std::size_t used = 0;
  int node = 0;
  try {
    node = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size()) throw ParseError(where + ": bad key '" + key + "'");
  return node;
}

std::vector<HarmonicSource> sources_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be an array");
  std::vector<HarmonicSource> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!j[k].is_object()) throw ParseError(w + " must be an object");
    HarmonicSource s;
    s.node = int_field(j[k], "node", w);
    s.order = int_field(j[k], "h", w);
    s.current = Phasor(number_field(j[k], "re", w, 0.0), number_field(j[k], "im", w, 0.0));
    out.push_back(s);
  }
  return out;
}

json sources_json(const std::vector<HarmonicSource>& sources) {
  json arr = json::array();
  for (const HarmonicSource& s : sources) {
    arr.push_back({{"node", s.node}, {"h", s.order}, {"re", s.current.real()},
                   {"im", s.current.imag()}});
  }
  return arr;
}

Topology topology_from_open(const Network& net, const json& j,
                            const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be a list of open branch ids");
  std::vector<int> open;
  for (const json& v : j) {
    if (!v.is_number_integer()) throw ParseError(where + " must hold integers");
    const int id = v.get<int>();
    if (!net.has_branch(id)) {
      throw DomainError(where + " names unknown branch " + std::to_string(id));
    }
    open.push_back(id);
  }
  Topology t = Topology::all_closed(net);
  for (int id : open) t.closed[id] = false;
  return t;
}

json open_json(const Topology& t) {
  json arr = json::array();
  for (int id : t.open_branches()) arr.push_back(id);
  return arr;
}

json parse_object(const std::string& text, const std::string& what) {
  json doc = parse_json_text(text, what);
  if (!doc.is_object()) throw ParseError(what + ": top level must be an object");
  return doc;
}

}  // namespace

json noise_to_json(const NoiseSpec& n) {
  return {{"pmu_f_tve", n.pmu_fundamental_tve_pct},
          {"pmu_h_tve", n.pmu_harmonic_tve_pct},
          {"src_tve", n.source_meter_tve_pct},
          {"pseudo_pct", n.pseudo_error_pct}};
}

NoiseSpec noise_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  NoiseSpec n;
  n.pmu_fundamental_tve_pct = number_field(j, "pmu_f_tve", where, 0.0);
  n.pmu_harmonic_tve_pct = number_field(j, "pmu_h_tve", where, 0.0);
  n.source_meter_tve_pct = number_field(j, "src_tve", where, 0.0);
  n.pseudo_error_pct = number_field(j, "pseudo_pct", where, 0.0);
  return n;
}

ScenarioConfig load_scenario(const Network& net, const std::string& text) {
  const json doc = parse_object(text, "scenario");
  ScenarioConfig sc;
  sc.topology = topology_from_open(net, doc.value("topology", json::array()),
                                   "scenario.topology");
  if (!doc.contains("injections") || !doc["injections"].is_object()) {
    throw ParseError("scenario: field 'injections' must be an object");
  }
  for (const auto& [key, value] : doc["injections"].items()) {
    const std::string where = "scenario.injections." + key;
    sc.fundamental_injections[node_key(key, where)] = phasor_from(value, where);
  }
  if (doc.contains("sources")) {
    sc.harmonic_sources = sources_from(doc["sources"], "scenario.sources");
  }
  if (doc.contains("noise")) sc.noise = noise_from_json(doc["noise"], "scenario.noise");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ParseError("scenario.seed must be a non-negative integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  validate_scenario(net, sc);
  return sc;
}

ScenarioConfig load_scenario_file(const Network& net, const std::string& path) {
  return load_scenario(net, read_text_file(path));
}

std::string dump_scenario(const ScenarioConfig& sc) {
  json inj = json::object();
  for (const auto& [node, value] : sc.fundamental_injections) {
    inj[std::to_string(node)] = phasor_json(value);
  }
  json doc = {{"topology", open_json(sc.topology)},
              {"injections", inj},
              {"sources", sources_json(sc.harmonic_sources)},
              {"noise", noise_to_json(sc.noise)},
              {"seed", sc.seed}};
  return doc.dump(2) + "\n";
}

MeasurementDocument load_measurements(const Network& net, const std::string& text) {
  const json doc = parse_object(text, "measurements");
  MeasurementDocument out;
  MeasurementSet& m = out.measurements;
  if (doc.contains("fundamental_branch")) {
    if (!doc["fundamental_branch"].is_object()) {
      throw ParseError("measurements.fundamental_branch must be an object");
    }
    for (const auto& [key, value] : doc["fundamental_branch"].items()) {
      const std::string where = "measurements.fundamental_branch." + key;
      m.fundamental_branch[node_key(key, where)] = phasor_from(value, where);
    }
  }
  if (doc.contains("harmonic_branch")) {
    const json& arr = doc["harmonic_branch"];
    if (!arr.is_array()) throw ParseError("measurements.harmonic_branch must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string w = "measurements.harmonic_branch[" + std::to_string(k) + "]";
      if (!arr[k].is_object()) throw ParseError(w + " must be an object");
      const int id = int_field(arr[k], "branch", w);
      const int h = int_field(arr[k], "h", w);
      m.harmonic_branch[{id, h}] =
          Phasor(number_field(arr[k], "re", w, 0.0), number_field(arr[k], "im", w, 0.0));
    }
  }
  if (doc.contains("sources")) {
    m.harmonic_source_meas = sources_from(doc["sources"], "measurements.sources");
  }
  if (doc.contains("pseudo_injections")) {
    if (!doc["pseudo_injections"].is_object()) {
      throw ParseError("measurements.pseudo_injections must be an object");
    }
    for (const auto& [key, value] : doc["pseudo_injections"].items()) {
      const std::string where = "measurements.pseudo_injections." + key;
      m.pseudo_injections[node_key(key, where)] = phasor_from(value, where);
    }
  }
  if (doc.contains("noise")) {
    out.noise = noise_from_json(doc["noise"], "measurements.noise");
  }
  if (doc.contains("truth_open")) {
    out.truth = topology_from_open(net, doc["truth_open"], "measurements.truth_open");
  }
  for (const auto& [id, value] : m.fundamental_branch) {
    if (!net.has_branch(id) || !net.branch(id).has_pmu) {
      throw DomainError("fundamental measurement on branch " + std::to_string(id) +
                        " which carries no PMU");
    }
  }
  for (const auto& [key, value] : m.harmonic_branch) {
    if (!net.has_branch(key.first) || !net.branch(key.first).has_pmu) {
      throw DomainError("harmonic measurement on branch " +
                        std::to_string(key.first) + " which carries no PMU");
    }
  }
  return out;
}

MeasurementDocument load_measurements_file(const Network& net,
                                           const std::string& path) {
  return load_measurements(net, read_text_file(path));
}

std::string dump_measurements(const MeasurementDocument& d) {
  const MeasurementSet& m = d.measurements;
  json fund = json::object();
  for (const auto& [id, value] : m.fundamental_branch) {
    fund[std::to_string(id)] = phasor_json(value);
  }
  json harm = json::array();
  for (const auto& [key, value] : m.harmonic_branch) {
    harm.push_back({{"branch", key.first}, {"h", key.second},
                    {"re", value.real()}, {"im", value.imag()}});
  }
  json pseudo = json::object();
  for (const auto& [node, value] : m.pseudo_injections) {
    pseudo[std::to_string(node)] = phasor_json(value);
  }
  json doc = {{"fundamental_branch", fund},
              {"harmonic_branch", harm},
              {"sources", sources_json(m.harmonic_source_meas)},
              {"pseudo_injections", pseudo}};
  if (d.noise) doc["noise"] = noise_to_json(*d.noise);
  if (d.truth) doc["truth_open"] = open_json(*d.truth);
  return doc.dump(2) + "\n";
}

std::string dump_estimate(const TopologyEstimate& est) {
  json doc;
  doc["scheme"] = to_string(est.scheme);
  doc["status"] = milp::to_string(est.solver_status);
  doc["objective"] = est.has_solution() ? json(est.objective) : json(nullptr);
  doc["gap"] = est.has_solution() ? json(est.gap) : json(nullptr);
  doc["nodes_explored"] = est.nodes_explored;
  doc["open_branches"] = est.open_branches();
  doc["harmonic_path_branches"] = est.path_branches();
  json fund = json::object();
  for (const auto& [id, value] : est.estimated_fundamental) {
    fund[std::to_string(id)] = phasor_json(value);
  }
  json harm = json::array();
  for (const auto& [key, value] : est.estimated_harmonic) {
    harm.push_back({{"branch", key.first}, {"h", key.second},
                    {"re", value.real()}, {"im", value.imag()}});
  }
  doc["fundamental"] = fund;
  doc["harmonic"] = harm;
  if (!est.truth_violations.empty()) {
    json viol = json::object();
    for (const auto& [family, v] : est.truth_violations) viol[family] = v;
    doc["truth_violations"] = viol;
  }
  return doc.dump(2) + "\n";
}

}  // namespace dnti
