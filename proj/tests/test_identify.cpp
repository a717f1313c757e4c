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


#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "dnti/error.hpp"
#include "dnti/identify.hpp"
#include "dnti/io.hpp"
#include "helpers.hpp"

namespace dnti {
namespace {

ScenarioConfig base_scenario(const Network& net) {
  return load_scenario_file(net, test::data_dir() + "/ieee33_scenario.json");
}

TEST_SUITE("identify") {

TEST_CASE("noiseless bundled scenario: every scheme opens the five ties") {
  const Network net = test::ieee33();
  const ScenarioConfig sc = base_scenario(net);
  const GroundTruth truth = simulate_truth(net, sc);
  const MeasurementSet meas = make_measurements(net, sc, truth);
  for (Scheme scheme : {Scheme::kProposed, Scheme::kTraditional, Scheme::kHarmonicOnly}) {
    const TopologyEstimate est = identify(scheme, net, meas, TiParameters{}, {}, &truth);
    REQUIRE(est.solved());
    CHECK(est.solver_status == milp::SolveStatus::kOptimal);
    CHECK(est.topology().closed.size() == 37);
    if (scheme != Scheme::kHarmonicOnly) {
      CHECK(est.open_branches() == std::vector<int>{33, 34, 35, 36, 37});
    }
    if (scheme != Scheme::kTraditional) {
      CHECK(est.on_harmonic_path == harmonic_path_flags(net, sc.topology, sc.harmonic_sources));
    } else {
      CHECK(est.on_harmonic_path.empty());
    }
    CHECK(est.objective == doctest::Approx(0.0).scale(1.0));
    CHECK(est.truth_violations.empty());
  }
}

TEST_CASE("the optimum never exceeds the objective of the ground truth") {
  const Network net = test::ieee33();
  const std::vector<Loop> loops = enumerate_loops(net);
  ScenarioConfig sc = base_scenario(net);
  Rng rng(61);
  for (int trial = 0; trial < 6; ++trial) {
    sc.topology = random_radial_topology(net, rng);
    sc.noise = {3.0, 5.0, 0.0, 90.0};
    sc.seed = 500 + trial;
    const GroundTruth truth = simulate_truth(net, sc);
    const MeasurementSet meas = make_measurements(net, sc, truth);
    TiParameters params;
    params.sign_hint_tve_pct = 5.0;
    for (Scheme scheme : {Scheme::kProposed, Scheme::kTraditional}) {
      const Formulation f = build_model(scheme, net, meas, loops, params);
      const double at_truth =
          f.model.objective_value(truth_assignment(f, net, truth, meas, params));
      const TopologyEstimate est = identify(scheme, net, loops, meas, params);
      REQUIRE(est.solved());
      CHECK(est.objective <= at_truth + 1e-6);
      CHECK(validate_radial(net, est.topology()));
    }
  }
}

TEST_CASE("harmonic-only needs sources") {
  const Network net = test::ieee33();
  ScenarioConfig sc = base_scenario(net);
  sc.harmonic_sources.clear();
  const MeasurementSet meas = make_measurements(net, sc);
  CHECK_THROWS_AS(identify(Scheme::kHarmonicOnly, net, meas, TiParameters{}), DomainError);
}

TEST_CASE("a tiny time limit reports the limit instead of throwing") {
  const Network net = test::ieee33();
  ScenarioConfig sc = base_scenario(net);
  sc.noise.pseudo_error_pct = 90.0;
  sc.seed = 3;
  const MeasurementSet meas = make_measurements(net, sc);
  milp::SolveOptions opts;
  opts.node_limit = 1;
  const TopologyEstimate est = identify(Scheme::kProposed, net, meas, TiParameters{}, opts);
  if (est.solver_status != milp::SolveStatus::kOptimal) {
    CHECK(est.solver_status == milp::SolveStatus::kNodeLimit);
    CHECK_FALSE(est.solved());
  }
}

TEST_CASE("detect_paths thresholds the L1 magnitude") {
  const std::map<HarmonicKey, Phasor> h{{{1, 3}, {0.3, -0.2}},
                                        {{2, 3}, {0.1, 0.1}},
                                        {{2, 5}, {0.0, 0.6}},
                                        {{3, 3}, {-0.25, 0.0}}};
  const auto flags = detect_paths(h, 0.5);
  CHECK(flags.at(1));
  CHECK(flags.at(2));
  CHECK_FALSE(flags.at(3));
  CHECK_THROWS_AS(detect_paths(h, 0.0), DomainError);
}

TEST_CASE("observability condition on the bundled feeder") {
  const Network net = test::ieee33();
  std::vector<int> all_nodes;
  for (int v = 2; v <= 33; ++v) all_nodes.push_back(v);
  const ObservabilityReport full = check_observability(net, net.pmu_branches(), all_nodes);
  CHECK(full.sufficient);
  const ObservabilityReport few = check_observability(net, {33, 34}, {11, 18});
  CHECK_FALSE(few.sufficient);
  CHECK(few.loops_without_pmu.size() == 3);
  CHECK(few.nodes_without_source.size() == 30);
}

TEST_CASE("scenario and measurement documents round-trip") {
  const Network net = test::ieee33();
  ScenarioConfig sc = base_scenario(net);
  sc.noise = {1.0, 2.0, 3.0, 40.0};
  sc.seed = 12345678901234ULL;
  const std::string text = dump_scenario(sc);
  const ScenarioConfig back = load_scenario(net, text);
  CHECK(dump_scenario(back) == text);
  CHECK(back.noise == sc.noise);
  CHECK(back.topology == sc.topology);

  MeasurementDocument doc;
  doc.measurements = make_measurements(net, sc);
  doc.noise = sc.noise;
  doc.truth = sc.topology;
  const std::string mtext = dump_measurements(doc);
  const MeasurementDocument mback = load_measurements(net, mtext);
  CHECK(mback.measurements == doc.measurements);
  CHECK(*mback.truth == sc.topology);
  CHECK(dump_measurements(mback) == mtext);
}

TEST_CASE("malformed documents") {
  const Network net = test::ieee33();
  CHECK_THROWS_AS(load_scenario(net, "{}"), ParseError);
  CHECK_THROWS_AS(load_scenario(net, "[1]"), ParseError);
  CHECK_THROWS_AS(load_scenario(net, R"({"injections": {"x": [1, 2]}})"), ParseError);
  CHECK_THROWS_AS(load_scenario(net, R"({"injections": {"2": [1]}})"), ParseError);
  CHECK_THROWS_AS(load_scenario(net, R"({"topology": [99], "injections": {}})"), DomainError);
  CHECK_THROWS_AS(load_measurements(net, R"({"fundamental_branch": {"1": [0, 0]}})"),
                  DomainError);
  CHECK_THROWS_AS(load_measurements(net, R"({"harmonic_branch": {}})"), ParseError);
  CHECK_NOTHROW(load_measurements(net, "{}"));
}

TEST_CASE("estimate document lists open and path branches") {
  const Network net = test::ieee33();
  const ScenarioConfig sc = base_scenario(net);
  const MeasurementSet meas = make_measurements(net, sc);
  const TopologyEstimate est = identify(Scheme::kProposed, net, meas, TiParameters{});
  const nlohmann::json doc = nlohmann::json::parse(dump_estimate(est));
  CHECK(doc["status"] == "optimal");
  CHECK(doc["open_branches"] == nlohmann::json::array({33, 34, 35, 36, 37}));
  CHECK(doc["harmonic_path_branches"].size() == est.path_branches().size());
  TopologyEstimate empty;
  const nlohmann::json none = nlohmann::json::parse(dump_estimate(empty));
  CHECK(none["objective"].is_null());
}

}  // TEST_SUITE

}  // namespace
}  // namespace dnti
