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


#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "dnti/error.hpp"
#include "dnti/io.hpp"
#include "dnti/simkit.hpp"
#include "helpers.hpp"

namespace dnti {
namespace {

// Net current leaving `node` through its incident branches.
Phasor outflow(const Network& net, const std::map<int, Phasor>& currents, int node) {
  Phasor sum{};
  for (int id : net.incident(node)) {
    sum += test::walk_sign(net, id, node) * currents.at(id);
  }
  return sum;
}

// Harmonic branch currents by walking each source's path, in source order.
std::map<int, Phasor> path_sums(const Network& net, const Topology& topo,
                                const std::vector<HarmonicSource>& sources) {
  std::map<int, Phasor> out;
  for (const Branch& br : net.branches()) out[br.id] = Phasor{};
  for (const HarmonicSource& src : sources) {
    int node = src.node;
    for (int id : path_to_substation(net, topo, src.node)) {
      out[id] += test::walk_sign(net, id, node) * src.current;
      node = net.opposite(id, node);
    }
  }
  return out;
}

ScenarioConfig base_scenario(const Network& net) {
  return load_scenario_file(net, test::data_dir() + "/ieee33_scenario.json");
}

TEST_SUITE("simkit") {

TEST_CASE("fundamental currents satisfy KCL on random feeders") {
  std::mt19937_64 rng(3);
  Rng topo_rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Network net = trial % 3 == 0
                            ? test::ieee33()
                            : test::random_feeder(rng, 2 + static_cast<int>(rng() % 12),
                                                  static_cast<int>(rng() % 4));
    const Topology topo = random_radial_topology(net, topo_rng);
    const std::map<int, Phasor> inj = test::random_loads(rng, net.node_count());
    const std::map<int, Phasor> cur = simulate_fundamental(net, topo, inj);
    double scale = 0.0;
    Phasor total{};
    for (const auto& [node, value] : inj) {
      scale += std::abs(value);
      total += value;
    }
    for (int node = 2; node <= net.node_count(); ++node) {
      CHECK(std::abs(outflow(net, cur, node) - inj.at(node)) <= 1e-9 * scale);
    }
    CHECK(std::abs(outflow(net, cur, kSubstation) + total) <= 1e-9 * scale);
    for (const Branch& br : net.branches()) {
      if (!topo.closed.at(br.id)) CHECK(cur.at(br.id) == Phasor{});
    }
  }
}

TEST_CASE("harmonic currents equal path subset sums") {
  std::mt19937_64 rng(8);
  Rng topo_rng(9);
  const Network net = test::ieee33();
  for (int trial = 0; trial < 200; ++trial) {
    const Topology topo = random_radial_topology(net, topo_rng);
    std::vector<HarmonicSource> sources;
    const int count = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < count; ++k) {
      sources.push_back({2 + static_cast<int>(rng() % 32), 3, test::random_phasor(rng, 0.1, 2.0)});
    }
    const auto harmonic = simulate_harmonic(net, topo, sources);
    const auto oracle = path_sums(net, topo, sources);
    for (const Branch& br : net.branches()) {
      CHECK(harmonic.at({br.id, 3}) == oracle.at(br.id));
    }
  }
}

TEST_CASE("harmonic currents are kept per order") {
  const Network net = test::ieee33();
  const Topology topo = Topology::normal(net);
  const std::vector<HarmonicSource> sources{{5, 3, {1.0, 0.0}}, {5, 5, {0.0, 2.0}}};
  const auto harmonic = simulate_harmonic(net, topo, sources);
  CHECK(harmonic.size() == 2 * net.branches().size());
  CHECK(harmonic.at({4, 3}) == Phasor(-1.0, 0.0));
  CHECK(harmonic.at({4, 5}) == Phasor(0.0, -2.0));
  CHECK(harmonic.at({5, 3}) == Phasor{});
}

TEST_CASE("harmonic path flags mark the union of source paths") {
  const Network net = test::ieee33();
  const Topology topo = Topology::normal(net);
  const auto flags = harmonic_path_flags(net, topo, {{4, 3, {1.0, 0.0}}});
  std::set<int> on;
  for (const auto& [id, f] : flags) {
    if (f) on.insert(id);
  }
  CHECK(on == std::set<int>{1, 2, 3});
  CHECK(harmonic_path_flags(net, topo, {{4, 3, {0.0, 0.0}}}).at(1) == false);
}

TEST_CASE("TVE noise stays within its bound") {
  Rng rng(1);
  std::mt19937_64 gen(2);
  for (int i = 0; i < 2000; ++i) {
    const Phasor v = test::random_phasor(gen, 0.01, 100.0);
    const double tve = std::uniform_real_distribution<double>(0.0, 10.0)(gen);
    const Phasor noisy = apply_tve_noise(v, tve, rng);
    CHECK(std::abs(noisy - v) <= tve / 100.0 * std::abs(v) * (1 + 1e-12));
  }
  CHECK(apply_tve_noise({3.0, 4.0}, 0.0, rng) == Phasor(3.0, 4.0));
}

TEST_CASE("pseudo error scales each component within its bound") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Phasor v(-3.0, 1.5);
    const Phasor noisy = apply_pseudo_error(v, 90.0, rng);
    CHECK(std::abs(noisy.real() / v.real() - 1.0) <= 0.9 + 1e-12);
    CHECK(std::abs(noisy.imag() / v.imag() - 1.0) <= 0.9 + 1e-12);
  }
  CHECK(apply_pseudo_error({2.0, -1.0}, 0.0, rng) == Phasor(2.0, -1.0));
}

TEST_CASE("pseudo error has roughly the stated spread") {
  Rng rng(6);
  double sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double d = apply_pseudo_error({1.0, 0.0}, 30.0, rng).real() - 1.0;
    sum_sq += d * d;
  }
  // Truncation at 3 sigma shrinks the deviation by about 1.4%.
  CHECK(std::sqrt(sum_sq / n) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("zero-noise measurements equal the ground truth") {
  const Network net = test::ieee33();
  const ScenarioConfig sc = base_scenario(net);
  const GroundTruth truth = simulate_truth(net, sc);
  const MeasurementSet meas = make_measurements(net, sc, truth);
  for (int id : net.pmu_branches()) {
    CHECK(meas.fundamental_branch.at(id) == truth.fundamental.at(id));
    CHECK(meas.harmonic_branch.at({id, 3}) == truth.harmonic.at({id, 3}));
  }
  CHECK(meas.fundamental_branch.size() == 5);
  CHECK(meas.pseudo_injections.size() == 32);
  for (const auto& [node, value] : meas.pseudo_injections) {
    CHECK(value == sc.fundamental_injections.at(node));
  }
  CHECK(meas.harmonic_source_meas == sc.harmonic_sources);
}

TEST_CASE("sensor classes draw from independent streams") {
  const Network net = test::ieee33();
  ScenarioConfig a = base_scenario(net);
  a.seed = 77;
  a.noise.pmu_fundamental_tve_pct = 3.0;
  a.noise.pmu_harmonic_tve_pct = 5.0;
  ScenarioConfig b = a;
  b.noise.pseudo_error_pct = 90.0;
  const MeasurementSet ma = make_measurements(net, a);
  const MeasurementSet mb = make_measurements(net, b);
  CHECK(ma.fundamental_branch == mb.fundamental_branch);
  CHECK(ma.harmonic_branch == mb.harmonic_branch);
  CHECK(ma.pseudo_injections != mb.pseudo_injections);
  CHECK(make_measurements(net, b) == mb);
  b.seed = 78;
  CHECK(make_measurements(net, b).fundamental_branch != ma.fundamental_branch);
}

TEST_CASE("derive_seed is deterministic and separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) {
      CHECK(derive_seed(42, a, b) == derive_seed(42, a, b));
      seen.insert(derive_seed(42, a, b));
    }
  }
  CHECK(seen.size() == 400);
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("load_injection converts three-phase power to a per-phase current") {
  const Phasor i = load_injection(100.0, 60.0, 12.66);
  const double k = std::sqrt(3.0) * 12.66;
  CHECK(i.real() == doctest::Approx(-100.0 / k));
  CHECK(i.imag() == doctest::Approx(60.0 / k));
}

TEST_CASE("scenario validation") {
  const Network net = test::ieee33();
  ScenarioConfig sc = base_scenario(net);
  CHECK_NOTHROW(validate_scenario(net, sc));

  ScenarioConfig loop = sc;
  loop.topology = Topology::all_closed(net);
  CHECK_THROWS_AS(validate_scenario(net, loop), DomainError);

  ScenarioConfig at_root = sc;
  at_root.harmonic_sources.push_back({1, 3, {1.0, 0.0}});
  CHECK_THROWS_AS(validate_scenario(net, at_root), DomainError);

  ScenarioConfig low_order = sc;
  low_order.harmonic_sources.push_back({4, 1, {1.0, 0.0}});
  CHECK_THROWS_AS(validate_scenario(net, low_order), DomainError);

  ScenarioConfig noisy = sc;
  noisy.noise.pseudo_error_pct = 101.0;
  CHECK_THROWS_AS(validate_scenario(net, noisy), DomainError);
  noisy.noise.pseudo_error_pct = -1.0;
  CHECK_THROWS_AS(validate_scenario(net, noisy), DomainError);

  ScenarioConfig no_load = sc;
  no_load.fundamental_injections.erase(7);
  CHECK_THROWS_AS(validate_scenario(net, no_load), DomainError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace dnti
