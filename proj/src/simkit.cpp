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

#include "dnti/simkit.hpp"

#include <cmath>
#include <set>

#include "dnti/error.hpp"

namespace dnti {
namespace {

constexpr std::uint64_t kPseudoStream = 1;
constexpr std::uint64_t kPmuFundamentalStream = 2;
constexpr std::uint64_t kPmuHarmonicStream = 3;
constexpr std::uint64_t kSourceStream = 4;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_percent(double v, const char* what) {
  if (!(v >= 0.0 && v <= 100.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 100], got " +
                      std::to_string(v));
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

std::map<int, Phasor> simulate_fundamental(
    const Network& net, const Topology& topo,
    const std::map<int, Phasor>& injections) {
  const RootedTree tree = root_tree(net, topo);
  std::vector<Phasor> subtree(net.node_count() + 1, Phasor{});
  for (const auto& [node, inj] : injections) {
    if (node < 1 || node > net.node_count()) {
      throw DomainError("injection at unknown node " + std::to_string(node));
    }
    if (node != kSubstation) subtree[node] = inj;
  }
  std::map<int, Phasor> currents;
  for (const Branch& br : net.branches()) currents[br.id] = Phasor{};
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    const int node = *it;
    if (node == kSubstation) continue;
    const int parent = tree.parent[node];
    const int id = tree.parent_branch[node];
    // The subtree's net injection leaves `node` toward its parent.
    currents[id] = net.branch(id).from == node ? subtree[node] : -subtree[node];
    subtree[parent] += subtree[node];
  }
  return currents;
}

std::map<HarmonicKey, Phasor> simulate_harmonic(
    const Network& net, const Topology& topo,
    const std::vector<HarmonicSource>& sources) {
  const RootedTree tree = root_tree(net, topo);
  std::set<int> orders;
  for (const HarmonicSource& src : sources) orders.insert(src.order);
  std::map<HarmonicKey, Phasor> currents;
  for (int h : orders) {
    for (const Branch& br : net.branches()) currents[{br.id, h}] = Phasor{};
  }
  for (const HarmonicSource& src : sources) {
    if (src.node < 1 || src.node > net.node_count()) {
      throw DomainError("harmonic source at unknown node " +
                        std::to_string(src.node));
    }
    for (int node = src.node; node != kSubstation; node = tree.parent[node]) {
      const int id = tree.parent_branch[node];
      Phasor& slot = currents[{id, src.order}];
      slot += net.branch(id).from == node ? src.current : -src.current;
    }
  }
  return currents;
}

Phasor apply_tve_noise(Phasor value, double tve_pct, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double limit = tve_pct / 100.0 * std::abs(value);
  const double sigma = limit / (3.0 * std::sqrt(2.0));
  while (true) {
    const Phasor e(sigma * gauss(rng), sigma * gauss(rng));
    if (limit <= 0.0) return value;
    if (std::abs(e) <= limit) return value + e;
  }
}

Phasor apply_pseudo_error(Phasor value, double err_pct, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double limit = err_pct / 100.0;
  const double sigma = err_pct / 300.0;
  auto draw = [&]() {
    while (true) {
      const double delta = sigma * gauss(rng);
      if (std::abs(delta) <= limit) return delta;
    }
  };
  const double dr = draw();
  const double di = draw();
  return {value.real() * (1.0 + dr), value.imag() * (1.0 + di)};
}

void validate_scenario(const Network& net, const ScenarioConfig& sc) {
  if (!validate_radial(net, sc.topology)) {
    throw DomainError("scenario topology is not radial");
  }
  for (int node = 2; node <= net.node_count(); ++node) {
    if (!sc.fundamental_injections.count(node)) {
      throw DomainError("scenario lacks an injection for node " +
                        std::to_string(node));
    }
  }
  for (const auto& [node, inj] : sc.fundamental_injections) {
    if (node < 1 || node > net.node_count()) {
      throw DomainError("injection at unknown node " + std::to_string(node));
    }
    if (!std::isfinite(inj.real()) || !std::isfinite(inj.imag())) {
      throw DomainError("non-finite injection at node " + std::to_string(node));
    }
  }
  for (const HarmonicSource& src : sc.harmonic_sources) {
    if (src.node <= kSubstation || src.node > net.node_count()) {
      throw DomainError("harmonic source must sit at a non-substation node, got " +
                        std::to_string(src.node));
    }
    if (src.order < 2) throw DomainError("harmonic order must be >= 2");
    if (!(std::abs(src.current) > 0.0)) {
      throw DomainError("harmonic source at node " + std::to_string(src.node) +
                        " has zero current");
    }
  }
  check_percent(sc.noise.pmu_fundamental_tve_pct, "pmu_f_tve");
  check_percent(sc.noise.pmu_harmonic_tve_pct, "pmu_h_tve");
  check_percent(sc.noise.source_meter_tve_pct, "src_tve");
  check_percent(sc.noise.pseudo_error_pct, "pseudo_pct");
}

GroundTruth simulate_truth(const Network& net, const ScenarioConfig& sc) {
  validate_scenario(net, sc);
  GroundTruth truth;
  truth.topology = sc.topology;
  truth.fundamental =
      simulate_fundamental(net, sc.topology, sc.fundamental_injections);
  truth.harmonic = simulate_harmonic(net, sc.topology, sc.harmonic_sources);
  truth.sources = sc.harmonic_sources;
  return truth;
}

MeasurementSet make_measurements(const Network& net, const ScenarioConfig& sc) {
  return make_measurements(net, sc, simulate_truth(net, sc));
}

MeasurementSet make_measurements(const Network& net, const ScenarioConfig& sc,
                                 const GroundTruth& truth) {
  Rng pseudo_rng(derive_seed(sc.seed, kPseudoStream));
  Rng pmu_f_rng(derive_seed(sc.seed, kPmuFundamentalStream));
  Rng pmu_h_rng(derive_seed(sc.seed, kPmuHarmonicStream));
  Rng src_rng(derive_seed(sc.seed, kSourceStream));

  MeasurementSet meas;
  for (int node = 2; node <= net.node_count(); ++node) {
    auto it = sc.fundamental_injections.find(node);
    const Phasor inj = it == sc.fundamental_injections.end() ? Phasor{} : it->second;
    meas.pseudo_injections[node] =
        apply_pseudo_error(inj, sc.noise.pseudo_error_pct, pseudo_rng);
  }
  const std::vector<int> pmus = net.pmu_branches();
  for (int id : pmus) {
    meas.fundamental_branch[id] = apply_tve_noise(
        truth.fundamental.at(id), sc.noise.pmu_fundamental_tve_pct, pmu_f_rng);
  }
  for (const auto& [key, value] : truth.harmonic) {
    if (!net.branch(key.first).has_pmu) continue;
    meas.harmonic_branch[key] =
        apply_tve_noise(value, sc.noise.pmu_harmonic_tve_pct, pmu_h_rng);
  }
  for (const HarmonicSource& src : truth.sources) {
    HarmonicSource m = src;
    m.current = apply_tve_noise(src.current, sc.noise.source_meter_tve_pct, src_rng);
    meas.harmonic_source_meas.push_back(m);
  }
  return meas;
}

std::map<int, bool> harmonic_path_flags(const Network& net, const Topology& topo,
                                        const std::vector<HarmonicSource>& sources) {
  std::map<int, bool> flags;
  for (const Branch& br : net.branches()) flags[br.id] = false;
  for (const HarmonicSource& src : sources) {
    if (std::abs(src.current) == 0.0) continue;
    for (int id : path_to_substation(net, topo, src.node)) flags[id] = true;
  }
  return flags;
}

Phasor load_injection(double p_kw, double q_kvar, double v_ll_kv) {
  return -Phasor(p_kw, -q_kvar) / (std::sqrt(3.0) * v_ll_kv);
}

Topology random_radial_topology(const Network& net, Rng& rng) {
  std::vector<int> order;
  for (const Branch& br : net.branches()) order.push_back(br.id);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  std::vector<int> parent(net.node_count() + 1);
  for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<int>(v);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  Topology topo;
  for (int id : order) {
    const Branch& br = net.branch(id);
    const int a = find(br.from);
    const int b = find(br.to);
    topo.closed[id] = a != b;
    if (a != b) parent[a] = b;
  }
  return topo;
}

}  // namespace dnti
