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


// Shared generators and reference computations for the test suites.

#ifndef DNTI_TESTS_HELPERS_HPP_
#define DNTI_TESTS_HELPERS_HPP_

#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnti/netmodel.hpp"
#include "dnti/simkit.hpp"

namespace dnti::test {

inline std::string data_dir() { return DNTI_TEST_DATA_DIR; }
inline std::string fixture_dir() { return DNTI_TEST_FIXTURE_DIR; }

inline Network ieee33() { return load_network_file(data_dir() + "/ieee33.json"); }

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Spanning-tree check by counting closed branches and merging components.
inline bool is_spanning_tree(const Network& net, const Topology& topo) {
  UnionFind uf(net.node_count() + 1);
  int closed = 0;
  for (const Branch& br : net.branches()) {
    if (!topo.closed.at(br.id)) continue;
    ++closed;
    if (!uf.unite(br.from, br.to)) return false;
  }
  return closed == net.node_count() - 1;
}

// Random feeder: a random tree over `nodes` nodes (normally closed) plus
// `ties` extra branches (normally open, each carrying a PMU).
inline Network random_feeder(std::mt19937_64& rng, int nodes, int ties) {
  std::vector<Branch> branches;
  std::set<std::pair<int, int>> used;
  int id = 1;
  for (int v = 2; v <= nodes; ++v) {
    const int u = 1 + static_cast<int>(rng() % (v - 1));
    branches.push_back({id++, std::min(u, v), std::max(u, v), true, false});
    used.insert({std::min(u, v), std::max(u, v)});
  }
  int attempts = 0;
  int added = 0;
  while (added < ties && attempts++ < 1000) {
    const int a = 1 + static_cast<int>(rng() % nodes);
    const int b = 1 + static_cast<int>(rng() % nodes);
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) continue;
    used.insert({std::min(a, b), std::max(a, b)});
    branches.push_back({id++, std::min(a, b), std::max(a, b), false, true});
    ++added;
  }
  return Network("random", nodes, branches);
}

inline Phasor random_phasor(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return std::polar(mag(rng), ang(rng));
}

// Random load injections (current drawn, so negative real part).
inline std::map<int, Phasor> random_loads(std::mt19937_64& rng, int nodes) {
  std::uniform_real_distribution<double> p(1.0, 10.0);
  std::uniform_real_distribution<double> q(0.2, 5.0);
  std::map<int, Phasor> out;
  for (int v = 2; v <= nodes; ++v) out[v] = Phasor(-p(rng), q(rng));
  return out;
}

// Signed contribution of walking branch `id` away from `node`.
inline double walk_sign(const Network& net, int id, int node) {
  return net.branch(id).from == node ? 1.0 : -1.0;
}

}  // namespace dnti::test

#endif  // DNTI_TESTS_HELPERS_HPP_
