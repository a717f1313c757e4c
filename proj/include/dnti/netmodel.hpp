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

#ifndef DNTI_NETMODEL_HPP_
#define DNTI_NETMODEL_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dnti {

// Node 1 is always the substation.
inline constexpr int kSubstation = 1;

// A switchable line segment. Orientation is canonical (from < to); a
// positive current flows from `from` to `to`.
struct Branch {
  int id = 0;
  int from = 0;
  int to = 0;
  bool normally_closed = true;
  bool has_pmu = false;
};

// Feeder graph. Immutable once constructed; the constructor enforces
// contiguous node ids starting at 1, canonical orientation, no self loops,
// no parallel branches, and connectivity with every branch closed.
class Network {
 public:
  Network(std::string name, int node_count, std::vector<Branch> branches);

  const std::string& name() const { return name_; }
  int node_count() const { return node_count_; }
  const std::vector<Branch>& branches() const { return branches_; }

  // Throws DomainError for unknown ids.
  const Branch& branch(int id) const;
  bool has_branch(int id) const { return index_.count(id) != 0; }
  // Position of a branch in branches().
  int index_of(int id) const;

  // Branch ids incident to `node`, in branches() order.
  const std::vector<int>& incident(int node) const;
  // Other endpoint of branch `id` seen from `node`.
  int opposite(int id, int node) const;

  std::vector<int> pmu_branches() const;
  std::vector<int> tie_branches() const;

 private:
  std::string name_;
  int node_count_ = 0;
  std::vector<Branch> branches_;
  std::map<int, int> index_;
  std::vector<std::vector<int>> incident_;
};

// Switch status per branch id (true = closed).
struct Topology {
  std::map<int, bool> closed;

  // Every branch closed / normal operating configuration.
  static Topology all_closed(const Network& net);
  static Topology normal(const Network& net);
  // Every branch closed except the listed ones.
  static Topology with_open(const Network& net, const std::vector<int>& open);

  std::vector<int> open_branches() const;
  std::vector<int> closed_branches() const;

  bool operator==(const Topology&) const = default;
};

// A simple cycle of the all-closed graph, stored as sorted branch ids.
struct Loop {
  std::vector<int> branches;

  int size() const { return static_cast<int>(branches.size()); }
  bool contains(int branch_id) const;
  bool operator==(const Loop&) const = default;
  auto operator<=>(const Loop&) const = default;
};

// Parses the JSON network schema. Throws ParseError on malformed text and
// DomainError on graph-level violations.
Network load_network(const std::string& text);
Network load_network_file(const std::string& path);
std::string dump_network(const Network& net);

// True iff the closed branches form a spanning tree. Throws DomainError if
// `topo` names an unknown branch or misses one.
bool validate_radial(const Network& net, const Topology& topo);

// All simple cycles of the all-closed graph, each exactly once, sorted.
std::vector<Loop> enumerate_loops(const Network& net);

// One fundamental cycle per tie branch w.r.t. the normally-closed tree, in
// tie-branch id order. Throws DomainError if the normally-closed branches do
// not form a spanning tree.
std::vector<Loop> independent_loops(const Network& net);

// Branch ids on the path from `node` up to the substation (node-side first).
// Throws DomainError if `node` cannot reach the substation under `topo`.
std::vector<int> path_to_substation(const Network& net, const Topology& topo,
                                    int node);

// Parent relation of a radial topology rooted at the substation.
struct RootedTree {
  std::vector<int> parent;         // parent node, 0 for root/unreached
  std::vector<int> parent_branch;  // branch to parent, 0 for root/unreached
  std::vector<int> order;          // BFS order from the substation
};

// Throws DomainError unless `topo` is radial-valid.
RootedTree root_tree(const Network& net, const Topology& topo);

}  // namespace dnti

#endif  // DNTI_NETMODEL_HPP_
