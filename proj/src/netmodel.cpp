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

#include "dnti/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "dnti/error.hpp"
#include "dnti/textio.hpp"
#include "json.hpp"

namespace dnti {
namespace {

using nlohmann::json;

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Checks that a set of branches touches every node with degree two and is
// connected, i.e. forms one simple cycle.
bool is_simple_cycle(const Network& net, const std::vector<int>& ids) {
  if (ids.size() < 3) return false;
  std::map<int, int> degree;
  DisjointSet ds(net.node_count() + 1);
  for (int id : ids) {
    const Branch& br = net.branch(id);
    ++degree[br.from];
    ++degree[br.to];
    ds.unite(br.from, br.to);
  }
  const int root = ds.find(degree.begin()->first);
  for (const auto& [node, deg] : degree) {
    if (deg != 2 || ds.find(node) != root) return false;
  }
  return true;
}

}  // namespace

Network::Network(std::string name, int node_count, std::vector<Branch> branches)
    : name_(std::move(name)), node_count_(node_count) {
  if (node_count_ < 1) throw DomainError("network needs at least one node");
  std::set<std::pair<int, int>> pairs;
  for (Branch br : branches) {
    if (br.from < 1 || br.to < 1 || br.from > node_count_ ||
        br.to > node_count_) {
      throw DomainError("branch " + std::to_string(br.id) +
                        " references a node outside 1.." +
                        std::to_string(node_count_));
    }
    if (br.from == br.to) {
      throw DomainError("branch " + std::to_string(br.id) + " is a self loop");
    }
    if (br.from > br.to) std::swap(br.from, br.to);
    if (!pairs.insert({br.from, br.to}).second) {
      throw DomainError("parallel branch between nodes " +
                        std::to_string(br.from) + " and " +
                        std::to_string(br.to));
    }
    if (!index_.emplace(br.id, static_cast<int>(branches_.size())).second) {
      throw DomainError("duplicate branch id " + std::to_string(br.id));
    }
    branches_.push_back(br);
  }
  incident_.assign(node_count_ + 1, {});
  DisjointSet ds(node_count_ + 1);
  int components = node_count_;
  for (const Branch& br : branches_) {
    incident_[br.from].push_back(br.id);
    incident_[br.to].push_back(br.id);
    if (ds.unite(br.from, br.to)) --components;
  }
  if (components != 1) {
    throw DomainError("network '" + name_ +
                      "' is disconnected with all branches closed");
  }
}

const Branch& Network::branch(int id) const { return branches_[index_of(id)]; }

int Network::index_of(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw DomainError("unknown branch id " + std::to_string(id));
  }
  return it->second;
}

const std::vector<int>& Network::incident(int node) const {
  if (node < 1 || node > node_count_) {
    throw DomainError("unknown node " + std::to_string(node));
  }
  return incident_[node];
}

int Network::opposite(int id, int node) const {
  const Branch& br = branch(id);
  return br.from == node ? br.to : br.from;
}

std::vector<int> Network::pmu_branches() const {
  std::vector<int> out;
  for (const Branch& br : branches_) {
    if (br.has_pmu) out.push_back(br.id);
  }
  return out;
}

std::vector<int> Network::tie_branches() const {
  std::vector<int> out;
  for (const Branch& br : branches_) {
    if (!br.normally_closed) out.push_back(br.id);
  }
  return out;
}

Topology Topology::all_closed(const Network& net) {
  Topology t;
  for (const Branch& br : net.branches()) t.closed[br.id] = true;
  return t;
}

Topology Topology::normal(const Network& net) {
  Topology t;
  for (const Branch& br : net.branches()) t.closed[br.id] = br.normally_closed;
  return t;
}

Topology Topology::with_open(const Network& net, const std::vector<int>& open) {
  Topology t = all_closed(net);
  for (int id : open) {
    net.index_of(id);
    t.closed[id] = false;
  }
  return t;
}

std::vector<int> Topology::open_branches() const {
  std::vector<int> out;
  for (const auto& [id, c] : closed) {
    if (!c) out.push_back(id);
  }
  return out;
}

std::vector<int> Topology::closed_branches() const {
  std::vector<int> out;
  for (const auto& [id, c] : closed) {
    if (c) out.push_back(id);
  }
  return out;
}

bool Loop::contains(int branch_id) const {
  return std::binary_search(branches.begin(), branches.end(), branch_id);
}

Network load_network(const std::string& text) {
  json doc = parse_json_text(text, "network");
  try {
    if (!doc.is_object()) throw ParseError("network: top level must be an object");
    std::string name = doc.value("name", std::string("unnamed"));
    if (!doc.contains("nodes") || !doc["nodes"].is_number_integer()) {
      throw ParseError("network: field 'nodes' must be an integer count");
    }
    const int nodes = doc["nodes"].get<int>();
    if (!doc.contains("branches") || !doc["branches"].is_array()) {
      throw ParseError("network: field 'branches' must be an array");
    }
    std::vector<Branch> branches;
    int k = 0;
    for (const json& jb : doc["branches"]) {
      const std::string where = "network: branches[" + std::to_string(k++) + "]";
      if (!jb.is_object()) throw ParseError(where + " must be an object");
      for (const char* key : {"id", "from", "to"}) {
        if (!jb.contains(key) || !jb[key].is_number_integer()) {
          throw ParseError(where + ": missing integer field '" + key + "'");
        }
      }
      Branch br;
      br.id = jb["id"].get<int>();
      br.from = jb["from"].get<int>();
      br.to = jb["to"].get<int>();
      if (br.from < 1 || br.to < 1) {
        throw ParseError(where + ": node ids start at 1");
      }
      br.normally_closed = jb.value("normally_closed", true);
      br.has_pmu = jb.value("pmu", false);
      branches.push_back(br);
    }
    return Network(std::move(name), nodes, std::move(branches));
  } catch (const json::exception& e) {
    throw ParseError(std::string("network: ") + e.what());
  }
}

Network load_network_file(const std::string& path) {
  return load_network(read_text_file(path));
}

std::string dump_network(const Network& net) {
  json doc;
  doc["name"] = net.name();
  doc["nodes"] = net.node_count();
  doc["branches"] = json::array();
  for (const Branch& br : net.branches()) {
    doc["branches"].push_back({{"id", br.id},
                               {"from", br.from},
                               {"to", br.to},
                               {"normally_closed", br.normally_closed},
                               {"pmu", br.has_pmu}});
  }
  return doc.dump(2) + "\n";
}

bool validate_radial(const Network& net, const Topology& topo) {
  for (const auto& [id, c] : topo.closed) net.index_of(id);
  int closed = 0;
  DisjointSet ds(net.node_count() + 1);
  int components = net.node_count();
  for (const Branch& br : net.branches()) {
    auto it = topo.closed.find(br.id);
    if (it == topo.closed.end()) {
      throw DomainError("topology misses branch " + std::to_string(br.id));
    }
    if (!it->second) continue;
    ++closed;
    if (ds.unite(br.from, br.to)) --components;
  }
  return closed == net.node_count() - 1 && components == 1;
}

std::vector<Loop> enumerate_loops(const Network& net) {
  // Backtracking search rooted at each start node s, restricted to nodes > s
  // so every cycle is rooted at its smallest node. Each cycle is then met in
  // both directions; keep the one whose first branch id is the smaller.
  std::vector<Loop> loops;
  const int n = net.node_count();
  std::vector<char> on_path(n + 1, 0);
  std::vector<int> edges;

  auto dfs = [&](auto&& self, int start, int node) -> void {
    for (int id : net.incident(node)) {
      const int next = net.opposite(id, node);
      if (next == start) {
        if (edges.size() >= 2 && id != edges.back() && edges.front() < id) {
          Loop loop;
          loop.branches = edges;
          loop.branches.push_back(id);
          std::sort(loop.branches.begin(), loop.branches.end());
          loops.push_back(std::move(loop));
        }
        continue;
      }
      if (next < start || on_path[next]) continue;
      on_path[next] = 1;
      edges.push_back(id);
      self(self, start, next);
      edges.pop_back();
      on_path[next] = 0;
    }
  };

  for (int s = 1; s <= n; ++s) {
    on_path[s] = 1;
    dfs(dfs, s, s);
    on_path[s] = 0;
  }
  std::sort(loops.begin(), loops.end());
  return loops;
}

std::vector<Loop> independent_loops(const Network& net) {
  const Topology normal = Topology::normal(net);
  if (!validate_radial(net, normal)) {
    throw DomainError("normally-closed branches of '" + net.name() +
                      "' do not form a spanning tree");
  }
  const RootedTree tree = root_tree(net, normal);
  std::vector<int> depth(net.node_count() + 1, 0);
  for (int node : tree.order) {
    if (node != kSubstation) depth[node] = depth[tree.parent[node]] + 1;
  }
  std::vector<Loop> loops;
  for (int tie : net.tie_branches()) {
    const Branch& br = net.branch(tie);
    Loop loop;
    loop.branches.push_back(tie);
    int a = br.from;
    int b = br.to;
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      loop.branches.push_back(tree.parent_branch[a]);
      a = tree.parent[a];
    }
    std::sort(loop.branches.begin(), loop.branches.end());
    if (!is_simple_cycle(net, loop.branches)) {
      throw DomainError("tie branch " + std::to_string(tie) +
                        " does not close a simple cycle");
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

RootedTree root_tree(const Network& net, const Topology& topo) {
  if (!validate_radial(net, topo)) {
    throw DomainError("topology is not radial");
  }
  RootedTree tree;
  const int n = net.node_count();
  tree.parent.assign(n + 1, 0);
  tree.parent_branch.assign(n + 1, 0);
  std::vector<char> seen(n + 1, 0);
  std::queue<int> q;
  q.push(kSubstation);
  seen[kSubstation] = 1;
  while (!q.empty()) {
    const int node = q.front();
    q.pop();
    tree.order.push_back(node);
    for (int id : net.incident(node)) {
      if (!topo.closed.at(id)) continue;
      const int next = net.opposite(id, node);
      if (seen[next]) continue;
      seen[next] = 1;
      tree.parent[next] = node;
      tree.parent_branch[next] = id;
      q.push(next);
    }
  }
  return tree;
}

std::vector<int> path_to_substation(const Network& net, const Topology& topo,
                                    int node) {
  net.incident(node);
  // BFS over closed branches; radial input is a precondition, but any
  // reachable path is reported so meshed inputs still get a deterministic
  // answer.
  const int n = net.node_count();
  std::vector<int> via(n + 1, 0);
  std::vector<char> seen(n + 1, 0);
  std::queue<int> q;
  q.push(kSubstation);
  seen[kSubstation] = 1;
  while (!q.empty()) {
    const int cur = q.front();
    q.pop();
    for (int id : net.incident(cur)) {
      auto it = topo.closed.find(id);
      if (it == topo.closed.end() || !it->second) continue;
      const int next = net.opposite(id, cur);
      if (seen[next]) continue;
      seen[next] = 1;
      via[next] = id;
      q.push(next);
    }
  }
  if (!seen[node]) {
    throw DomainError("node " + std::to_string(node) +
                      " cannot reach the substation");
  }
  std::vector<int> path;
  for (int cur = node; cur != kSubstation;) {
    const int id = via[cur];
    path.push_back(id);
    cur = net.opposite(id, cur);
  }
  return path;
}

}  // namespace dnti
