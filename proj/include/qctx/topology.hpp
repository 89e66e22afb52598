// Copyright 2026 The qctx Authors
//
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

#pragma once

#include <array>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qctx/gates.hpp"

namespace qctx {

/// Three-qubit connectivity class: F = triangle, Lk = path whose shared
/// endpoint sits at logical position k of the triple.
enum class TopoTag : uint8_t { F, L0, L1, L2 };

inline const char* topo_name(TopoTag t) {
  switch (t) {
    case TopoTag::F: return "F";
    case TopoTag::L0: return "L0";
    case TopoTag::L1: return "L1";
    case TopoTag::L2: return "L2";
  }
  return "?";
}

/// Undirected physical-connectivity graph with a native CR drive orientation
/// per edge. Immutable after construction.
class CouplingMap {
 public:
  CouplingMap() = default;
  CouplingMap(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
              const std::vector<std::pair<uint32_t, uint32_t>>& orientations = {})
      : n_(n) {
    for (auto [a, b] : edges) add_edge(a, b);
    for (auto [d, t] : orientations) {
      auto key = norm(d, t);
      if (!edges_.count(key)) throw Error("orientation given for a non-edge");
      orient_[key] = {d, t};
    }
    if (!connected()) throw Error("coupling map is not connected");
  }

  uint32_t num_physical() const { return n_; }

  bool is_edge(uint32_t a, uint32_t b) const {
    return a != b && edges_.count(norm(a, b)) > 0;
  }

  const std::vector<uint32_t>& neighbors(uint32_t q) const { return adj_.at(q); }
  size_t degree(uint32_t q) const { return adj_.at(q).size(); }

  std::vector<std::pair<uint32_t, uint32_t>> edges() const {
    return {edges_.begin(), edges_.end()};
  }

  /// Native drive order of an edge and whether the queried order matches it.
  std::pair<std::pair<uint32_t, uint32_t>, bool> orientation_of(uint32_t a,
                                                                uint32_t b) const {
    if (!is_edge(a, b)) throw Error("orientation_of: not an edge");
    auto key = norm(a, b);
    auto it = orient_.find(key);
    // default: lower physical index drives
    std::pair<uint32_t, uint32_t> d =
        it != orient_.end() ? it->second : std::make_pair(key.first, key.second);
    return {d, d == std::make_pair(a, b)};
  }

  /// BFS shortest-path distance.
  uint32_t distance(uint32_t a, uint32_t b) const {
    if (a == b) return 0;
    std::vector<int> dist(n_, -1);
    std::queue<uint32_t> bfs;
    bfs.push(a);
    dist[a] = 0;
    while (!bfs.empty()) {
      uint32_t u = bfs.front();
      bfs.pop();
      for (uint32_t v : adj_.at(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          if (v == b) return (uint32_t)dist[v];
          bfs.push(v);
        }
      }
    }
    throw Error("distance: disconnected qubits");
  }

  /// One shortest path from a to b (deterministic: lowest-index expansion).
  std::vector<uint32_t> shortest_path(uint32_t a, uint32_t b) const {
    std::vector<int> prev(n_, -1);
    std::vector<int> dist(n_, -1);
    std::queue<uint32_t> bfs;
    bfs.push(a);
    dist[a] = 0;
    while (!bfs.empty()) {
      uint32_t u = bfs.front();
      bfs.pop();
      for (uint32_t v : adj_.at(u))
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          prev[v] = (int)u;
          bfs.push(v);
        }
    }
    if (dist[b] < 0) throw Error("shortest_path: disconnected");
    std::vector<uint32_t> path;
    for (int v = (int)b; v != -1; v = prev[v]) path.push_back((uint32_t)v);
    std::reverse(path.begin(), path.end());
    return path;
  }

  static CouplingMap from_json(const nlohmann::json& j) {
    std::vector<std::pair<uint32_t, uint32_t>> es, os;
    for (auto& e : j.at("edges")) es.push_back({e.at(0), e.at(1)});
    if (j.contains("orientations"))
      for (auto& o : j.at("orientations")) os.push_back({o.at(0), o.at(1)});
    return CouplingMap(j.at("n"), es, os);
  }

  static CouplingMap load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open coupling-map file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["edges"] = nlohmann::json::array();
    for (auto& [a, b] : edges_) j["edges"].push_back({a, b});
    j["orientations"] = nlohmann::json::array();
    for (auto& [a, b] : edges_) {
      auto [d, m] = orientation_of(a, b);
      j["orientations"].push_back({d.first, d.second});
    }
    return j;
  }

 private:
  static std::pair<uint32_t, uint32_t> norm(uint32_t a, uint32_t b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  void add_edge(uint32_t a, uint32_t b) {
    if (a == b || a >= n_ || b >= n_) throw Error("bad edge in coupling map");
    if (edges_.insert(norm(a, b)).second) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
  }

  bool connected() const {
    if (n_ == 0) return false;
    std::vector<bool> seen(n_, false);
    std::queue<uint32_t> bfs;
    bfs.push(0);
    seen[0] = true;
    uint32_t count = 1;
    while (!bfs.empty()) {
      uint32_t u = bfs.front();
      bfs.pop();
      auto it = adj_.find(u);
      if (it == adj_.end()) continue;
      for (uint32_t v : it->second)
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          bfs.push(v);
        }
    }
    return count == n_;
  }

  uint32_t n_ = 0;
  std::set<std::pair<uint32_t, uint32_t>> edges_;
  std::map<std::pair<uint32_t, uint32_t>, std::pair<uint32_t, uint32_t>> orient_;
  std::map<uint32_t, std::vector<uint32_t>> adj_;
};

/// Connectivity class of a physical triple. Throws when fewer than two of the
/// three internal pairs are edges (routing must move qubits first).
inline TopoTag topo_tag_of_triple(const CouplingMap& map, uint32_t q0, uint32_t q1,
                                  uint32_t q2) {
  if (q0 == q1 || q1 == q2 || q0 == q2) throw Error("topo tag needs distinct qubits");
  const std::array<uint32_t, 3> q{q0, q1, q2};
  bool e01 = map.is_edge(q0, q1), e12 = map.is_edge(q1, q2), e02 = map.is_edge(q0, q2);
  int count = (int)e01 + (int)e12 + (int)e02;
  if (count == 3) return TopoTag::F;
  if (count < 2) throw Error("triple is not connected");
  // shared endpoint = the qubit present in both edges
  int shared;
  if (!e01)
    shared = 2;
  else if (!e12)
    shared = 0;
  else
    shared = 1;
  (void)q;
  switch (shared) {
    case 0: return TopoTag::L0;
    case 1: return TopoTag::L1;
    default: return TopoTag::L2;
  }
}

/// 27-qubit heavy-hex lattice (IBM Falcon layout). Triangle-free.
inline const std::vector<std::pair<uint32_t, uint32_t>>& heavy_hex_27_edges() {
  static const std::vector<std::pair<uint32_t, uint32_t>> edges = {
      {0, 1},   {1, 2},   {1, 4},   {2, 3},   {3, 5},   {4, 7},   {5, 8},
      {6, 7},   {7, 10},  {8, 9},   {8, 11},  {10, 12}, {11, 14}, {12, 13},
      {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18}, {18, 21},
      {19, 20}, {19, 22}, {21, 23}, {22, 25}, {23, 24}, {24, 25}, {25, 26}};
  return edges;
}

/// Built-in maps: "line-N", "ring-N", "full-N", "heavy-hex-27".
inline CouplingMap builtin_map(const std::string& name) {
  auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  auto tail_num = [&](size_t prefix) -> uint32_t {
    try {
      int n = std::stoi(name.substr(prefix));
      if (n < 2) throw Error("");
      return (uint32_t)n;
    } catch (...) {
      throw Error("bad qubit count in builtin map name: " + name);
    }
  };
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  if (starts("line-")) {
    uint32_t n = tail_num(5);
    for (uint32_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return CouplingMap(n, edges);
  }
  if (starts("ring-")) {
    uint32_t n = tail_num(5);
    if (n < 3) throw Error("ring needs at least 3 qubits");
    for (uint32_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    return CouplingMap(n, edges);
  }
  if (starts("full-")) {
    uint32_t n = tail_num(5);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j) edges.push_back({i, j});
    return CouplingMap(n, edges);
  }
  if (name == "heavy-hex-27") return CouplingMap(27, heavy_hex_27_edges());
  throw Error("unknown builtin coupling map: " + name);
}

}  // namespace qctx
