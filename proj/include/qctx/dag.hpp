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

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "qctx/gates.hpp"

namespace qctx {

/// Wire-edge DAG over a circuit. Each qubit's wire is a single path from an
/// input sentinel through the gates acting on it to an output sentinel.
class CircuitDag {
 public:
  enum class NodeType : uint8_t { In, Out, Op };
  enum class Dir : uint8_t { Pred, Succ };

  struct Node {
    NodeType type = NodeType::Op;
    Gate gate;               // valid for Op nodes
    uint32_t sentinel = 0;   // wire index for In/Out nodes
    bool alive = true;
    std::map<uint32_t, int> pred;  // wire -> node id
    std::map<uint32_t, int> succ;
  };

  CircuitDag() = default;

  explicit CircuitDag(const Circuit& c)
      : num_qubits_(c.num_qubits), global_phase_(c.global_phase) {
    in_.resize(num_qubits_);
    out_.resize(num_qubits_);
    std::vector<int> tail(num_qubits_);
    for (uint32_t q = 0; q < num_qubits_; ++q) {
      in_[q] = new_node(NodeType::In, q);
      out_[q] = new_node(NodeType::Out, q);
      tail[q] = in_[q];
    }
    for (const Gate& g : c.gates) {
      validate_gate(g, num_qubits_);
      int id = new_node(NodeType::Op, 0);
      nodes_[id].gate = g;
      for (uint32_t q : wires_of(g)) {
        link(tail[q], id, q);
        tail[q] = id;
      }
    }
    for (uint32_t q = 0; q < num_qubits_; ++q) link(tail[q], out_[q], q);
  }

  uint32_t num_qubits() const { return num_qubits_; }
  double global_phase() const { return global_phase_; }
  void add_phase(double p) { global_phase_ += p; }

  int in_sentinel(uint32_t q) const { return in_[q]; }
  int out_sentinel(uint32_t q) const { return out_[q]; }
  const Node& node(int id) const { return nodes_[id]; }
  bool is_op(int id) const { return nodes_[id].alive && nodes_[id].type == NodeType::Op; }

  /// All alive op node ids in a topological order (deterministic: smallest id
  /// first among ready nodes).
  std::vector<int> topological_ops() const {
    std::map<int, int> indeg;
    for (int id = 0; id < (int)nodes_.size(); ++id) {
      if (!is_op(id)) continue;
      std::set<int> preds;
      for (auto& [q, p] : nodes_[id].pred)
        if (nodes_[p].type == NodeType::Op) preds.insert(p);
      indeg[id] = (int)preds.size();
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (auto& [id, d] : indeg)
      if (d == 0) ready.push(id);
    std::vector<int> order;
    while (!ready.empty()) {
      int id = ready.top();
      ready.pop();
      order.push_back(id);
      std::set<int> next;
      for (auto& [q, s] : nodes_[id].succ)
        if (nodes_[s].type == NodeType::Op) next.insert(s);
      for (int s : next)
        if (--indeg[s] == 0) ready.push(s);
    }
    return order;
  }

  Circuit linearize() const {
    Circuit c;
    c.num_qubits = num_qubits_;
    c.global_phase = global_phase_;
    for (int id : topological_ops()) c.gates.push_back(nodes_[id].gate);
    return c;
  }

  /// Immediate neighbor gate (or sentinel) of `id` along wire `q`.
  int wire_neighbor(int id, uint32_t q, Dir dir) const {
    const Node& n = nodes_[id];
    const auto& m = dir == Dir::Pred ? n.pred : n.succ;
    auto it = m.find(q);
    if (it == m.end()) throw Error("wire_neighbor: node does not act on qubit");
    return it->second;
  }

  /// Removes an op node, joining its neighbors on every wire.
  void remove_node(int id) {
    Node& n = nodes_[id];
    if (!n.alive || n.type != NodeType::Op) throw Error("remove_node: not an op node");
    for (auto& [q, p] : n.pred) {
      int s = n.succ.at(q);
      set_succ(p, q, s);
      set_pred(s, q, p);
    }
    n.alive = false;
  }

  /// Replaces node `id` by the gates of `replacement` (a circuit over local
  /// wires 0..k-1) mapped through `qubit_map` (local wire -> global wire).
  /// The replacement's gates inherit the replaced node's tag, and the
  /// replacement's global phase is absorbed into the dag's phase.
  /// Returns the ids of the inserted nodes.
  std::vector<int> substitute_node(int id, const Circuit& replacement,
                                   const std::vector<uint32_t>& qubit_map) {
    const Node& n = nodes_[id];
    if (!n.alive || n.type != NodeType::Op) throw Error("substitute_node: not an op node");
    std::vector<uint32_t> target(wires_of(n.gate));
    std::set<uint32_t> mapped(qubit_map.begin(), qubit_map.end());
    if (qubit_map.size() != target.size() || mapped.size() != qubit_map.size() ||
        !std::all_of(qubit_map.begin(), qubit_map.end(), [&](uint32_t q) {
          return std::find(target.begin(), target.end(), q) != target.end();
        }))
      throw Error("substitute_node: qubit_map is not a bijection onto the node's qubits");
    if (replacement.num_qubits > qubit_map.size())
      throw Error("substitute_node: replacement acts outside the mapped qubits");

    std::map<uint32_t, std::pair<int, int>> anchors;
    for (uint32_t q : target) anchors[q] = {n.pred.at(q), n.succ.at(q)};
    GateTag tag = n.gate.tag;
    remove_node(id);

    Circuit mapped_repl;
    mapped_repl.num_qubits = num_qubits_;
    for (const Gate& g : replacement.gates) {
      Gate m = g;
      for (uint32_t& q : m.qubits) q = qubit_map[q];
      m.tag = tag;
      mapped_repl.gates.push_back(std::move(m));
    }
    add_phase(replacement.global_phase);
    return splice(mapped_repl.gates, anchors);
  }

  /// Removes the nodes of `ids` (which must form a wire-contiguous region)
  /// and splices `gates` in their place. Returns inserted node ids.
  std::vector<int> substitute_region(const std::vector<int>& ids,
                                     const std::vector<Gate>& gates) {
    std::set<int> region(ids.begin(), ids.end());
    std::map<uint32_t, std::pair<int, int>> anchors;
    for (int id : ids) {
      const Node& n = nodes_[id];
      for (auto& [q, p] : n.pred)
        if (!region.count(p)) {
          if (anchors.count(q)) throw Error("substitute_region: region not contiguous");
          anchors[q].first = p;
        }
      for (auto& [q, s] : n.succ)
        if (!region.count(s)) anchors[q].second = s;
    }
    for (int id : ids) remove_node_region(id, region);
    return splice(gates, anchors);
  }

  /// All wires a gate acts on.
  static std::vector<uint32_t> wires_of(const Gate& g) { return g.qubits; }

 private:
  int new_node(NodeType t, uint32_t sentinel) {
    Node n;
    n.type = t;
    n.sentinel = sentinel;
    nodes_.push_back(std::move(n));
    return (int)nodes_.size() - 1;
  }

  void link(int a, int b, uint32_t q) {
    set_succ(a, q, b);
    set_pred(b, q, a);
  }
  void set_succ(int id, uint32_t q, int v) { nodes_[id].succ[q] = v; }
  void set_pred(int id, uint32_t q, int v) { nodes_[id].pred[q] = v; }

  void remove_node_region(int id, const std::set<int>& region) {
    // Like remove_node but tolerates neighbors already removed within region.
    Node& n = nodes_[id];
    if (!n.alive) return;
    for (auto& [q, p] : n.pred) {
      int s = n.succ.at(q);
      if (nodes_[p].alive) set_succ(p, q, s);
      if (nodes_[s].alive) set_pred(s, q, p);
    }
    n.alive = false;
  }

  std::vector<int> splice(const std::vector<Gate>& gates,
                          std::map<uint32_t, std::pair<int, int>>& anchors) {
    std::map<uint32_t, int> tail;
    for (auto& [q, a] : anchors) tail[q] = a.first;
    std::vector<int> inserted;
    for (const Gate& g : gates) {
      int id = new_node(NodeType::Op, 0);
      nodes_[id].gate = g;
      inserted.push_back(id);
      for (uint32_t q : wires_of(g)) {
        if (!tail.count(q)) throw Error("splice: gate acts outside the region wires");
        link(tail[q], id, q);
        tail[q] = id;
      }
    }
    for (auto& [q, a] : anchors) link(tail[q], a.second, q);
    return inserted;
  }

  uint32_t num_qubits_ = 0;
  double global_phase_ = 0.0;
  std::vector<Node> nodes_;
  std::vector<int> in_, out_;
};

inline CircuitDag build_dag(const Circuit& c) { return CircuitDag(c); }

}  // namespace qctx
