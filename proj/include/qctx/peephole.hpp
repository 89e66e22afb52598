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

#include <set>

#include "qctx/dag.hpp"
#include "qctx/synth.hpp"
#include "qctx/unitary.hpp"

namespace qctx {

namespace peephole_detail {

inline bool same_qubits_ordered(const Gate& a, const Gate& b) { return a.qubits == b.qubits; }

inline bool same_qubits_set(const Gate& a, const Gate& b) {
  std::set<uint32_t> sa(a.qubits.begin(), a.qubits.end());
  std::set<uint32_t> sb(b.qubits.begin(), b.qubits.end());
  return sa == sb;
}

/// True when gates g then h cancel to the identity (up to a phase, which is
/// written to *phase).
inline bool is_inverse_pair(const Gate& g, const Gate& h, double* phase) {
  *phase = 0;
  auto k = [&](GateKind a, GateKind b) { return g.kind == a && h.kind == b; };
  if (k(GateKind::Cx, GateKind::Cx) || k(GateKind::H, GateKind::H) ||
      k(GateKind::X, GateKind::X) || k(GateKind::Ccx, GateKind::Ccx))
    return same_qubits_ordered(g, h);
  if (k(GateKind::Swap, GateKind::Swap)) return same_qubits_set(g, h);
  if (k(GateKind::T, GateKind::Tdg) || k(GateKind::Tdg, GateKind::T))
    return same_qubits_ordered(g, h);
  if (k(GateKind::U3, GateKind::U3) && same_qubits_ordered(g, h)) {
    Eigen::Matrix2cd prod = u3_matrix(h.params[0], h.params[1], h.params[2]) *
                            u3_matrix(g.params[0], g.params[1], g.params[2]);
    return is_identity_up_to_phase(prod, 1e-10, phase);
  }
  return false;
}

inline bool is_1q(const Gate& g) {
  return g.kind != GateKind::Barrier && g.qubits.size() == 1;
}

}  // namespace peephole_detail

/// Removes adjacent gate pairs G,G^-1 acting on identical qubits; iterates to
/// a fixpoint.
inline void cancel_inverse_pairs(CircuitDag& dag) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int id : dag.topological_ops()) {
      if (!dag.is_op(id)) continue;
      const Gate& g = dag.node(id).gate;
      if (g.kind == GateKind::Barrier) continue;
      // candidate partner: the immediate successor on every wire of g
      int partner = -1;
      bool adjacent = true;
      for (uint32_t q : g.qubits) {
        int s = dag.wire_neighbor(id, q, CircuitDag::Dir::Succ);
        if (!dag.is_op(s)) {
          adjacent = false;
          break;
        }
        if (partner == -1) partner = s;
        if (s != partner) {
          adjacent = false;
          break;
        }
      }
      if (!adjacent || partner < 0) continue;
      const Gate& h = dag.node(partner).gate;
      if (h.qubits.size() != g.qubits.size()) continue;
      double phase = 0;
      if (peephole_detail::is_inverse_pair(g, h, &phase)) {
        dag.remove_node(partner);
        dag.remove_node(id);
        dag.add_phase(phase);
        changed = true;
      }
    }
  }
}

/// Replaces each maximal run of single-qubit gates on a wire by one u3 (or
/// deletes it when the product is the identity up to phase).
inline void merge_1q_runs(CircuitDag& dag) {
  for (uint32_t q = 0; q < dag.num_qubits(); ++q) {
    int cur = dag.wire_neighbor(dag.in_sentinel(q), q, CircuitDag::Dir::Succ);
    while (dag.node(cur).type == CircuitDag::NodeType::Op) {
      // find a maximal run of 1q gates starting at cur
      if (!peephole_detail::is_1q(dag.node(cur).gate)) {
        cur = dag.wire_neighbor(cur, q, CircuitDag::Dir::Succ);
        continue;
      }
      std::vector<int> run{cur};
      int next = dag.wire_neighbor(cur, q, CircuitDag::Dir::Succ);
      while (dag.node(next).type == CircuitDag::NodeType::Op &&
             peephole_detail::is_1q(dag.node(next).gate)) {
        run.push_back(next);
        next = dag.wire_neighbor(next, q, CircuitDag::Dir::Succ);
      }
      if (run.size() == 1 && dag.node(cur).gate.kind == GateKind::U3) {
        cur = next;
        continue;
      }
      Eigen::Matrix2cd prod = Eigen::Matrix2cd::Identity();
      bool any_program = false;
      for (int id : run) {
        prod = Eigen::Matrix2cd(gate_unitary(dag.node(id).gate)) * prod;
        any_program |= dag.node(id).gate.tag == GateTag::Program;
      }
      double phase = 0;
      if (is_identity_up_to_phase(prod, 1e-10, &phase)) {
        dag.substitute_region(run, {});
        dag.add_phase(phase);
      } else {
        auto [p, ph] = extract_u3(prod);
        Gate merged = gate::u3(q, p.theta, p.phi, p.lambda,
                               any_program ? GateTag::Program : GateTag::Routing);
        dag.substitute_region(run, {merged});
        dag.add_phase(ph);
      }
      cur = next;
    }
  }
}

namespace peephole_detail {

struct Block { // maximal two-qubit run
  uint32_t a, b;              // wire pair, a < b
  std::vector<int> nodes;     // in topological order
  long cx_equiv = 0;          // cx = 1, swap = 3
};

/// Collects maximal runs of gates that touch only the pair {a,b}. A block is
/// a maximal stretch of the pair's wire-restricted gate sequence whose gates
/// act inside the pair; such a stretch is contiguous on both wires. Barriers
/// and routing-tagged gates end a block.
inline std::vector<Block> collect_2q_blocks(const CircuitDag& dag) {
  std::vector<Block> blocks;
  std::set<int> used;
  const std::vector<int> order = dag.topological_ops();
  for (int seed : order) {
    if (!dag.is_op(seed) || used.count(seed)) continue;
    const Gate& g = dag.node(seed).gate;
    if (g.kind != GateKind::Cx && g.kind != GateKind::Swap) continue;
    if (g.tag == GateTag::Routing) continue;
    uint32_t a = std::min(g.qubits[0], g.qubits[1]);
    uint32_t b = std::max(g.qubits[0], g.qubits[1]);

    auto touches = [&](int id) {
      for (uint32_t q : dag.node(id).gate.qubits)
        if (q == a || q == b) return true;
      return false;
    };
    auto inside = [&](int id) {
      const Gate& h = dag.node(id).gate;
      if (h.kind == GateKind::Barrier || h.tag == GateTag::Routing) return false;
      if (used.count(id)) return false;
      for (uint32_t q : h.qubits)
        if (q != a && q != b) return false;
      return true;
    };

    std::vector<int> sub;  // gates touching a or b, in topological order
    int seed_pos = -1;
    for (int id : order)
      if (touches(id)) {
        if (id == seed) seed_pos = (int)sub.size();
        sub.push_back(id);
      }
    int lo = seed_pos, hi = seed_pos;
    while (lo > 0 && inside(sub[lo - 1])) --lo;
    while (hi + 1 < (int)sub.size() && inside(sub[hi + 1])) ++hi;

    Block blk;
    blk.a = a;
    blk.b = b;
    for (int i = lo; i <= hi; ++i) {
      int id = sub[i];
      blk.nodes.push_back(id);
      const Gate& h = dag.node(id).gate;
      if (h.kind == GateKind::Cx) blk.cx_equiv += 1;
      if (h.kind == GateKind::Swap) blk.cx_equiv += 3;
      used.insert(id);
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

}  // namespace peephole_detail

/// Collects maximal two-qubit blocks with at least two CNOT-equivalents and
/// resynthesizes each to a minimal-CNOT circuit, substituting only when the
/// CNOT count drops by at least min_cx_gain.
inline void resynth_blocks_pass(CircuitDag& dag, long min_cx_gain = 1) {
  auto blocks = peephole_detail::collect_2q_blocks(dag);
  for (auto& blk : blocks) {
    if (blk.cx_equiv < 2) continue;
    bool alive = true;
    for (int id : blk.nodes)
      if (!dag.is_op(id)) alive = false;
    if (!alive) continue;

    // aggregate block unitary over local wires (a -> 0, b -> 1)
    Circuit local;
    local.num_qubits = 2;
    for (int id : blk.nodes) {
      Gate g = dag.node(id).gate;
      for (uint32_t& q : g.qubits) q = (q == blk.a) ? 0 : 1;
      local.gates.push_back(std::move(g));
    }
    Unitary u = circuit_unitary(local);
    Circuit repl;
    try {
      repl = resynth_2q_block(u);
    } catch (const Error&) {
      continue;  // failed fit leaves the block unchanged
    }
    long new_cx = basis_cnot_count(repl);
    if (blk.cx_equiv - new_cx < min_cx_gain) continue;

    std::vector<Gate> mapped;
    for (const Gate& g : repl.gates) {
      Gate m = g;
      for (uint32_t& q : m.qubits) q = (q == 0) ? blk.a : blk.b;
      m.tag = GateTag::Program;
      mapped.push_back(std::move(m));
    }
    dag.substitute_region(blk.nodes, mapped);
    dag.add_phase(repl.global_phase);
  }
}

/// Fixed pass pipeline: cancellation, 1q merging, block resynthesis, at most
/// `rounds` times (stops early at a fixpoint via the cx count).
inline void optimize_passes(CircuitDag& dag, int rounds = 3, bool with_resynth = true) {
  long prev = -1;
  for (int r = 0; r < rounds; ++r) {
    cancel_inverse_pairs(dag);
    merge_1q_runs(dag);
    if (with_resynth) resynth_blocks_pass(dag);
    long now = basis_cnot_count(dag.linearize());
    if (now == prev) break;
    prev = now;
  }
}

/// Optimizes a 3-qubit window circuit (used for variant scoring) and returns
/// the post-optimization CNOT-equivalent count.
inline std::pair<Circuit, long> optimize_window(const Circuit& window, int rounds = 3) {
  CircuitDag dag(window);
  optimize_passes(dag, rounds, true);
  Circuit out = dag.linearize();
  return {out, basis_cnot_count(out)};
}

struct WindowSplit {
  std::vector<int> left, middle, right;  // topo order; middle contains the region
};

/// Extends a window around `region` along each wire while gates touch only
/// `allowed` qubits, up to `per_side` gates on each side. Barriers and
/// routing-tagged gates end the window.
inline WindowSplit collect_window_around(const CircuitDag& dag,
                                         const std::set<int>& region,
                                         const std::set<uint32_t>& allowed,
                                         int per_side = 12) {
  auto touches = [&](int id) {
    for (uint32_t q : dag.node(id).gate.qubits)
      if (allowed.count(q)) return true;
    return false;
  };
  auto inside = [&](int id) {
    const Gate& g = dag.node(id).gate;
    if (g.kind == GateKind::Barrier || g.tag == GateTag::Routing) return false;
    for (uint32_t q : g.qubits)
      if (!allowed.count(q)) return false;
    return true;
  };
  std::vector<int> sub;
  int lo = -1, hi = -1;
  for (int id : dag.topological_ops()) {
    if (!touches(id)) continue;
    if (region.count(id)) {
      if (lo < 0) lo = (int)sub.size();
      hi = (int)sub.size();
    }
    sub.push_back(id);
  }
  if (lo < 0) throw Error("collect_window_around: region not found");
  WindowSplit w;
  for (int i = lo; i <= hi; ++i) {
    if (!region.count(sub[i]) && !inside(sub[i]))
      throw Error("collect_window_around: region is not contiguous on its wires");
    w.middle.push_back(sub[i]);
  }
  int l = lo, r = hi;
  while (l > 0 && inside(sub[l - 1]) && (lo - l) < per_side) --l;
  while (r + 1 < (int)sub.size() && inside(sub[r + 1]) && (r - hi) < per_side) ++r;
  for (int i = l; i < lo; ++i) w.left.push_back(sub[i]);
  for (int i = hi + 1; i <= r; ++i) w.right.push_back(sub[i]);
  return w;
}

/// Runs the pass pipeline restricted to the window around `region` and
/// returns the post-optimization CNOT-equivalent count of that window.
/// Gates outside the window are untouched.
inline long local_optimize(CircuitDag& dag, const std::vector<int>& region,
                           int window_bound = 12) {
  if (region.empty()) return 0;
  std::set<uint32_t> allowed;
  for (int id : region)
    for (uint32_t q : dag.node(id).gate.qubits) allowed.insert(q);
  std::set<int> rset(region.begin(), region.end());
  WindowSplit w = collect_window_around(dag, rset, allowed, window_bound);

  std::vector<int> all(w.left);
  for (int id : w.middle) all.push_back(id);
  for (int id : w.right) all.push_back(id);

  std::vector<uint32_t> wires(allowed.begin(), allowed.end());
  std::map<uint32_t, uint32_t> to_local;
  for (uint32_t i = 0; i < wires.size(); ++i) to_local[wires[i]] = i;

  Circuit local;
  local.num_qubits = (uint32_t)wires.size();
  for (int id : all) {
    Gate g = dag.node(id).gate;
    for (uint32_t& q : g.qubits) q = to_local.at(q);
    local.gates.push_back(std::move(g));
  }
  auto [opt, count] = optimize_window(local);
  std::vector<Gate> mapped;
  for (const Gate& g : opt.gates) {
    Gate m = g;
    for (uint32_t& q : m.qubits) q = wires[q];
    mapped.push_back(std::move(m));
  }
  dag.substitute_region(all, mapped);
  dag.add_phase(opt.global_phase - local.global_phase);
  return count;
}

}  // namespace qctx
