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

#include <numeric>
#include <random>

#include "qctx/topology.hpp"
#include "qctx/unitary.hpp"

namespace qctx {

/// Ensures the circuit is at the {1q, 2q, Toffoli} level. The supported
/// alphabet is already there, so this validates and passes gates through;
/// Toffolis deliberately survive routing undecomposed.
inline Circuit decompose_to_trios_level(const Circuit& c) {
  c.validate();
  return c;
}

struct RoutedCircuit {
  Circuit circuit;                       // over physical wires
  std::vector<uint32_t> initial_layout;  // logical -> physical
  std::vector<uint32_t> final_layout;    // logical -> physical
  std::vector<uint32_t> wire_perm;       // content of wire w ends on wire_perm[w]
  long routing_swaps = 0;
};

namespace router_detail {

struct Frame {
  std::vector<int> log_at;   // physical -> logical (-1 = idle)
  std::vector<uint32_t> pos; // logical -> physical
  std::vector<uint32_t> perm;  // initial wire -> current wire of its content
  Circuit* out;
  long swaps = 0;

  void apply_swap(uint32_t a, uint32_t b) {
    out->push(gate::swap(a, b, GateTag::Routing));
    ++swaps;
    int la = log_at[a], lb = log_at[b];
    std::swap(log_at[a], log_at[b]);
    if (la >= 0) pos[la] = b;
    if (lb >= 0) pos[lb] = a;
    for (uint32_t& w : perm) {
      if (w == a)
        w = b;
      else if (w == b)
        w = a;
    }
  }
};

/// One swap step moving the content of `from` toward `to` along a shortest
/// path (optionally avoiding a set of frozen wires when possible).
inline void step_towards(Frame& f, const CouplingMap& map, uint32_t from, uint32_t to,
                         const std::set<uint32_t>& avoid) {
  // BFS that prefers paths through non-frozen wires.
  auto bfs = [&](bool use_avoid) -> std::vector<uint32_t> {
    std::vector<int> prev(map.num_physical(), -1);
    std::vector<int> dist(map.num_physical(), -1);
    std::queue<uint32_t> q;
    q.push(from);
    dist[from] = 0;
    while (!q.empty()) {
      uint32_t u = q.front();
      q.pop();
      for (uint32_t v : map.neighbors(u)) {
        if (dist[v] >= 0) continue;
        if (use_avoid && avoid.count(v) && v != to) continue;
        dist[v] = dist[u] + 1;
        prev[v] = (int)u;
        q.push(v);
      }
    }
    if (dist[to] < 0) return {};
    std::vector<uint32_t> path;
    for (int v = (int)to; v != -1; v = prev[v]) path.push_back((uint32_t)v);
    std::reverse(path.begin(), path.end());
    return path;
  };
  std::vector<uint32_t> path = bfs(true);
  if (path.empty()) path = bfs(false);
  if (path.size() < 2) throw Error("router: no path between qubits");
  f.apply_swap(path[0], path[1]);
}

}  // namespace router_detail

/// Greedy deterministic initial layout: the most-interacting logical qubit
/// goes to the highest-degree physical qubit, later qubits prefer free
/// neighbors of their strongest already-placed partner. The seed rotates
/// choices inside exact tie groups.
inline std::vector<uint32_t> initial_layout(const Circuit& c, const CouplingMap& map,
                                            uint64_t seed) {
  const uint32_t n = c.num_qubits, np = map.num_physical();
  if (n > np) throw Error("circuit is wider than the device");
  std::vector<std::map<uint32_t, long>> weight(n);
  std::vector<long> strength(n, 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Barrier || g.qubits.size() < 2) continue;
    for (size_t i = 0; i < g.qubits.size(); ++i)
      for (size_t j = i + 1; j < g.qubits.size(); ++j) {
        weight[g.qubits[i]][g.qubits[j]]++;
        weight[g.qubits[j]][g.qubits[i]]++;
        strength[g.qubits[i]]++;
        strength[g.qubits[j]]++;
      }
  }
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return strength[a] > strength[b]; });

  std::mt19937_64 rng(seed);
  auto rotate_ties = [&](std::vector<uint32_t>& cands) {
    if (cands.size() > 1) {
      size_t r = (size_t)(rng() % cands.size());
      std::rotate(cands.begin(), cands.begin() + r, cands.end());
    }
  };

  std::vector<int> phys_of(n, -1);
  std::vector<bool> taken(np, false);
  for (uint32_t l : order) {
    // strongest placed partner
    int partner = -1;
    long best_w = 0;
    for (auto& [o, w] : weight[l])
      if (phys_of[o] >= 0 && (w > best_w || (w == best_w && partner >= 0 && o < (uint32_t)partner))) {
        partner = (int)o;
        best_w = w;
      }
    std::vector<uint32_t> cands;
    if (partner >= 0) {
      uint32_t pp = (uint32_t)phys_of[partner];
      size_t best_deg = 0;
      for (uint32_t v : map.neighbors(pp))
        if (!taken[v]) best_deg = std::max(best_deg, map.degree(v));
      for (uint32_t v : map.neighbors(pp))
        if (!taken[v] && map.degree(v) == best_deg) cands.push_back(v);
      if (cands.empty()) {
        // nearest free physical to the partner (BFS order, lowest index)
        uint32_t best = np, bd = np + 1;
        for (uint32_t p = 0; p < np; ++p)
          if (!taken[p]) {
            uint32_t d = map.distance(pp, p);
            if (d < bd || (d == bd && p < best)) {
              bd = d;
              best = p;
            }
          }
        cands.push_back(best);
      }
    } else {
      size_t best_deg = 0;
      for (uint32_t p = 0; p < np; ++p)
        if (!taken[p]) best_deg = std::max(best_deg, map.degree(p));
      for (uint32_t p = 0; p < np; ++p)
        if (!taken[p] && map.degree(p) == best_deg) cands.push_back(p);
    }
    std::sort(cands.begin(), cands.end());
    rotate_ties(cands);
    phys_of[l] = (int)cands.front();
    taken[cands.front()] = true;
  }
  std::vector<uint32_t> layout(n);
  for (uint32_t l = 0; l < n; ++l) layout[l] = (uint32_t)phys_of[l];
  return layout;
}

/// Inserts routing swaps so every two-qubit gate sits on an edge and every
/// Toffoli sits on a triple with at least two internal edges. Deterministic
/// for a fixed seed; inserted swaps are tagged as routing.
inline RoutedCircuit route(const Circuit& circuit, const CouplingMap& map,
                           uint64_t layout_seed = 0) {
  const uint32_t n = circuit.num_qubits, np = map.num_physical();
  if (n > np) throw Error("circuit is wider than the device");

  RoutedCircuit out;
  out.circuit.num_qubits = np;
  out.circuit.global_phase = circuit.global_phase;
  out.initial_layout = initial_layout(circuit, map, layout_seed);

  router_detail::Frame f;
  f.out = &out.circuit;
  f.log_at.assign(np, -1);
  f.pos.resize(n);
  f.perm.resize(np);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (uint32_t l = 0; l < n; ++l) {
    f.pos[l] = out.initial_layout[l];
    f.log_at[out.initial_layout[l]] = (int)l;
  }

  auto emit_mapped = [&](const Gate& g) {
    Gate m = g;
    for (uint32_t& q : m.qubits) q = f.pos[q];
    out.circuit.push(std::move(m));
  };

  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::Barrier || g.qubits.size() == 1) {
      emit_mapped(g);
      continue;
    }
    if (g.qubits.size() == 2) {
      uint32_t la = g.qubits[0], lb = g.qubits[1];
      while (!map.is_edge(f.pos[la], f.pos[lb])) {
        uint32_t mover = std::min(la, lb);
        uint32_t other = mover == la ? lb : la;
        router_detail::step_towards(f, map, f.pos[mover], f.pos[other], {});
      }
      emit_mapped(g);
      continue;
    }
    // ccx: need a triple with >= 2 internal edges
    uint32_t l0 = g.qubits[0], l1 = g.qubits[1], l2 = g.qubits[2];
    auto executable = [&]() {
      int edges = (int)map.is_edge(f.pos[l0], f.pos[l1]) +
                  (int)map.is_edge(f.pos[l1], f.pos[l2]) +
                  (int)map.is_edge(f.pos[l0], f.pos[l2]);
      return edges >= 2;
    };
    if (!executable()) {
      // pick the center minimizing total distance to the three qubits
      uint32_t best_c = np;
      long best_cost = -1;
      for (uint32_t cph = 0; cph < np; ++cph) {
        if (map.degree(cph) < 2) continue;
        long cost = (long)map.distance(f.pos[l0], cph) +
                    (long)map.distance(f.pos[l1], cph) +
                    (long)map.distance(f.pos[l2], cph);
        if (best_cost < 0 || cost < best_cost) {
          best_cost = cost;
          best_c = cph;
        }
      }
      // center slot goes to the member closest to it (ties: lower logical)
      std::array<uint32_t, 3> mem{l0, l1, l2};
      uint32_t center_mem = mem[0];
      uint32_t bd = map.distance(f.pos[mem[0]], best_c);
      for (uint32_t m : {mem[1], mem[2]}) {
        uint32_t d = map.distance(f.pos[m], best_c);
        if (d < bd) {
          bd = d;
          center_mem = m;
        }
      }
      // slots for the other two: distinct neighbors of the center
      std::vector<uint32_t> others;
      for (uint32_t m : mem)
        if (m != center_mem) others.push_back(m);
      std::vector<uint32_t> nbrs = map.neighbors(best_c);
      std::sort(nbrs.begin(), nbrs.end());
      std::map<uint32_t, uint32_t> slot;  // logical -> physical
      slot[center_mem] = best_c;
      std::set<uint32_t> used_slots{best_c};
      for (uint32_t m : others) {
        uint32_t pick = np, pd = np + 1;
        for (uint32_t v : nbrs)
          if (!used_slots.count(v)) {
            uint32_t d = map.distance(f.pos[m], v);
            if (d < pd || (d == pd && v < pick)) {
              pd = d;
              pick = v;
            }
          }
        if (pick == np) throw Error("router: center has too few free neighbors");
        slot[m] = pick;
        used_slots.insert(pick);
      }
      // move members to slots; iterate to repair displacements
      for (int round = 0; round < 64; ++round) {
        bool done = true;
        for (uint32_t m : {center_mem, others[0], others[1]}) {
          if (f.pos[m] == slot[m]) continue;
          done = false;
          std::set<uint32_t> frozen;
          for (auto& [lm, s] : slot)
            if (lm != m && f.pos[lm] == s) frozen.insert(s);
          router_detail::step_towards(f, map, f.pos[m], slot[m], frozen);
          break;
        }
        if (done) break;
        if (round == 63) throw Error("router: triple placement did not converge");
      }
      if (!executable()) throw Error("router: triple placement failed");
    }
    emit_mapped(g);
  }

  out.final_layout.resize(n);
  for (uint32_t l = 0; l < n; ++l) out.final_layout[l] = f.pos[l];
  out.wire_perm = f.perm;
  out.routing_swaps = f.swaps;
  return out;
}

/// Permutation unitary: the content of wire w moves to wire perm[w].
inline Unitary wire_permutation_unitary(const std::vector<uint32_t>& perm) {
  const uint32_t n = (uint32_t)perm.size();
  if (n > (uint32_t)kMaxUnitaryQubits) throw Error("permutation unitary too wide");
  const Eigen::Index d = Eigen::Index(1) << n;
  Unitary p = Unitary::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x) {
    Eigen::Index y = 0;
    for (uint32_t w = 0; w < n; ++w)
      if (x & (Eigen::Index(1) << w)) y |= Eigen::Index(1) << perm[w];
    p(y, x) = 1;
  }
  return p;
}

/// Embeds a logical circuit on physical wires via a layout.
inline Circuit embed_on_physical(const Circuit& c, const std::vector<uint32_t>& layout,
                                 uint32_t num_physical) {
  Circuit r;
  r.num_qubits = num_physical;
  r.global_phase = c.global_phase;
  for (const Gate& g : c.gates) {
    Gate m = g;
    for (uint32_t& q : m.qubits) q = layout[q];
    r.gates.push_back(std::move(m));
  }
  return r;
}

/// Phase-equivalence of a compiled circuit against the input, modulo the
/// routing permutation: compiled == P * embed(input) up to global phase.
inline bool verify_against_input(const Circuit& compiled, const Circuit& input,
                                 const RoutedCircuit& routed, double tol) {
  Unitary v = circuit_unitary(compiled);
  Unitary w = circuit_unitary(
      embed_on_physical(input, routed.initial_layout, compiled.num_qubits));
  Unitary p = wire_permutation_unitary(routed.wire_perm);
  return phase_equiv(v, p * w, tol);
}

}  // namespace qctx
