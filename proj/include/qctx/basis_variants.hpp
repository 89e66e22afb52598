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

#include <deque>
#include <sstream>

#include "json.hpp"
#include "qctx/peephole.hpp"
#include "qctx/topology.hpp"
#include "qctx/unitary.hpp"

namespace qctx {

/// Five-element tag of a Toffoli decomposition variant. pre/suc name the
/// boundary CNOT's control and target logical positions ("12" = control at
/// position 1, target at position 2).
struct BasisVariantTag {
  std::string pre, suc;
  int design = 0;  // 0 = fully-connected canonical family, 1 = 8-CNOT linear
  TopoTag topo = TopoTag::F;
  char opt = 'O';  // 'O' original | 'I' inversed

  std::string str() const {
    return "(" + pre + "," + suc + "," + std::to_string(design) + "," +
           topo_name(topo) + "," + std::string(1, opt) + ")";
  }
  bool operator==(const BasisVariantTag& o) const {
    return pre == o.pre && suc == o.suc && design == o.design && topo == o.topo &&
           opt == o.opt;
  }
};

/// A tagged 3-qubit template over logical positions {0, 1 = controls,
/// 2 = target}, unitarily equal to ccx up to global phase.
struct BasisVariant {
  BasisVariantTag tag;
  Circuit templ;  // num_qubits == 3
};

namespace basis_detail {

inline std::string pair_tag(const Gate& cx) {
  return std::to_string(cx.qubits[0]) + std::to_string(cx.qubits[1]);
}

inline TopoTag topo_of_template(const Circuit& t) {
  std::set<std::pair<uint32_t, uint32_t>> pairs;
  for (const Gate& g : t.gates)
    if (g.qubits.size() == 2)
      pairs.insert({std::min(g.qubits[0], g.qubits[1]),
                    std::max(g.qubits[0], g.qubits[1])});
  if (pairs.size() >= 3) return TopoTag::F;
  if (pairs.size() < 2) throw Error("template does not couple all three qubits");
  std::map<uint32_t, int> cnt;
  for (auto& [a, b] : pairs) {
    cnt[a]++;
    cnt[b]++;
  }
  for (auto& [q, n] : cnt)
    if (n == 2) return q == 0 ? TopoTag::L0 : q == 1 ? TopoTag::L1 : TopoTag::L2;
  throw Error("template pair structure is not a path");
}

inline void recompute_structural_tag(BasisVariant& v) {
  const Gate* first = nullptr;
  const Gate* last = nullptr;
  for (const Gate& g : v.templ.gates)
    if (g.kind == GateKind::Cx) {
      if (!first) first = &g;
      last = &g;
    }
  if (!first) throw Error("template contains no CNOT");
  v.tag.pre = pair_tag(*first);
  v.tag.suc = pair_tag(*last);
  v.tag.topo = topo_of_template(v.templ);
}

inline Circuit relabel(const Circuit& c, const std::array<uint32_t, 3>& perm) {
  Circuit r = c;
  for (Gate& g : r.gates)
    for (uint32_t& q : g.qubits) q = perm[q];
  return r;
}

/// Cancels adjacent h/h (and any other inverse) pairs; canonicalizes the
/// dressed templates produced by control/target permutation.
inline Circuit tidy(const Circuit& c) {
  CircuitDag dag(c);
  cancel_inverse_pairs(dag);
  return dag.linearize();
}

inline std::string serialize_gates(const Circuit& c) {
  std::ostringstream os;
  for (const Gate& g : c.gates) {
    os << kind_name(g.kind);
    for (uint32_t q : g.qubits) os << q;
    os << ";";
  }
  return os.str();
}

}  // namespace basis_detail

/// Canonical fully connected 6-CNOT Toffoli template (design 0).
inline Circuit canonical_toffoli_template() {
  using namespace gate;
  Circuit c;
  c.num_qubits = 3;
  c.gates = {h(2),  cx(1, 2), tdg(2),   cx(0, 2), t(2),   cx(1, 2), tdg(2), cx(0, 2),
             t(1),  t(2),     cx(0, 1), h(2),     t(0),   tdg(1),   cx(0, 1)};
  return c;
}

/// 8-CNOT linearly connected Toffoli template (design 1, path through
/// position 2).
inline Circuit linear_toffoli_template() {
  using namespace gate;
  Circuit c;
  c.num_qubits = 3;
  c.gates = {h(2),     cx(2, 1), cx(0, 2), t(1),     cx(2, 1), t(1),
             t(2),     cx(0, 2), cx(2, 1), cx(0, 2), tdg(1),   cx(2, 1),
             cx(0, 2), tdg(0),   tdg(1),   tdg(2),   h(2)};
  return c;
}

/// Reverses the template and inverts each gate; pre/suc swap and the opt tag
/// flips between original and inversed.
inline BasisVariant invert_variant(const BasisVariant& v) {
  BasisVariant r;
  r.templ.num_qubits = 3;
  double phase = -v.templ.global_phase;
  for (auto it = v.templ.gates.rbegin(); it != v.templ.gates.rend(); ++it) {
    auto [g, dp] = inverse_gate(*it);
    phase += dp;
    r.templ.gates.push_back(std::move(g));
  }
  r.templ.global_phase = phase;
  r.tag = v.tag;
  r.tag.opt = v.tag.opt == 'O' ? 'I' : 'O';
  basis_detail::recompute_structural_tag(r);
  return r;
}

/// Swaps the two control positions (0 <-> 1) in every gate; Toffoli is
/// control-symmetric so the unitary is unchanged.
inline BasisVariant permute_controls(const BasisVariant& v) {
  BasisVariant r = v;
  r.templ = basis_detail::relabel(v.templ, {1, 0, 2});
  basis_detail::recompute_structural_tag(r);
  return r;
}

/// Exchanges the target with the chosen control by viewing the gate as a
/// multicontrolled Z (conjugating by Hadamards), then relabels so the target
/// sits at position 2 again. which_control must be 0 or 1 (2 is a no-op).
inline BasisVariant permute_control_target(const BasisVariant& v, uint32_t which_control) {
  if (which_control == 2) return v;
  if (which_control > 2) throw Error("permute_control_target: bad control position");
  Circuit dressed;
  dressed.num_qubits = 3;
  dressed.gates.push_back(gate::h(which_control));
  dressed.gates.push_back(gate::h(2));
  for (const Gate& g : v.templ.gates) dressed.gates.push_back(g);
  dressed.gates.push_back(gate::h(2));
  dressed.gates.push_back(gate::h(which_control));
  dressed.global_phase = v.templ.global_phase;

  std::array<uint32_t, 3> perm{0, 1, 2};
  std::swap(perm[which_control], perm[2]);
  BasisVariant r;
  r.tag = v.tag;
  r.templ = basis_detail::tidy(basis_detail::relabel(dressed, perm));
  basis_detail::recompute_structural_tag(r);
  return r;
}

struct BasisLibrary {
  std::vector<BasisVariant> variants;
  std::map<TopoTag, std::vector<int>> by_topo;

  const std::vector<int>& of_topo(TopoTag t) const {
    static const std::vector<int> empty;
    auto it = by_topo.find(t);
    return it == by_topo.end() ? empty : it->second;
  }
  /// Fixed-template representative of a topo class (used by baseline mode):
  /// the O-variant with the lowest (design, pre, suc).
  int fixed_representative(TopoTag t) const {
    int best = -1;
    for (int i : of_topo(t)) {
      const BasisVariantTag& tg = variants[i].tag;
      if (tg.opt != 'O') continue;
      if (best < 0) {
        best = i;
        continue;
      }
      const BasisVariantTag& bt = variants[best].tag;
      auto key = std::make_tuple(tg.design, tg.pre, tg.suc);
      auto bkey = std::make_tuple(bt.design, bt.pre, bt.suc);
      if (key < bkey) best = i;
    }
    if (best < 0) throw Error("no fixed representative for topo class");
    return best;
  }
};

/// Closure of the two seed templates under {invert, permute_controls,
/// permute_control_target}, deduplicated by (tag, gate list), each entry
/// validated against ccx at 1e-9.
inline BasisLibrary generate_basis_library() {
  const Unitary ccx = ccx_matrix();
  BasisLibrary lib;
  std::set<std::string> seen;

  auto push_if_new = [&](const BasisVariant& v) -> bool {
    std::string key = v.tag.str() + "|" + basis_detail::serialize_gates(v.templ);
    if (!seen.insert(key).second) return false;
    if (!phase_equiv(circuit_unitary(v.templ), ccx, 1e-9))
      throw Error("generated Toffoli variant failed validation: " + v.tag.str());
    lib.by_topo[v.tag.topo].push_back((int)lib.variants.size());
    lib.variants.push_back(v);
    return true;
  };

  BasisVariant canonical;
  canonical.templ = canonical_toffoli_template();
  canonical.tag.design = 0;
  canonical.tag.opt = 'O';
  basis_detail::recompute_structural_tag(canonical);

  BasisVariant linear;
  linear.templ = linear_toffoli_template();
  linear.tag.design = 1;
  linear.tag.opt = 'O';
  basis_detail::recompute_structural_tag(linear);

  std::deque<BasisVariant> queue;
  for (auto& s : {canonical, linear})
    if (push_if_new(s)) queue.push_back(s);

  size_t expansions = 0;
  while (!queue.empty()) {
    if (++expansions > 4096) throw Error("basis library closure did not terminate");
    BasisVariant v = queue.front();
    queue.pop_front();
    for (const BasisVariant& next :
         {invert_variant(v), permute_controls(v), permute_control_target(v, 0),
          permute_control_target(v, 1)}) {
      if (push_if_new(next)) queue.push_back(next);
    }
  }
  for (TopoTag t : {TopoTag::F, TopoTag::L0, TopoTag::L1, TopoTag::L2})
    if (lib.of_topo(t).empty()) throw Error("basis library misses a topo class");
  // The orbit of the two seeds under the three equivalence rules carries all
  // 24 reachable tags (12 per design: 6 boundary pairs x O/I), with a few
  // tags realized by more than one template.
  std::set<std::string> tags;
  for (const BasisVariant& v : lib.variants) tags.insert(v.tag.str());
  if (tags.size() < 24 || lib.variants.size() < 24)
    throw Error("basis library closure is incomplete");
  return lib;
}

/// Instantiates a template onto physical qubits (logical position i ->
/// phys[i]) with the given provenance tag.
inline Circuit instantiate_template(const Circuit& templ,
                                    const std::vector<uint32_t>& phys, GateTag tag) {
  Circuit c;
  c.num_qubits = *std::max_element(phys.begin(), phys.end()) + 1;
  c.global_phase = templ.global_phase;
  for (const Gate& g : templ.gates) {
    Gate m = g;
    for (uint32_t& q : m.qubits) q = phys[q];
    m.tag = tag;
    c.gates.push_back(std::move(m));
  }
  return c;
}

/// Context-aware variant choice for one Toffoli node: scores every variant
/// whose topo tag matches the node's physical triple by substituting it into
/// the surrounding window and running the window optimizer, then returns the
/// variant with the minimum CNOT-equivalent count. Deterministic tie-break:
/// opt 'O' before 'I', then lower design, then lexicographic (pre, suc).
inline int select_basis_variant(const CircuitDag& dag, int ccx_node,
                                const BasisLibrary& lib, const CouplingMap& map,
                                int window_bound = 12) {
  const Gate& g = dag.node(ccx_node).gate;
  if (g.kind != GateKind::Ccx) throw Error("select_basis_variant: node is not a ccx");
  TopoTag topo = topo_tag_of_triple(map, g.qubits[0], g.qubits[1], g.qubits[2]);
  const std::vector<int>& cands = lib.of_topo(topo);
  if (cands.empty()) throw Error("no variant matches the topo tag");

  std::set<uint32_t> allowed(g.qubits.begin(), g.qubits.end());
  WindowSplit w = collect_window_around(dag, {ccx_node}, allowed, window_bound);

  std::map<uint32_t, uint32_t> to_local;
  for (uint32_t i = 0; i < 3; ++i) to_local[g.qubits[i]] = i;
  auto local_gates = [&](const std::vector<int>& ids, Circuit& out) {
    for (int id : ids) {
      Gate lg = dag.node(id).gate;
      for (uint32_t& q : lg.qubits) q = to_local.at(q);
      out.gates.push_back(std::move(lg));
    }
  };
  Circuit left, right;
  left.num_qubits = right.num_qubits = 3;
  local_gates(w.left, left);
  local_gates(w.right, right);

  int best = -1;
  long best_count = 0;
  for (int idx : cands) {
    const BasisVariant& v = lib.variants[idx];
    Circuit probe;
    probe.num_qubits = 3;
    probe.gates = left.gates;
    for (const Gate& tg : v.templ.gates) probe.gates.push_back(tg);
    for (const Gate& rg : right.gates) probe.gates.push_back(rg);
    long count = optimize_window(probe).second;
    if (best < 0) {
      best = idx;
      best_count = count;
      continue;
    }
    const BasisVariantTag& a = v.tag;
    const BasisVariantTag& b = lib.variants[best].tag;
    auto rank = [](const BasisVariantTag& t) {
      return std::make_tuple(t.opt == 'O' ? 0 : 1, t.design, t.pre, t.suc);
    };
    if (count < best_count || (count == best_count && rank(a) < rank(b))) {
      best = idx;
      best_count = count;
    }
  }
  return best;
}

inline nlohmann::json basis_library_to_json(const BasisLibrary& lib) {
  nlohmann::json j = nlohmann::json::array();
  for (const BasisVariant& v : lib.variants) {
    nlohmann::json e;
    e["pre"] = v.tag.pre;
    e["suc"] = v.tag.suc;
    e["design"] = v.tag.design;
    e["topo"] = topo_name(v.tag.topo);
    e["opt"] = std::string(1, v.tag.opt);
    e["phase"] = v.templ.global_phase;
    e["gates"] = nlohmann::json::array();
    for (const Gate& g : v.templ.gates) {
      nlohmann::json ge;
      ge["kind"] = kind_name(g.kind);
      ge["qubits"] = g.qubits;
      if (!g.params.empty()) ge["params"] = g.params;
      e["gates"].push_back(std::move(ge));
    }
    j.push_back(std::move(e));
  }
  return j;
}

inline BasisLibrary basis_library_from_json(const nlohmann::json& j) {
  BasisLibrary lib;
  for (auto& e : j) {
    BasisVariant v;
    v.tag.pre = e.at("pre");
    v.tag.suc = e.at("suc");
    v.tag.design = e.at("design");
    std::string topo = e.at("topo");
    v.tag.topo = topo == "F"    ? TopoTag::F
                 : topo == "L0" ? TopoTag::L0
                 : topo == "L1" ? TopoTag::L1
                                : TopoTag::L2;
    v.tag.opt = std::string(e.at("opt"))[0];
    v.templ.num_qubits = 3;
    v.templ.global_phase = e.at("phase");
    static const std::map<std::string, GateKind> kNames = {
        {"u3", GateKind::U3}, {"rz", GateKind::Rz},    {"sx", GateKind::Sx},
        {"x", GateKind::X},   {"h", GateKind::H},      {"t", GateKind::T},
        {"tdg", GateKind::Tdg}, {"cx", GateKind::Cx},  {"swap", GateKind::Swap},
        {"ccx", GateKind::Ccx}, {"rzx", GateKind::Rzx}};
    for (auto& ge : e.at("gates")) {
      Gate g;
      g.kind = kNames.at(ge.at("kind"));
      g.qubits = ge.at("qubits").get<std::vector<uint32_t>>();
      if (ge.contains("params")) g.params = ge.at("params").get<std::vector<double>>();
      v.templ.gates.push_back(std::move(g));
    }
    lib.by_topo[v.tag.topo].push_back((int)lib.variants.size());
    lib.variants.push_back(std::move(v));
  }
  return lib;
}

}  // namespace qctx
