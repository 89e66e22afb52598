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

#include "json.hpp"
#include "qctx/peephole.hpp"
#include "qctx/synth.hpp"
#include "qctx/topology.hpp"

namespace qctx {

/// Orientation of the CR skeleton relative to the CNOT being decomposed:
/// NativeOrder drives from the control qubit, Reversed from the target.
enum class OriTag : uint8_t { NativeOrder, Reversed };
enum class Polarity : uint8_t { PlusMinus, MinusPlus };

/// Twelve boundary angles (four U3 gates, positions 1..4 = control-left,
/// control-right, target-left, target-right) plus the orientation.
struct NativeVariantTag {
  std::array<U3Params, 4> u;
  OriTag ori = OriTag::NativeOrder;
  Polarity polarity = Polarity::PlusMinus;
};

struct NativeVariant {
  NativeVariantTag tag;
  bool x_frames = false;       // Rx(180) frame gates from a polarity switch
  double cr_angle = kPi / 2;   // rzx angle; sign tracks the pulse order
  double phase_to_cx = 0;      // circuit_unitary(templ) * e^{i phase_to_cx} = cx

  uint32_t z_wire() const { return tag.ori == OriTag::NativeOrder ? 0u : 1u; }
  uint32_t x_wire() const { return 1u - z_wire(); }

  /// Template over logical wires {0 = control, 1 = target}.
  Circuit templ() const {
    Circuit c;
    c.num_qubits = 2;
    auto push_u3 = [&](uint32_t q, const U3Params& p) {
      c.push(gate::u3(q, p.theta, p.phi, p.lambda));
    };
    push_u3(0, tag.u[0]);
    push_u3(1, tag.u[2]);
    if (x_frames) c.push(gate::x(z_wire()));
    c.push(gate::rzx(z_wire(), x_wire(), cr_angle));
    if (x_frames) c.push(gate::x(z_wire()));
    push_u3(0, tag.u[1]);
    push_u3(1, tag.u[3]);
    return c;
  }

  /// Self-cancellation: the control-left gate is the exact inverse (up to
  /// phase) of the target-right gate, so ladder junctions merge away.
  bool self_cancelling() const {
    Eigen::Matrix2cd prod = u3_matrix(tag.u[0]) * u3_matrix(tag.u[3]);
    return is_identity_up_to_phase(prod, 1e-8);
  }
};

struct NativeLibrary {
  std::vector<NativeVariant> variants;  // insertion order is the tie-break order
  int canonical_index[2] = {-1, -1};    // per OriTag

  std::vector<int> by_ori(OriTag o) const {
    std::vector<int> out;
    for (int i = 0; i < (int)variants.size(); ++i)
      if (variants[i].tag.ori == o) out.push_back(i);
    return out;
  }
  int canonical_of(OriTag o) const { return canonical_index[(int)o]; }
};

/// Canonical U3 inverse: U3(th,ph,la)^-1 = U3(-th,-la,-ph).
inline U3Params inverse_u3(const U3Params& p) {
  return canonical_u3(-p.theta, -p.lambda, -p.phi);
}

/// Reverses the template and inverts each gate; boundary positions swap
/// (1<->2, 3<->4) and the CR sign flips.
inline NativeVariant invert_native(const NativeVariant& v) {
  NativeVariant r = v;
  r.tag.u[0] = inverse_u3(v.tag.u[1]);
  r.tag.u[1] = inverse_u3(v.tag.u[0]);
  r.tag.u[2] = inverse_u3(v.tag.u[3]);
  r.tag.u[3] = inverse_u3(v.tag.u[2]);
  r.cr_angle = -v.cr_angle;
  r.tag.polarity =
      r.cr_angle > 0 ? Polarity::PlusMinus : Polarity::MinusPlus;
  r.phase_to_cx = -v.phase_to_cx;
  return r;
}

/// Reorders the CR half pulses: the CR sign flips and two Rx(180) frame
/// gates appear (or disappear) around the skeleton on the drive wire.
inline NativeVariant polarity_switch(const NativeVariant& v) {
  NativeVariant r = v;
  r.x_frames = !v.x_frames;
  r.cr_angle = -v.cr_angle;
  r.tag.polarity =
      r.cr_angle > 0 ? Polarity::PlusMinus : Polarity::MinusPlus;
  return r;
}

/// 0, 1 or 2 physical Rx(90) pulses for a canonical-form U3.
inline int sx_count(const U3Params& p) {
  double t = std::abs(wrap_angle(p.theta));
  if (t < 1e-9) return 0;
  if (std::abs(t - kPi / 2) < 1e-9) return 1;
  return 2;
}

/// sx pulses of an arbitrary gate (x counts as two, rz-likes as zero).
inline int sx_count_of_gate(const Gate& g) {
  if (g.kind == GateKind::Barrier || g.qubits.size() != 1) return 0;
  auto [p, ph] = extract_u3(Eigen::Matrix2cd(gate_unitary(g)));
  return sx_count(p);
}

inline long count_sx(const Circuit& c) {
  long n = 0;
  for (const Gate& g : c.gates) n += sx_count_of_gate(g);
  return n;
}

namespace native_detail {

inline Skeleton cr_skeleton(OriTag ori, std::optional<U3Params> c1 = {},
                            std::optional<U3Params> c4 = {}) {
  Skeleton s;
  s.num_qubits = 2;
  s.add_free_u3(0, c1);
  s.add_free_u3(1);
  uint32_t zw = ori == OriTag::NativeOrder ? 0 : 1;
  s.add_fixed(gate::rzx(zw, 1 - zw, kPi / 2));
  s.add_free_u3(0);
  s.add_free_u3(1, c4);
  return s;
}

inline NativeVariant variant_from_fit(OriTag ori, const FitResult& fr) {
  NativeVariant v;
  v.tag.ori = ori;
  v.tag.u = {fr.slots[0], fr.slots[2], fr.slots[1], fr.slots[3]};
  v.tag.polarity = Polarity::PlusMinus;
  v.cr_angle = kPi / 2;
  v.x_frames = false;
  v.phase_to_cx = -fr.phase;
  return v;
}

}  // namespace native_detail

/// Builds the CNOT variant library: per orientation the canonical fit and its
/// rule-based images (inverse, polarity switch, both), plus corner-constrained
/// self-cancelling ladder variants. Every entry is validated against cx.
inline NativeLibrary generate_native_library(double validate_tol = 1e-8,
                                             uint64_t seed = 0x2ab54ef00dcafeULL) {
  const Unitary cx = cx_matrix();
  NativeLibrary lib;

  auto validate_and_push = [&](NativeVariant v, bool required) -> bool {
    Unitary u = circuit_unitary(v.templ());
    if (!phase_equiv(u, cx, validate_tol)) {
      if (required) throw Error("native variant failed validation against cx");
      return false;
    }
    v.phase_to_cx = std::arg((u.adjoint() * cx).trace());
    for (const NativeVariant& w : lib.variants) {
      if (w.tag.ori != v.tag.ori || w.x_frames != v.x_frames ||
          std::abs(w.cr_angle - v.cr_angle) > 1e-12)
        continue;
      bool same = true;
      for (int i = 0; i < 4; ++i) {
        same &= std::abs(w.tag.u[i].theta - v.tag.u[i].theta) < 1e-9 &&
                std::abs(w.tag.u[i].phi - v.tag.u[i].phi) < 1e-9 &&
                std::abs(w.tag.u[i].lambda - v.tag.u[i].lambda) < 1e-9;
      }
      if (same) return false;  // duplicate
    }
    lib.variants.push_back(std::move(v));
    return true;
  };

  for (OriTag ori : {OriTag::NativeOrder, OriTag::Reversed}) {
    FitOptions o;
    o.seed = seed + (ori == OriTag::Reversed ? 7919 : 0);
    FitResult fr = fit_template(native_detail::cr_skeleton(ori), cx, o);
    if (!fr.success) throw Error("canonical CNOT->CR fit did not converge");
    NativeVariant canonical = native_detail::variant_from_fit(ori, fr);
    lib.canonical_index[(int)ori] = (int)lib.variants.size();
    validate_and_push(canonical, true);
    validate_and_push(invert_native(canonical), true);
    validate_and_push(polarity_switch(canonical), true);
    validate_and_push(polarity_switch(invert_native(canonical)), true);
  }

  // Corner-constrained self-cancelling (ladder) variants. The corner pair
  // (control-left, target-right) consists of mutual inverses so consecutive
  // ladder CNOTs merge their junction gates away. Feasible corners depend on
  // the orientation; infeasible combinations are skipped by the fit.
  struct CornerSpec {
    OriTag ori;
    U3Params c1, c4;
  };
  const U3Params I{0, 0, 0}, Zc{0, 0, kPi}, Xc{kPi, 0, kPi},
      Yc{kPi, kPi / 2, kPi / 2}, RyP{kPi / 2, 0, 0},
      RyM = canonical_u3(-kPi / 2, 0, 0), Hc{kPi / 2, 0, kPi};
  const std::vector<CornerSpec> corners = {
      {OriTag::Reversed, RyP, RyM},    // Fig.-6 style corners
      {OriTag::Reversed, RyM, RyP},
      {OriTag::NativeOrder, I, I},
      {OriTag::NativeOrder, Zc, Zc},
      {OriTag::NativeOrder, Xc, Xc},
      {OriTag::NativeOrder, Yc, Yc},
      // reserves in case a fit collides with an existing entry
      {OriTag::Reversed, Hc, Hc},
      {OriTag::Reversed, Zc, Zc},
  };
  int ladders = 0;
  uint64_t fit_id = 0;
  for (const CornerSpec& cs : corners) {
    if (ladders >= 6) break;
    FitOptions o;
    o.seed = seed ^ (0x1111beef + 31 * fit_id++);
    FitResult fr =
        fit_template(native_detail::cr_skeleton(cs.ori, cs.c1, cs.c4), cx, o);
    if (!fr.success) continue;
    NativeVariant v = native_detail::variant_from_fit(cs.ori, fr);
    if (!v.self_cancelling()) continue;
    if (validate_and_push(v, false)) ++ladders;
  }
  if (ladders < 6)
    throw Error("native library generation produced fewer than 6 ladder variants");
  if ((int)lib.variants.size() < 14)
    throw Error("native library generation produced fewer than 14 variants");
  return lib;
}

/// JSON round-trip for fixtures and inspection.
inline nlohmann::json native_library_to_json(const NativeLibrary& lib) {
  nlohmann::json j = nlohmann::json::array();
  for (const NativeVariant& v : lib.variants) {
    nlohmann::json e;
    e["ori"] = v.tag.ori == OriTag::NativeOrder ? "native-order" : "reversed";
    e["polarity"] = v.tag.polarity == Polarity::PlusMinus ? "+-" : "-+";
    e["x_frames"] = v.x_frames;
    e["cr_angle"] = v.cr_angle;
    e["phase_to_cx"] = v.phase_to_cx;
    e["angles"] = nlohmann::json::array();
    for (auto& p : v.tag.u) e["angles"].push_back({p.theta, p.phi, p.lambda});
    j.push_back(std::move(e));
  }
  return j;
}

inline NativeLibrary native_library_from_json(const nlohmann::json& j) {
  NativeLibrary lib;
  for (auto& e : j) {
    NativeVariant v;
    v.tag.ori = e.at("ori") == "native-order" ? OriTag::NativeOrder : OriTag::Reversed;
    v.tag.polarity = e.at("polarity") == "+-" ? Polarity::PlusMinus : Polarity::MinusPlus;
    v.x_frames = e.at("x_frames");
    v.cr_angle = e.at("cr_angle");
    v.phase_to_cx = e.at("phase_to_cx");
    for (int i = 0; i < 4; ++i) {
      auto& a = e.at("angles").at(i);
      v.tag.u[i] = {a.at(0), a.at(1), a.at(2)};
    }
    if (lib.canonical_index[(int)v.tag.ori] < 0)
      lib.canonical_index[(int)v.tag.ori] = (int)lib.variants.size();
    lib.variants.push_back(std::move(v));
  }
  return lib;
}

/// Context-aware (or always-canonical) lowering of a basis circuit to the
/// native alphabet {u3, x, rzx}. Each cx is scored against all variants of
/// the edge's orientation by merging the variant's left boundary with the
/// pending single-qubit gates on its wires and counting sx pulses; swaps are
/// expanded to three cx first; a final global 1q merge tidies the output.
inline Circuit lower_circuit_to_native(const Circuit& circuit, const CouplingMap& map,
                                       const NativeLibrary& lib, bool context_aware) {
  Circuit out;
  out.num_qubits = circuit.num_qubits;
  out.global_phase = circuit.global_phase;

  struct Pending {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    bool any = false;
    bool program = false;
  };
  std::vector<Pending> pending(circuit.num_qubits);

  auto flush = [&](uint32_t q) {
    Pending& p = pending[q];
    if (!p.any) return;
    double ph = 0;
    if (is_identity_up_to_phase(p.m, 1e-12, &ph)) {
      out.global_phase += ph;
    } else {
      auto [u, uph] = extract_u3(p.m);
      out.push(gate::u3(q, u.theta, u.phi, u.lambda,
                        p.program ? GateTag::Program : GateTag::Routing));
      out.global_phase += uph;
    }
    p = Pending{};
  };

  auto handle_cx = [&](uint32_t c, uint32_t t, GateTag tag) {
    if (!map.is_edge(c, t)) throw Error("lower_circuit_to_native: cx not on an edge");
    auto [drive, match] = map.orientation_of(c, t);
    OriTag ori = match ? OriTag::NativeOrder : OriTag::Reversed;

    std::vector<int> cand;
    if (context_aware)
      cand = lib.by_ori(ori);
    else
      cand = {lib.canonical_of(ori)};

    int best = -1;
    long best_score = 0;
    for (int idx : cand) {
      const NativeVariant& v = lib.variants[idx];
      Eigen::Matrix2cd mc = u3_matrix(v.tag.u[0]) * pending[c].m;
      Eigen::Matrix2cd mt = u3_matrix(v.tag.u[2]) * pending[t].m;
      long score = sx_count(extract_u3(mc).first) + sx_count(extract_u3(mt).first) +
                   sx_count(v.tag.u[1]) + sx_count(v.tag.u[3]) + (v.x_frames ? 4 : 0);
      if (best < 0 || score < best_score) {
        best = idx;
        best_score = score;
      }
    }
    const NativeVariant& v = lib.variants[best];

    // commit: merged left boundaries, CR skeleton, right boundaries pend
    pending[c].m = u3_matrix(v.tag.u[0]) * pending[c].m;
    pending[c].any = true;
    pending[c].program |= tag == GateTag::Program;
    pending[t].m = u3_matrix(v.tag.u[2]) * pending[t].m;
    pending[t].any = true;
    pending[t].program |= tag == GateTag::Program;
    flush(c);
    flush(t);

    uint32_t zw = v.tag.ori == OriTag::NativeOrder ? c : t;
    uint32_t xw = zw == c ? t : c;
    if (v.x_frames) out.push(gate::x(zw, tag));
    out.push(gate::rzx(zw, xw, v.cr_angle, tag));
    if (v.x_frames) out.push(gate::x(zw, tag));
    out.global_phase += v.phase_to_cx;

    pending[c] = {u3_matrix(v.tag.u[1]), true, tag == GateTag::Program};
    pending[t] = {u3_matrix(v.tag.u[3]), true, tag == GateTag::Program};
  };

  for (const Gate& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::Barrier:
        for (uint32_t q : g.qubits) flush(q);
        out.push(g);
        break;
      case GateKind::Rzx:
        flush(g.qubits[0]);
        flush(g.qubits[1]);
        out.push(g);
        break;
      case GateKind::Swap:
        handle_cx(g.qubits[0], g.qubits[1], g.tag);
        handle_cx(g.qubits[1], g.qubits[0], g.tag);
        handle_cx(g.qubits[0], g.qubits[1], g.tag);
        break;
      case GateKind::Cx:
        handle_cx(g.qubits[0], g.qubits[1], g.tag);
        break;
      case GateKind::Ccx:
        throw Error("lower_circuit_to_native: Toffoli must be decomposed first");
      default: {
        uint32_t q = g.qubits[0];
        pending[q].m = Eigen::Matrix2cd(gate_unitary(g)) * pending[q].m;
        pending[q].any = true;
        pending[q].program |= g.tag == GateTag::Program;
        break;
      }
    }
  }
  for (uint32_t q = 0; q < circuit.num_qubits; ++q) flush(q);

  CircuitDag dag(out);
  merge_1q_runs(dag);
  return dag.linearize();
}

}  // namespace qctx
