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

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qctx {

constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GateKind : uint8_t {
  U3,
  Rz,
  Sx,
  X,
  H,
  T,
  Tdg,
  Cx,
  Swap,
  Ccx,
  Rzx,
  Barrier,
};

/// Provenance of a gate: written by the program, or inserted by routing.
/// Children produced by rewrites inherit the parent's tag.
enum class GateTag : uint8_t { Program, Routing };

inline const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::U3: return "u3";
    case GateKind::Rz: return "rz";
    case GateKind::Sx: return "sx";
    case GateKind::X: return "x";
    case GateKind::H: return "h";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::Cx: return "cx";
    case GateKind::Swap: return "swap";
    case GateKind::Ccx: return "ccx";
    case GateKind::Rzx: return "rzx";
    case GateKind::Barrier: return "barrier";
  }
  return "?";
}

/// Arity of a gate kind; barriers are variadic and return 0 here.
inline uint32_t kind_arity(GateKind k) {
  switch (k) {
    case GateKind::Cx:
    case GateKind::Swap:
    case GateKind::Rzx: return 2;
    case GateKind::Ccx: return 3;
    case GateKind::Barrier: return 0;
    default: return 1;
  }
}

inline uint32_t kind_param_count(GateKind k) {
  switch (k) {
    case GateKind::U3: return 3;
    case GateKind::Rz:
    case GateKind::Rzx: return 1;
    default: return 0;
  }
}

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<uint32_t> qubits;
  std::vector<double> params;
  GateTag tag = GateTag::Program;

  bool is_one_qubit() const { return kind != GateKind::Barrier && qubits.size() == 1; }
  bool is_two_qubit() const { return kind != GateKind::Barrier && qubits.size() == 2; }

  bool operator==(const Gate& o) const {
    return kind == o.kind && qubits == o.qubits && params == o.params;
  }
};

inline void validate_gate(const Gate& g, uint32_t num_qubits) {
  if (g.kind != GateKind::Barrier && g.qubits.size() != kind_arity(g.kind))
    throw Error(std::string("gate arity mismatch for ") + kind_name(g.kind));
  if (g.params.size() != kind_param_count(g.kind))
    throw Error(std::string("gate param count mismatch for ") + kind_name(g.kind));
  for (size_t i = 0; i < g.qubits.size(); ++i) {
    if (g.qubits[i] >= num_qubits) throw Error("qubit index out of range");
    for (size_t j = i + 1; j < g.qubits.size(); ++j)
      if (g.qubits[i] == g.qubits[j]) throw Error("duplicate qubit in gate");
  }
  for (double p : g.params)
    if (!std::isfinite(p)) throw Error("non-finite gate angle");
}

struct Circuit {
  uint32_t num_qubits = 0;
  std::vector<Gate> gates;
  double global_phase = 0.0;

  void push(Gate g) { gates.push_back(std::move(g)); }
  void validate() const {
    for (const Gate& g : gates) validate_gate(g, num_qubits);
  }
};

// Convenience constructors used all over templates and tests.
namespace gate {
inline Gate u3(uint32_t q, double th, double ph, double la, GateTag t = GateTag::Program) {
  return {GateKind::U3, {q}, {th, ph, la}, t};
}
inline Gate rz(uint32_t q, double a, GateTag t = GateTag::Program) {
  return {GateKind::Rz, {q}, {a}, t};
}
inline Gate sx(uint32_t q, GateTag t = GateTag::Program) { return {GateKind::Sx, {q}, {}, t}; }
inline Gate x(uint32_t q, GateTag t = GateTag::Program) { return {GateKind::X, {q}, {}, t}; }
inline Gate h(uint32_t q, GateTag t = GateTag::Program) { return {GateKind::H, {q}, {}, t}; }
inline Gate t(uint32_t q, GateTag tg = GateTag::Program) { return {GateKind::T, {q}, {}, tg}; }
inline Gate tdg(uint32_t q, GateTag tg = GateTag::Program) { return {GateKind::Tdg, {q}, {}, tg}; }
inline Gate cx(uint32_t c, uint32_t t, GateTag tg = GateTag::Program) {
  return {GateKind::Cx, {c, t}, {}, tg};
}
inline Gate swap(uint32_t a, uint32_t b, GateTag t = GateTag::Program) {
  return {GateKind::Swap, {a, b}, {}, t};
}
inline Gate ccx(uint32_t c1, uint32_t c2, uint32_t t, GateTag tg = GateTag::Program) {
  return {GateKind::Ccx, {c1, c2, t}, {}, tg};
}
inline Gate rzx(uint32_t zq, uint32_t xq, double a, GateTag t = GateTag::Program) {
  return {GateKind::Rzx, {zq, xq}, {a}, t};
}
inline Gate barrier(std::vector<uint32_t> qs, GateTag t = GateTag::Program) {
  return {GateKind::Barrier, std::move(qs), {}, t};
}
}  // namespace gate

/// Inverse of a single gate, plus the global-phase correction the inverse
/// introduces (nonzero only for sx, whose inverse is not in the alphabet and
/// is expressed as a u3 with a compensating phase).
inline std::pair<Gate, double> inverse_gate(const Gate& g) {
  Gate r = g;
  switch (g.kind) {
    case GateKind::X:
    case GateKind::H:
    case GateKind::Cx:
    case GateKind::Swap:
    case GateKind::Ccx:
    case GateKind::Barrier:
      return {r, 0.0};
    case GateKind::T:
      r.kind = GateKind::Tdg;
      return {r, 0.0};
    case GateKind::Tdg:
      r.kind = GateKind::T;
      return {r, 0.0};
    case GateKind::Rz:
    case GateKind::Rzx:
      r.params[0] = -g.params[0];
      return {r, 0.0};
    case GateKind::U3:
      r.params = {-g.params[0], -g.params[2], -g.params[1]};
      return {r, 0.0};
    case GateKind::Sx:
      // sx^-1 = u3(-pi/2, -pi/2, pi/2) * e^{-i pi/4}
      r.kind = GateKind::U3;
      r.params = {-kPi / 2, -kPi / 2, kPi / 2};
      return {r, -kPi / 4};
  }
  throw Error("unreachable");
}

struct GateCounts {
  std::map<GateKind, size_t> total;
  std::map<GateKind, size_t> program;
  std::map<GateKind, size_t> routing;

  size_t of(GateKind k) const {
    auto it = total.find(k);
    return it == total.end() ? 0 : it->second;
  }
};

inline GateCounts gate_counts(const Circuit& c) {
  GateCounts gc;
  for (const Gate& g : c.gates) {
    gc.total[g.kind]++;
    (g.tag == GateTag::Program ? gc.program : gc.routing)[g.kind]++;
  }
  return gc;
}

/// CNOT-equivalent count at the basis level: a swap costs three CNOTs.
inline long basis_cnot_count(const Circuit& c) {
  long n = 0;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Cx) n += 1;
    if (g.kind == GateKind::Swap) n += 3;
  }
  return n;
}

inline double wrap_angle(double a) {
  // wrap to (-pi, pi]
  a = std::fmod(a, 2 * kPi);
  if (a <= -kPi) a += 2 * kPi;
  if (a > kPi) a -= 2 * kPi;
  return a;
}

}  // namespace qctx
