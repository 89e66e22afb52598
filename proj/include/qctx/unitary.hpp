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

#include <Eigen/Dense>
#include <complex>

#include "qctx/gates.hpp"

namespace qctx {

using Unitary = Eigen::MatrixXcd;
using cd = std::complex<double>;

constexpr int kMaxUnitaryQubits = 12;

/// U3 angles in canonical form: theta in [0, pi], phi/lambda in (-pi, pi];
/// at theta in {0, pi} the redundant angle is folded into lambda and phi = 0.
struct U3Params {
  double theta = 0, phi = 0, lambda = 0;
};

inline Eigen::Matrix2cd u3_matrix(double th, double ph, double la) {
  Eigen::Matrix2cd m;
  const double c = std::cos(th / 2), s = std::sin(th / 2);
  m << cd(c, 0), -std::exp(cd(0, la)) * s, std::exp(cd(0, ph)) * s,
      std::exp(cd(0, ph + la)) * c;
  return m;
}
inline Eigen::Matrix2cd u3_matrix(const U3Params& p) {
  return u3_matrix(p.theta, p.phi, p.lambda);
}

inline Eigen::Matrix2cd rz_matrix(double a) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(cd(0, -a / 2));
  m(1, 1) = std::exp(cd(0, a / 2));
  return m;
}

inline Eigen::Matrix2cd sx_matrix() {
  Eigen::Matrix2cd m;
  m << cd(0.5, 0.5), cd(0.5, -0.5), cd(0.5, -0.5), cd(0.5, 0.5);
  return m;
}

inline Eigen::Matrix2cd x_matrix() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd h_matrix() {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

inline Eigen::Matrix2cd t_matrix(bool dagger = false) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  m(1, 1) = std::exp(cd(0, dagger ? -kPi / 4 : kPi / 4));
  return m;
}

// Two-qubit matrices use the local convention: the gate's first listed qubit
// is the least-significant bit of the local basis index.
inline Eigen::Matrix4cd cx_matrix() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int c = 0; c < 2; ++c)
    for (int t = 0; t < 2; ++t) m((t ^ c) * 2 + c, t * 2 + c) = 1;
  return m;
}

inline Eigen::Matrix4cd swap_matrix() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(b + 2 * a, a + 2 * b) = 1;
  return m;
}

/// rzx(theta) = exp(-i theta/2 Z(x)X) with Z on the first listed qubit.
inline Eigen::Matrix4cd rzx_matrix(double a) {
  // kron(X, Z): X acts on the high (second-listed) bit, Z on the low bit.
  Eigen::Matrix4cd zx = Eigen::Matrix4cd::Zero();
  zx(2, 0) = 1;
  zx(3, 1) = -1;
  zx(0, 2) = 1;
  zx(1, 3) = -1;
  return std::cos(a / 2) * Eigen::Matrix4cd::Identity() -
         cd(0, std::sin(a / 2)) * zx;
}

inline Unitary ccx_matrix() {
  Unitary m = Unitary::Identity(8, 8);
  m(3, 3) = m(7, 7) = 0;
  m(3, 7) = m(7, 3) = 1;  // flip target (local bit 2) when both controls set
  return m;
}

/// Dense matrix of a single gate over its own qubits.
inline Unitary gate_unitary(const Gate& g) {
  switch (g.kind) {
    case GateKind::U3: return u3_matrix(g.params[0], g.params[1], g.params[2]);
    case GateKind::Rz: return rz_matrix(g.params[0]);
    case GateKind::Sx: return sx_matrix();
    case GateKind::X: return x_matrix();
    case GateKind::H: return h_matrix();
    case GateKind::T: return t_matrix(false);
    case GateKind::Tdg: return t_matrix(true);
    case GateKind::Cx: return cx_matrix();
    case GateKind::Swap: return swap_matrix();
    case GateKind::Rzx: return rzx_matrix(g.params[0]);
    case GateKind::Ccx: return ccx_matrix();
    case GateKind::Barrier:
      return Unitary::Identity(1ll << g.qubits.size(), 1ll << g.qubits.size());
  }
  throw Error("unknown gate kind");
}

/// Applies a k-qubit gate to every column of `state` (the columns are treated
/// as statevectors; for a square identity-seeded matrix this builds the
/// circuit unitary column by column).
inline void apply_gate_to_columns(Unitary& state, const Unitary& local,
                                  const std::vector<uint32_t>& qubits) {
  const int k = static_cast<int>(qubits.size());
  const Eigen::Index d = state.rows();
  const int loc_dim = 1 << k;
  std::vector<Eigen::Index> stride(k);
  for (int i = 0; i < k; ++i) stride[i] = Eigen::Index(1) << qubits[i];
  Eigen::Index mask = 0;
  for (int i = 0; i < k; ++i) mask |= stride[i];

  std::vector<cd> amp(loc_dim);
  for (Eigen::Index col = 0; col < state.cols(); ++col) {
    cd* v = state.col(col).data();
    for (Eigen::Index base = 0; base < d; ++base) {
      if (base & mask) continue;
      for (int l = 0; l < loc_dim; ++l) {
        Eigen::Index idx = base;
        for (int i = 0; i < k; ++i)
          if (l & (1 << i)) idx |= stride[i];
        amp[l] = v[idx];
      }
      for (int r = 0; r < loc_dim; ++r) {
        cd acc = 0;
        for (int l = 0; l < loc_dim; ++l) acc += local(r, l) * amp[l];
        Eigen::Index idx = base;
        for (int i = 0; i < k; ++i)
          if (r & (1 << i)) idx |= stride[i];
        v[idx] = acc;
      }
    }
  }
}

/// Applies a whole circuit to a statevector in place.
inline void apply_circuit_to_state(Eigen::VectorXcd& state, const Circuit& c) {
  Unitary view = state;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Barrier) continue;
    Unitary local = gate_unitary(g);
    apply_gate_to_columns(view, local, g.qubits);
  }
  view *= std::exp(cd(0, c.global_phase));
  state = view.col(0);
}

/// Ordered product of embedded gate unitaries times e^{i*global_phase}.
inline Unitary circuit_unitary(const Circuit& c) {
  if (c.num_qubits > kMaxUnitaryQubits)
    throw Error("circuit_unitary: dimension guard exceeded (num_qubits > 12)");
  const Eigen::Index d = Eigen::Index(1) << c.num_qubits;
  Unitary u = Unitary::Identity(d, d);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Barrier) continue;
    Unitary local = gate_unitary(g);
    apply_gate_to_columns(u, local, g.qubits);
  }
  return std::exp(cd(0, c.global_phase)) * u;
}

/// min over phi of || U - e^{i phi} V ||_F^2  =  2d - 2 |tr(V^dag U)|.
inline double phase_distance(const Unitary& u, const Unitary& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw Error("phase_distance: dimension mismatch");
  const double d = static_cast<double>(u.rows());
  return 2 * d - 2 * std::abs((v.adjoint() * u).trace());
}

inline bool phase_equiv(const Unitary& u, const Unitary& v, double tol) {
  return phase_distance(u, v) <= tol;
}

inline bool is_unitary(const Unitary& m, double tol = 1e-8) {
  Unitary err = m.adjoint() * m - Unitary::Identity(m.rows(), m.cols());
  return err.norm() <= tol;
}

/// Decomposes a 2x2 unitary as e^{i phase} * U3(theta, phi, lambda) in the
/// canonical form described on U3Params.
inline std::pair<U3Params, double> extract_u3(const Eigen::Matrix2cd& m) {
  if (!is_unitary(m)) throw Error("extract_u3: input is not unitary");
  const double a00 = std::abs(m(0, 0)), a10 = std::abs(m(1, 0));
  const double eps = 1e-9;
  U3Params p;
  double phase = 0;
  p.theta = 2 * std::atan2(a10, a00);
  if (a10 < eps) {
    p.theta = 0;
    p.phi = 0;
    phase = std::arg(m(0, 0));
    p.lambda = wrap_angle(std::arg(m(1, 1)) - phase);
  } else if (a00 < eps) {
    p.theta = kPi;
    p.phi = 0;
    phase = std::arg(m(1, 0));
    p.lambda = wrap_angle(std::arg(-m(0, 1)) - phase);
  } else {
    phase = std::arg(m(0, 0));
    p.phi = wrap_angle(std::arg(m(1, 0)) - phase);
    p.lambda = wrap_angle(std::arg(-m(0, 1)) - phase);
  }
  return {p, phase};
}

inline U3Params canonical_u3(double th, double ph, double la) {
  return extract_u3(u3_matrix(th, ph, la)).first;
}

/// True when m is the identity up to a global phase (within tol); the phase
/// is written to *phase when non-null.
inline bool is_identity_up_to_phase(const Eigen::Matrix2cd& m, double tol,
                                    double* phase = nullptr) {
  auto [p, ph] = extract_u3(m);
  Eigen::Matrix2cd r = std::exp(cd(0, ph)) * Eigen::Matrix2cd::Identity();
  if ((r - m).norm() <= tol) {
    if (phase) *phase = ph;
    return true;
  }
  return false;
}

}  // namespace qctx
