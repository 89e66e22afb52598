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
#include <numeric>
#include <random>

#include "qctx/unitary.hpp"

namespace qctx_test {

using qctx::Circuit;
using qctx::Gate;
using qctx::Unitary;
using qctx::cd;

// Independent embedding oracle: builds the full matrix entry by entry from
// the local gate matrix, with no shared code with the library's
// column-apply path.
inline Unitary embed_ref(const Unitary& local, const std::vector<uint32_t>& qubits,
                         uint32_t n) {
  const Eigen::Index d = Eigen::Index(1) << n;
  const int k = (int)qubits.size();
  Unitary full = Unitary::Zero(d, d);
  auto local_index = [&](Eigen::Index full_idx) {
    int loc = 0;
    for (int i = 0; i < k; ++i)
      if (full_idx & (Eigen::Index(1) << qubits[i])) loc |= 1 << i;
    return loc;
  };
  auto rest_bits = [&](Eigen::Index full_idx) {
    Eigen::Index r = full_idx;
    for (int i = 0; i < k; ++i) r &= ~(Eigen::Index(1) << qubits[i]);
    return r;
  };
  for (Eigen::Index row = 0; row < d; ++row)
    for (Eigen::Index col = 0; col < d; ++col)
      if (rest_bits(row) == rest_bits(col))
        full(row, col) = local(local_index(row), local_index(col));
  return full;
}

inline Unitary circuit_unitary_ref(const Circuit& c) {
  const Eigen::Index d = Eigen::Index(1) << c.num_qubits;
  Unitary u = Unitary::Identity(d, d);
  for (const Gate& g : c.gates) {
    if (g.kind == qctx::GateKind::Barrier) continue;
    u = embed_ref(qctx::gate_unitary(g), g.qubits, c.num_qubits) * u;
  }
  return std::exp(cd(0, c.global_phase)) * u;
}

// Seeded random circuit over the full supported alphabet.
inline Circuit random_circuit(uint32_t num_qubits, int num_gates, uint64_t seed,
                              bool with_ccx = true, bool with_barrier = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-qctx::kPi, qctx::kPi);
  Circuit c;
  c.num_qubits = num_qubits;
  auto pick_distinct = [&](int k) {
    std::vector<uint32_t> qs;
    while ((int)qs.size() < k) {
      uint32_t q = (uint32_t)(rng() % num_qubits);
      if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
    }
    return qs;
  };
  for (int i = 0; i < num_gates; ++i) {
    int r = (int)(rng() % 12);
    using namespace qctx::gate;
    switch (r) {
      case 0: c.push(u3(pick_distinct(1)[0], ang(rng), ang(rng), ang(rng))); break;
      case 1: c.push(rz(pick_distinct(1)[0], ang(rng))); break;
      case 2: c.push(sx(pick_distinct(1)[0])); break;
      case 3: c.push(x(pick_distinct(1)[0])); break;
      case 4: c.push(h(pick_distinct(1)[0])); break;
      case 5: c.push(t(pick_distinct(1)[0])); break;
      case 6: c.push(tdg(pick_distinct(1)[0])); break;
      case 7:
      case 8: {
        auto qs = pick_distinct(2);
        c.push(cx(qs[0], qs[1]));
        break;
      }
      case 9: {
        auto qs = pick_distinct(2);
        c.push(swap(qs[0], qs[1]));
        break;
      }
      case 10: {
        if (num_qubits >= 3 && with_ccx) {
          auto qs = pick_distinct(3);
          c.push(ccx(qs[0], qs[1], qs[2]));
        } else {
          auto qs = pick_distinct(2);
          c.push(cx(qs[0], qs[1]));
        }
        break;
      }
      default: {
        if (with_barrier && rng() % 4 == 0) {
          std::vector<uint32_t> all(num_qubits);
          std::iota(all.begin(), all.end(), 0);
          c.push(barrier(all));
        } else {
          auto qs = pick_distinct(2);
          c.push(rzx(qs[0], qs[1], ang(rng)));
        }
        break;
      }
    }
  }
  return c;
}

// Random 1q-and-cx-only circuit (for qasm round-trips etc.)
inline Circuit random_basis_circuit(uint32_t num_qubits, int num_gates, uint64_t seed) {
  return random_circuit(num_qubits, num_gates, seed, false, false);
}

inline Unitary random_su4(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  Unitary m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = cd(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Unitary> qr(m);
  Unitary q = qr.householderQ();
  Unitary r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  q /= std::pow(q.determinant(), 0.25);
  return q;
}

}  // namespace qctx_test
