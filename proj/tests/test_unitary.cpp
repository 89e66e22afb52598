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

#include <catch2/catch_amalgamated.hpp>

#include "qctx/basis_variants.hpp"
#include "qctx/unitary.hpp"
#include "test_support.hpp"

using namespace qctx;
using qctx_test::circuit_unitary_ref;
using qctx_test::embed_ref;
using qctx_test::random_circuit;

TEST_CASE("u3 fixed points") {
  REQUIRE((u3_matrix(0, 0, 0) - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
  // inverse pair across the ladder junction
  Eigen::Matrix2cd prod = u3_matrix(kPi / 2, 0, 0) * u3_matrix(-kPi / 2, 0, 0);
  REQUIRE((prod - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
}

TEST_CASE("sx squares to x, rz is diagonal, rzx matches its generator") {
  REQUIRE(((sx_matrix() * sx_matrix()) - x_matrix()).norm() < 1e-15);
  Eigen::Matrix2cd rz = rz_matrix(0.7);
  REQUIRE(std::abs(rz(0, 0) - std::exp(cd(0, -0.35))) < 1e-15);
  // rzx(pi) = -i Z(x)X up to the expansion cos - i sin
  Eigen::Matrix4cd m = rzx_matrix(kPi);
  Eigen::Matrix4cd zx = Eigen::Matrix4cd::Zero();
  zx(2, 0) = 1;
  zx(3, 1) = -1;
  zx(0, 2) = 1;
  zx(1, 3) = -1;
  REQUIRE((m - (cd(0, -1) * zx)).norm() < 1e-14);
}

TEST_CASE("ccx flips only the |both controls on> pair") {
  Unitary m = ccx_matrix();
  for (int i = 0; i < 8; ++i) {
    int expect = (i == 3) ? 7 : (i == 7) ? 3 : i;
    for (int r = 0; r < 8; ++r)
      REQUIRE(std::abs(m(r, i) - cd(r == expect ? 1 : 0, 0)) < 1e-15);
  }
}

TEST_CASE("circuit_unitary equals the independent embedding oracle") {
  // the canonical 6-CNOT template is exactly ccx
  REQUIRE(phase_equiv(circuit_unitary(canonical_toffoli_template()), ccx_matrix(), 1e-10));
  // the 8-CNOT linear template matches up to global phase
  REQUIRE(phase_equiv(circuit_unitary(linear_toffoli_template()), ccx_matrix(), 1e-10));
  // cross-check the whole embedding machinery on random circuits
  for (uint64_t seed : {10u, 20u, 30u, 40u}) {
    Circuit c = random_circuit(4, 25, seed);
    REQUIRE((circuit_unitary(c) - circuit_unitary_ref(c)).norm() < 1e-10);
  }
}

TEST_CASE("two equal cx cancel to the identity") {
  Circuit c;
  c.num_qubits = 2;
  c.gates = {gate::cx(0, 1), gate::cx(0, 1)};
  REQUIRE((circuit_unitary(c) - Unitary::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("circuit_unitary respects the dimension guard") {
  Circuit c;
  c.num_qubits = 13;
  REQUIRE_THROWS_AS(circuit_unitary(c), Error);
}

TEST_CASE("circuit_unitary is multiplicative over concatenation") {
  Circuit a = random_circuit(3, 12, 5), b = random_circuit(3, 12, 6);
  Circuit ab = a;
  for (const Gate& g : b.gates) ab.gates.push_back(g);
  ab.global_phase += b.global_phase;
  REQUIRE((circuit_unitary(ab) - circuit_unitary(b) * circuit_unitary(a)).norm() < 1e-10);
}

TEST_CASE("phase distance properties") {
  Unitary x = x_matrix(), i2 = Unitary::Identity(2, 2);
  REQUIRE(phase_distance(x, x) < 1e-14);
  REQUIRE(phase_distance(x, std::exp(cd(0, kPi / 7)) * x) < 1e-12);
  REQUIRE(std::abs(phase_distance(i2, x) - 4.0) < 1e-14);
  REQUIRE(phase_equiv(x, x, 1e-9));
  REQUIRE(phase_equiv(x, std::exp(cd(0, kPi / 7)) * x, 1e-9));
  REQUIRE_FALSE(phase_equiv(i2, x, 1e-9));
  // symmetry and dimension mismatch
  Unitary c = circuit_unitary(canonical_toffoli_template());
  REQUIRE(std::abs(phase_distance(c, ccx_matrix()) - phase_distance(ccx_matrix(), c)) <
          1e-12);
  REQUIRE_THROWS_AS(phase_distance(i2, ccx_matrix()), Error);
}

TEST_CASE("extract_u3 canonical cases") {
  auto [pi_, phi_] = extract_u3(Eigen::Matrix2cd::Identity());
  REQUIRE(pi_.theta == 0);
  REQUIRE(pi_.phi == 0);
  REQUIRE(pi_.lambda == 0);
  REQUIRE(phi_ == 0);

  auto [px, phx] = extract_u3(x_matrix());
  REQUIRE(std::abs(px.theta - kPi) < 1e-12);
  REQUIRE(px.phi == 0);
  REQUIRE(std::abs(px.lambda - kPi) < 1e-12);
  Eigen::Matrix2cd rec = std::exp(cd(0, phx)) * u3_matrix(px);
  REQUIRE((rec - x_matrix()).norm() < 1e-12);

  // product of two quarter rotations (the ladder junction shape)
  Eigen::Matrix2cd prod =
      u3_matrix(kPi / 2, -kPi / 2, 0) * u3_matrix(kPi / 2, 0, 0);
  auto [pp, php] = extract_u3(prod);
  REQUIRE(((std::exp(cd(0, php)) * u3_matrix(pp)) - prod).norm() < 1e-10);
  REQUIRE(pp.theta >= 0);
  REQUIRE(pp.theta <= kPi);
}

TEST_CASE("extract_u3 rejects non-unitary input") {
  Eigen::Matrix2cd junk;
  junk << 1, 2, 3, 4;
  REQUIRE_THROWS_AS(extract_u3(junk), Error);
}

TEST_CASE("extract_u3 round-trips random single-qubit unitaries") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    double th = a(rng), ph = a(rng), la = a(rng), gp = a(rng);
    Eigen::Matrix2cd m = std::exp(cd(0, gp)) * u3_matrix(th, ph, la);
    auto [p, phase] = extract_u3(m);
    REQUIRE((std::exp(cd(0, phase)) * u3_matrix(p) - m).norm() < 1e-10);
    REQUIRE(p.theta >= 0);
    REQUIRE(p.theta <= kPi + 1e-12);
    if (p.theta > 1e-9 && p.theta < kPi - 1e-9) {
      REQUIRE(p.phi > -kPi - 1e-12);
      REQUIRE(p.phi <= kPi + 1e-12);
    }
  }
}

TEST_CASE("gate_unitary rejects nothing in the alphabet but barrier is id") {
  Gate b = gate::barrier({0, 1});
  REQUIRE((gate_unitary(b) - Unitary::Identity(4, 4)).norm() < 1e-15);
}
