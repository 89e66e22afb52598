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

#include <optional>
#include <random>

#include "qctx/unitary.hpp"

namespace qctx {

/// Fixed-structure template: fixed gates interleaved with free U3 slots.
/// A slot with a corner constraint is excluded from the parameter vector.
struct Skeleton {
  struct Item {
    enum class Type : uint8_t { Fixed, FreeU3 } type = Type::FreeU3;
    Gate fixed;                      // Type::Fixed
    uint32_t qubit = 0;              // Type::FreeU3
    std::optional<U3Params> corner;  // pins a FreeU3 slot
  };

  uint32_t num_qubits = 2;
  std::vector<Item> items;

  void add_fixed(Gate g) { items.push_back({Item::Type::Fixed, std::move(g), 0, {}}); }
  void add_free_u3(uint32_t q, std::optional<U3Params> corner = {}) {
    items.push_back({Item::Type::FreeU3, {}, q, corner});
  }
  int free_slot_count() const {
    int n = 0;
    for (auto& it : items)
      if (it.type == Item::Type::FreeU3 && !it.corner) ++n;
    return n;
  }
};

struct FitOptions {
  double tol = 1e-10;      // success threshold on the squared Frobenius objective
  int max_restarts = 64;   // multi-start budget (start 0 is all-zeros)
  int max_iters = 200;
  uint64_t seed = 0x9c1f2eb4d1a5c3e7ULL;
  enum class Method : uint8_t { LM, BFGS } method = Method::LM;
};

struct FitResult {
  std::vector<U3Params> slots;  // one entry per FreeU3 item, corners included
  double phase = 0;             // e^{i phase} multiplying the target
  double residual = 0;          // final objective value
  int iterations = 0;
  int restarts_used = 0;
  bool success = false;
};

namespace synth_detail {

inline Unitary embed_1q(const Eigen::Matrix2cd& m, uint32_t q, uint32_t n) {
  const Eigen::Index d = Eigen::Index(1) << n;
  Unitary u = Unitary::Identity(d, d);
  apply_gate_to_columns(u, m, {q});
  return u;
}

inline Unitary embed_full(const Gate& g, uint32_t n) {
  const Eigen::Index d = Eigen::Index(1) << n;
  Unitary u = Unitary::Identity(d, d);
  apply_gate_to_columns(u, gate_unitary(g), g.qubits);
  return u;
}

inline void u3_partials(double th, double ph, double la, Eigen::Matrix2cd& dth,
                        Eigen::Matrix2cd& dph, Eigen::Matrix2cd& dla) {
  const double c = std::cos(th / 2), s = std::sin(th / 2);
  const cd el = std::exp(cd(0, la)), ep = std::exp(cd(0, ph)), epl = std::exp(cd(0, ph + la));
  dth << -s / 2, -el * c / 2.0, ep * c / 2.0, -epl * s / 2.0;
  dph << 0, 0, cd(0, 1) * ep * s, cd(0, 1) * epl * c;
  dla << 0, -cd(0, 1) * el * s, 0, cd(0, 1) * epl * c;
}

struct Problem {
  Skeleton skel;
  Unitary target;
  Eigen::Index d;
  std::vector<int> free_items;  // indices into skel.items
  int m;                        // parameter count = 3*free + 1 (phase)

  explicit Problem(const Skeleton& s, const Unitary& t)
      : skel(s), target(t), d(Eigen::Index(1) << s.num_qubits) {
    for (int i = 0; i < (int)s.items.size(); ++i) {
      auto& it = s.items[i];
      if (it.type == Skeleton::Item::Type::FreeU3 && !it.corner) free_items.push_back(i);
    }
    m = 3 * (int)free_items.size() + 1;
  }

  Unitary item_matrix(int i, const Eigen::VectorXd& x) const {
    auto& it = skel.items[i];
    if (it.type == Skeleton::Item::Type::Fixed) return embed_full(it.fixed, skel.num_qubits);
    if (it.corner) return embed_1q(u3_matrix(*it.corner), it.qubit, skel.num_qubits);
    int fi = (int)(std::find(free_items.begin(), free_items.end(), i) - free_items.begin());
    return embed_1q(u3_matrix(x[3 * fi], x[3 * fi + 1], x[3 * fi + 2]), it.qubit,
                    skel.num_qubits);
  }

  Unitary build(const Eigen::VectorXd& x) const {
    Unitary u = Unitary::Identity(d, d);
    for (int i = 0; i < (int)skel.items.size(); ++i) u = item_matrix(i, x) * u;
    return u;
  }

  void residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    Unitary diff = build(x) - std::exp(cd(0, x[m - 1])) * target;
    r.resize(2 * d * d);
    Eigen::Map<const Eigen::VectorXcd> v(diff.data(), d * d);
    r.head(d * d) = v.real();
    r.tail(d * d) = v.imag();
  }

  void jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& J) const {
    const int n = (int)skel.items.size();
    std::vector<Unitary> mats(n), prefix(n + 1), suffix(n + 1);
    for (int i = 0; i < n; ++i) mats[i] = item_matrix(i, x);
    prefix[0] = Unitary::Identity(d, d);
    for (int i = 0; i < n; ++i) prefix[i + 1] = mats[i] * prefix[i];
    suffix[n] = Unitary::Identity(d, d);
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * mats[i];

    J.resize(2 * d * d, m);
    Eigen::Matrix2cd dth, dph, dla;
    for (int fi = 0; fi < (int)free_items.size(); ++fi) {
      int i = free_items[fi];
      uint32_t q = skel.items[i].qubit;
      u3_partials(x[3 * fi], x[3 * fi + 1], x[3 * fi + 2], dth, dph, dla);
      const Eigen::Matrix2cd* parts[3] = {&dth, &dph, &dla};
      for (int a = 0; a < 3; ++a) {
        Unitary dcol = suffix[i + 1] * embed_1q(*parts[a], q, skel.num_qubits) * prefix[i];
        Eigen::Map<const Eigen::VectorXcd> v(dcol.data(), d * d);
        J.col(3 * fi + a).head(d * d) = v.real();
        J.col(3 * fi + a).tail(d * d) = v.imag();
      }
    }
    Unitary dphase = -cd(0, 1) * std::exp(cd(0, x[m - 1])) * target;
    Eigen::Map<const Eigen::VectorXcd> v(dphase.data(), d * d);
    J.col(m - 1).head(d * d) = v.real();
    J.col(m - 1).tail(d * d) = v.imag();
  }
};

/// Central-difference Jacobian; kept as a check on the analytic one.
inline void numeric_jacobian(const Problem& p, const Eigen::VectorXd& x,
                             Eigen::MatrixXd& J, double step = 1e-6) {
  Eigen::VectorXd rp, rm, xt = x;
  p.residual(x, rp);
  J.resize(rp.size(), p.m);
  for (int j = 0; j < p.m; ++j) {
    xt[j] = x[j] + step;
    p.residual(xt, rp);
    xt[j] = x[j] - step;
    p.residual(xt, rm);
    xt[j] = x[j];
    J.col(j) = (rp - rm) / (2 * step);
  }
}

struct LocalResult {
  Eigen::VectorXd x;
  double cost;
  int iters;
};

inline LocalResult run_lm(const Problem& p, Eigen::VectorXd x, const FitOptions& o) {
  Eigen::VectorXd r, rt;
  Eigen::MatrixXd J;
  p.residual(x, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  const double deep_tol = std::min(o.tol * 1e-2, 1e-22);
  int it = 0;
  for (; it < o.max_iters; ++it) {
    if (cost <= deep_tol) break;
    p.jacobian(x, J);
    Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;
    Eigen::MatrixXd A = J.transpose() * J;
    bool accepted = false;
    while (lambda < 1e11) {
      Eigen::MatrixXd M = A;
      for (int i = 0; i < M.rows(); ++i) M(i, i) += lambda * (A(i, i) + 1e-12);
      Eigen::VectorXd delta = M.ldlt().solve(-g);
      Eigen::VectorXd xt = x + delta;
      p.residual(xt, rt);
      double ct = rt.squaredNorm();
      if (ct < cost) {
        x = xt;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
  }
  return {x, cost, it};
}

inline LocalResult run_bfgs(const Problem& p, Eigen::VectorXd x, const FitOptions& o) {
  const int m = p.m;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  auto eval = [&](const Eigen::VectorXd& xx, Eigen::VectorXd* grad) {
    p.residual(xx, r);
    if (grad) {
      p.jacobian(xx, J);
      *grad = 2.0 * (J.transpose() * r);
    }
    return r.squaredNorm();
  };
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd g(m), gn(m);
  double cost = eval(x, &g);
  int it = 0;
  for (; it < 2 * o.max_iters; ++it) {
    if (cost <= o.tol * 1e-2 || g.lpNorm<Eigen::Infinity>() < 1e-12) break;
    Eigen::VectorXd dir = -Hinv * g;
    if (dir.dot(g) > 0) dir = -g;  // safeguard: fall back to steepest descent
    double step = 1.0;
    double c1 = 1e-4;
    double slope = g.dot(dir);
    Eigen::VectorXd xn;
    double cn = cost;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * dir;
      cn = eval(xn, nullptr);
      if (cn <= cost + c1 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    cn = eval(xn, &gn);
    Eigen::VectorXd s = xn - x, y = gn - g;
    double ys = y.dot(s);
    if (ys > 1e-12) {
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
      Eigen::MatrixXd V = I - (s * y.transpose()) / ys;
      Hinv = V * Hinv * V.transpose() + (s * s.transpose()) / ys;
    }
    x = xn;
    g = gn;
    cost = cn;
  }
  return {x, cost, it};
}

}  // namespace synth_detail

namespace synth_detail {

/// Rounds angles sitting within eps of a multiple of pi/2 onto it exactly;
/// fitted templates routinely live on such special points and the pulse
/// accounting keys on them.
inline U3Params snap_u3(const U3Params& p, double eps = 1e-6) {
  auto snap = [&](double a) {
    double k = std::round(a / (kPi / 2));
    double s = k * (kPi / 2);
    return std::abs(a - s) < eps ? wrap_angle(s) : a;
  };
  U3Params r{snap(p.theta), snap(p.phi), snap(p.lambda)};
  if (std::abs(p.theta - kPi) < eps) r.theta = kPi;  // keep theta in [0, pi]
  if (r.theta < 0) r.theta = 0;
  return r;
}

}  // namespace synth_detail

/// Fits the skeleton's free U3 angles (plus a global-phase parameter) to the
/// target by minimizing ||U(x) - e^{i phi} target||_F^2. Multi-start: the
/// first start is all-zeros, later starts are seeded uniform draws. Stops at
/// the first start whose residual reaches opts.tol.
inline FitResult fit_template(const Skeleton& skel, const Unitary& target,
                              const FitOptions& opts = {}) {
  if ((Eigen::Index(1) << skel.num_qubits) != target.rows())
    throw Error("fit_template: skeleton and target dimensions differ");
  synth_detail::Problem prob(skel, target);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-kPi, kPi);

  FitResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int total_iters = 0;
  for (int k = 0; k <= opts.max_restarts; ++k) {
    Eigen::VectorXd x0(prob.m);
    if (k == 0)
      x0.setZero();
    else
      for (int i = 0; i < prob.m; ++i) x0[i] = uni(rng);
    synth_detail::LocalResult lr = opts.method == FitOptions::Method::LM
                                       ? synth_detail::run_lm(prob, x0, opts)
                                       : synth_detail::run_bfgs(prob, x0, opts);
    total_iters += lr.iters;
    if (lr.cost < best.residual) {
      // canonicalize slot angles (per-slot phases move into `phase`), then
      // try snapping them onto exact multiples of pi/2
      std::vector<U3Params> raw;
      int fi = 0;
      for (auto& it : skel.items) {
        if (it.type != Skeleton::Item::Type::FreeU3) continue;
        if (it.corner)
          raw.push_back(*it.corner);
        else {
          raw.push_back(
              canonical_u3(lr.x[3 * fi], lr.x[3 * fi + 1], lr.x[3 * fi + 2]));
          ++fi;
        }
      }
      auto evaluate = [&](const std::vector<U3Params>& slots) {
        Unitary u = Unitary::Identity(prob.d, prob.d);
        int si = 0;
        for (auto& it : skel.items) {
          if (it.type == Skeleton::Item::Type::Fixed)
            u = synth_detail::embed_full(it.fixed, skel.num_qubits) * u;
          else
            u = synth_detail::embed_1q(u3_matrix(slots[si++]), it.qubit,
                                       skel.num_qubits) *
                u;
        }
        double phase = std::arg((target.adjoint() * u).trace());
        double res = (u - std::exp(cd(0, phase)) * target).squaredNorm();
        return std::make_pair(phase, res);
      };
      std::vector<U3Params> snapped;
      for (const U3Params& p : raw) snapped.push_back(synth_detail::snap_u3(p));
      auto [sphase, sres] = evaluate(snapped);
      auto [rphase, rres] = evaluate(raw);
      if (sres <= std::max(rres, opts.tol)) {
        best.slots = std::move(snapped);
        best.phase = sphase;
        best.residual = sres;
      } else {
        best.slots = std::move(raw);
        best.phase = rphase;
        best.residual = rres;
      }
      best.restarts_used = k;
    }
    if (best.residual <= opts.tol) {
      best.success = true;
      break;
    }
  }
  best.iterations = total_iters;
  return best;
}

/// Builds the standard resynthesis skeleton with `cnots` CNOTs interleaved
/// with free U3 layers on both wires.
inline Skeleton resynth_skeleton(int cnots) {
  Skeleton s;
  s.num_qubits = 2;
  s.add_free_u3(0);
  s.add_free_u3(1);
  for (int i = 0; i < cnots; ++i) {
    s.add_fixed(gate::cx(0, 1));
    s.add_free_u3(0);
    s.add_free_u3(1);
  }
  return s;
}

/// Resynthesizes a 4x4 unitary as a circuit with the minimal CNOT count in
/// {0,1,2,3}, trying skeletons in increasing order. The 3-CNOT skeleton is
/// universal, so the call always produces a circuit.
inline Circuit resynth_2q_block(const Unitary& u, double tol = 1e-9,
                                uint64_t seed = 0x51bd5eedc0ffee11ULL) {
  if (u.rows() != 4 || u.cols() != 4) throw Error("resynth_2q_block: need a 4x4 unitary");
  static const int kRestarts[4] = {6, 10, 16, 40};
  for (int k = 0; k <= 3; ++k) {
    Skeleton skel = resynth_skeleton(k);
    FitOptions o;
    o.tol = tol;
    o.max_restarts = kRestarts[k];
    o.seed = seed + (uint64_t)k;
    FitResult fr = fit_template(skel, u, o);
    if (!fr.success && k == 3) {
      o.max_restarts = 128;  // universality: keep going until it lands
      o.seed = seed ^ 0xabcdef12345ULL;
      fr = fit_template(skel, u, o);
      if (!fr.success) throw Error("resynth_2q_block: 3-CNOT fit did not converge");
    }
    if (!fr.success) continue;

    Circuit c;
    c.num_qubits = 2;
    c.global_phase = -fr.phase;
    int si = 0;
    for (auto& it : skel.items) {
      if (it.type == Skeleton::Item::Type::Fixed) {
        c.push(it.fixed);
      } else {
        const U3Params& p = fr.slots[si++];
        Eigen::Matrix2cd m = u3_matrix(p);
        double ph = 0;
        if (is_identity_up_to_phase(m, 1e-12, &ph))
          c.global_phase += ph;
        else
          c.push(gate::u3(it.qubit, p.theta, p.phi, p.lambda));
      }
    }
    return c;
  }
  throw Error("unreachable");
}

}  // namespace qctx
