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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "json.hpp"
#include "qctx/basis_variants.hpp"
#include "qctx/dag.hpp"
#include "qctx/native_variants.hpp"
#include "qctx/peephole.hpp"
#include "qctx/qasm.hpp"
#include "qctx/router.hpp"

namespace qctx {

inline bool debug_log_enabled() {
  static const bool on = [] {
    const char* v = std::getenv("QCTX_LOG");
    return v && std::string(v) == "debug";
  }();
  return on;
}

enum class Mode : uint8_t { QContext, Trios };

inline const char* mode_name(Mode m) { return m == Mode::QContext ? "qcontext" : "trios"; }

struct PipelineConfig {
  Mode mode = Mode::QContext;
  CouplingMap coupling;
  uint64_t seed = 0;
  int window = 12;          // optimizer window bound for variant scoring
  bool verify = false;
  uint32_t verify_cap = 10;  // max circuit width for unitary verification
};

struct CompileResult {
  RoutedCircuit routed;
  Circuit basis;   // after variant substitution + peephole, before lowering
  Circuit native;  // over {u3, x, rzx}
  long basis_cnots = 0;
  long cr_r = 0, cr_b = 0;
  long sx = 0;
  double time_ms = 0;
  std::optional<bool> verified;  // set only when verification ran
};

/// Shared immutable variant libraries (generated once, deterministic).
struct Libraries {
  BasisLibrary basis;
  NativeLibrary native;

  static const Libraries& instance() {
    static const Libraries libs = [] {
      Libraries l;
      l.basis = generate_basis_library();
      l.native = generate_native_library();
      return l;
    }();
    return libs;
  }
};

/// Full compilation flow: trios-level decomposition, layout + routing,
/// per-Toffoli variant substitution (context-aware or fixed), peephole
/// optimization, native lowering, and metric extraction.
inline CompileResult compile_pipeline(const Circuit& input, const PipelineConfig& cfg,
                                      const Libraries& libs = Libraries::instance()) {
  auto t0 = std::chrono::steady_clock::now();
  CompileResult res;

  Circuit trios = decompose_to_trios_level(input);
  res.routed = route(trios, cfg.coupling, cfg.seed);

  CircuitDag dag(res.routed.circuit);
  std::vector<int> ccx_nodes;
  for (int id : dag.topological_ops())
    if (dag.node(id).gate.kind == GateKind::Ccx) ccx_nodes.push_back(id);

  for (int id : ccx_nodes) {
    const Gate& g = dag.node(id).gate;
    int pick;
    if (cfg.mode == Mode::QContext) {
      pick = select_basis_variant(dag, id, libs.basis, cfg.coupling, cfg.window);
    } else {
      TopoTag topo = topo_tag_of_triple(cfg.coupling, g.qubits[0], g.qubits[1], g.qubits[2]);
      pick = libs.basis.fixed_representative(topo);
    }
    const BasisVariant& v = libs.basis.variants[pick];
    if (debug_log_enabled())
      std::fprintf(stderr, "[qctx] ccx @(%u,%u,%u): variant %s\n", g.qubits[0],
                   g.qubits[1], g.qubits[2], v.tag.str().c_str());
    dag.substitute_node(id, v.templ, {g.qubits[0], g.qubits[1], g.qubits[2]});
  }

  optimize_passes(dag, 3, true);
  res.basis = dag.linearize();
  res.basis_cnots = basis_cnot_count(res.basis);

  res.native = lower_circuit_to_native(res.basis, cfg.coupling, libs.native,
                                       cfg.mode == Mode::QContext);

  for (const Gate& g : res.native.gates) {
    if (g.kind != GateKind::Rzx) continue;
    (g.tag == GateTag::Routing ? res.cr_r : res.cr_b) += 1;
  }
  res.sx = count_sx(res.native);

  if (cfg.verify && cfg.coupling.num_physical() <= cfg.verify_cap &&
      cfg.coupling.num_physical() <= (uint32_t)kMaxUnitaryQubits) {
    res.verified = verify_against_input(res.native, input, res.routed, 1e-7);
  }
  res.time_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

struct BenchRow {
  std::string name;
  uint32_t nq = 0;
  bool has_ccx = false;
  CompileResult trios, qcontext;
  std::optional<double> delta_cr_b;  // 1 - CR_b(qcontext)/CR_b(trios)
  std::optional<double> delta_sx;    // 1 - sx(qcontext)/sx(trios)
  std::optional<std::string> error;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<double> geo_delta_cr_b;  // over Toffoli-bearing rows
  std::optional<double> geo_delta_sx;    // over all rows
};

inline std::optional<double> geometric_mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double acc = 0;
  for (double x : xs) {
    if (x <= 0) return std::nullopt;  // undefined for non-positive deltas
    acc += std::log(x);
  }
  return std::exp(acc / (double)xs.size());
}

/// Runs both modes with identical seeds over a list of qasm files.
inline BenchReport benchmark_run(const std::vector<std::string>& paths,
                                 PipelineConfig base_cfg,
                                 const Libraries& libs = Libraries::instance()) {
  if (paths.empty()) throw Error("benchmark_run: no benchmark files given");
  BenchReport rep;
  for (const std::string& path : paths) {
    BenchRow row;
    row.name = std::filesystem::path(path).stem().string();
    try {
      std::ifstream in(path);
      if (!in) throw Error("cannot open " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      Circuit input = parse_qasm(ss.str());
      row.nq = input.num_qubits;
      row.has_ccx = gate_counts(input).of(GateKind::Ccx) > 0;

      PipelineConfig cfg = base_cfg;
      cfg.mode = Mode::Trios;
      row.trios = compile_pipeline(input, cfg, libs);
      cfg.mode = Mode::QContext;
      row.qcontext = compile_pipeline(input, cfg, libs);

      if (row.has_ccx && row.trios.cr_b > 0)
        row.delta_cr_b = 1.0 - (double)row.qcontext.cr_b / (double)row.trios.cr_b;
      if (row.trios.sx > 0)
        row.delta_sx = 1.0 - (double)row.qcontext.sx / (double)row.trios.sx;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  std::vector<double> dcr, dsx;
  for (const BenchRow& r : rep.rows) {
    if (r.error) continue;
    if (r.delta_cr_b) dcr.push_back(*r.delta_cr_b);
    if (r.delta_sx) dsx.push_back(*r.delta_sx);
  }
  rep.geo_delta_cr_b = geometric_mean(dcr);
  rep.geo_delta_sx = geometric_mean(dsx);
  return rep;
}

/// Deterministic JSON report. Timing fields are emitted only when
/// with_timing is set, so that fixed-seed reruns are byte-identical.
inline nlohmann::ordered_json report_to_json(const BenchReport& rep,
                                             bool with_timing = false) {
  nlohmann::ordered_json j;
  j["suite"] = nlohmann::ordered_json::array();
  for (const BenchRow& r : rep.rows) {
    nlohmann::ordered_json e;
    e["benchmark"] = r.name;
    if (r.error) {
      e["error"] = *r.error;
      j["suite"].push_back(std::move(e));
      continue;
    }
    e["nq"] = r.nq;
    auto mode_json = [&](const CompileResult& c) {
      nlohmann::ordered_json m;
      m["cr_r"] = c.cr_r;
      m["cr_b"] = c.cr_b;
      m["sx"] = c.sx;
      m["basis_cnots"] = c.basis_cnots;
      if (with_timing) m["time_ms"] = c.time_ms;
      if (c.verified) m["verified"] = *c.verified;
      return m;
    };
    e["trios"] = mode_json(r.trios);
    e["qcontext"] = mode_json(r.qcontext);
    e["delta_cr_b"] = r.delta_cr_b ? nlohmann::ordered_json(*r.delta_cr_b)
                                   : nlohmann::ordered_json(nullptr);
    e["delta_sx"] = r.delta_sx ? nlohmann::ordered_json(*r.delta_sx)
                               : nlohmann::ordered_json(nullptr);
    if (with_timing)
      e["time_ratio"] = r.trios.time_ms > 0 ? r.qcontext.time_ms / r.trios.time_ms : 0.0;
    j["suite"].push_back(std::move(e));
  }
  j["geo_mean"]["delta_cr_b"] = rep.geo_delta_cr_b
                                    ? nlohmann::ordered_json(*rep.geo_delta_cr_b)
                                    : nlohmann::ordered_json(nullptr);
  j["geo_mean"]["delta_sx"] = rep.geo_delta_sx
                                  ? nlohmann::ordered_json(*rep.geo_delta_sx)
                                  : nlohmann::ordered_json(nullptr);
  return j;
}

inline std::string report_table(const BenchReport& rep) {
  std::ostringstream os;
  auto pct = [](std::optional<double> v) {
    if (!v) return std::string("---");
    std::ostringstream p;
    p << std::fixed << std::setprecision(1) << (*v * 100) << "%";
    return p.str();
  };
  os << std::left << std::setw(16) << "benchmark" << std::right << std::setw(4) << "nq"
     << std::setw(7) << "CR_r" << std::setw(8) << "CR_b(t)" << std::setw(8) << "sx(t)"
     << std::setw(8) << "CR_b(q)" << std::setw(8) << "sx(q)" << std::setw(9) << "dCR_b"
     << std::setw(8) << "dsx" << std::setw(8) << "Tq/Tt" << "\n";
  for (const BenchRow& r : rep.rows) {
    if (r.error) {
      os << std::left << std::setw(16) << r.name << "ERROR: " << *r.error << "\n";
      continue;
    }
    double ratio = r.trios.time_ms > 0 ? r.qcontext.time_ms / r.trios.time_ms : 0;
    os << std::left << std::setw(16) << r.name << std::right << std::setw(4) << r.nq
       << std::setw(7) << r.qcontext.cr_r << std::setw(8) << r.trios.cr_b
       << std::setw(8) << r.trios.sx << std::setw(8) << r.qcontext.cr_b << std::setw(8)
       << r.qcontext.sx << std::setw(9) << pct(r.delta_cr_b) << std::setw(8)
       << pct(r.delta_sx) << std::setw(8) << std::fixed << std::setprecision(2)
       << ratio << "\n";
  }
  os << "geo mean dCR_b (Toffoli-bearing): " << pct(rep.geo_delta_cr_b) << "\n";
  os << "geo mean dsx (all benchmarks):    " << pct(rep.geo_delta_sx) << "\n";
  return os.str();
}

}  // namespace qctx
