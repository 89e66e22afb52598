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

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qctx/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

qctx::CouplingMap resolve_coupling(const std::string& arg) {
  if (fs::exists(arg)) return qctx::CouplingMap::load_file(arg);
  return qctx::builtin_map(arg);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qctx::Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_compile(const std::string& input, const std::string& coupling,
                const std::string& mode, uint64_t seed, bool verify,
                const std::string& report, const std::string& emit, bool timing) {
  qctx::PipelineConfig cfg;
  cfg.coupling = resolve_coupling(coupling);
  cfg.mode = mode == "qcontext" ? qctx::Mode::QContext : qctx::Mode::Trios;
  cfg.seed = seed;
  cfg.verify = verify;

  std::vector<std::string> warnings;
  qctx::Circuit circ = qctx::parse_qasm(slurp(input), &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  qctx::CompileResult res = qctx::compile_pipeline(circ, cfg);

  std::cout << "mode:        " << mode << "\n"
            << "qubits:      " << circ.num_qubits << " logical / "
            << cfg.coupling.num_physical() << " physical\n"
            << "basis CNOTs: " << res.basis_cnots << "\n"
            << "CR_r:        " << res.cr_r << "\n"
            << "CR_b:        " << res.cr_b << "\n"
            << "#sx:         " << res.sx << "\n";
  if (timing) std::cout << "time_ms:     " << res.time_ms << "\n";
  if (res.verified)
    std::cout << "verified:    " << (*res.verified ? "equivalent" : "MISMATCH") << "\n";
  else if (verify)
    std::cout << "verified:    skipped (circuit too wide for the unitary check)\n";

  if (!report.empty()) {
    nlohmann::ordered_json j;
    j["benchmark"] = fs::path(input).stem().string();
    j["mode"] = mode;
    j["nq"] = circ.num_qubits;
    j["cr_r"] = res.cr_r;
    j["cr_b"] = res.cr_b;
    j["sx"] = res.sx;
    j["basis_cnots"] = res.basis_cnots;
    if (timing) j["time_ms"] = res.time_ms;
    if (res.verified) j["verified"] = *res.verified;
    std::ofstream out(report);
    out << j.dump(2) << "\n";
  }
  if (!emit.empty()) {
    std::ofstream out(emit);
    out << qctx::emit_qasm(res.native);
  }
  if (res.verified && !*res.verified) {
    std::cerr << "error: compiled circuit is not equivalent to the input\n";
    return 3;
  }
  return 0;
}

int run_bench(const std::string& suite, const std::string& coupling, uint64_t seed,
              const std::string& report, bool timing, bool verify) {
  qctx::PipelineConfig cfg;
  cfg.coupling = resolve_coupling(coupling);
  cfg.seed = seed;
  cfg.verify = verify;

  std::vector<std::string> paths;
  if (fs::is_directory(suite)) {
    for (auto& e : fs::directory_iterator(suite))
      if (e.path().extension() == ".qasm") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
  } else if (fs::exists(suite)) {
    paths.push_back(suite);
  }
  if (paths.empty()) {
    std::cerr << "error: no .qasm benchmarks under " << suite << "\n";
    return 1;
  }

  qctx::BenchReport rep = qctx::benchmark_run(paths, cfg);
  std::cout << qctx::report_table(rep);
  if (!report.empty()) {
    std::ofstream out(report);
    out << qctx::report_to_json(rep, timing).dump(2) << "\n";
  }
  for (const qctx::BenchRow& r : rep.rows) {
    if (r.error) return 2;
    for (const qctx::CompileResult* c : {&r.trios, &r.qcontext})
      if (c->verified && !*c->verified) return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topology- and context-aware quantum gate decomposition"};
  app.require_subcommand(1);

  std::string input, coupling, mode = "qcontext", report, emit, suite;
  uint64_t seed = 0;
  bool verify = false, timing = false;

  CLI::App* compile = app.add_subcommand("compile", "compile one qasm file");
  compile->add_option("--input", input, "input .qasm path")->required();
  compile->add_option("--coupling", coupling, "builtin map name or JSON path")->required();
  compile->add_option("--mode", mode, "qcontext | trios")
      ->check(CLI::IsMember({"qcontext", "trios"}));
  compile->add_option("--seed", seed, "layout/routing seed");
  compile->add_flag("--verify", verify, "check unitary equivalence (<= 10 qubits)");
  compile->add_option("--report", report, "write a JSON report");
  compile->add_option("--emit", emit, "write the native circuit as qasm");
  compile->add_flag("--timing", timing, "include wall-clock fields in outputs");

  CLI::App* bench = app.add_subcommand("bench", "run a benchmark suite in both modes");
  bench->add_option("--suite", suite, "directory of .qasm files")->required();
  bench->add_option("--coupling", coupling, "builtin map name or JSON path")->required();
  bench->add_option("--seed", seed, "layout/routing seed");
  bench->add_option("--report", report, "write a JSON report");
  bench->add_flag("--timing", timing, "include wall-clock fields in the report");
  bench->add_flag("--verify", verify, "verify every compiled benchmark (<= 10 qubits)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (compile->parsed())
      return run_compile(input, coupling, mode, seed, verify, report, emit, timing);
    return run_bench(suite, coupling, seed, report, timing, verify);
  } catch (const qctx::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
