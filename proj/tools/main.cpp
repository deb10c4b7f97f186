// Command-line driver: steady solves of the benchmark cases, the
// manufactured-solution convergence study, the dense verification lab, and
// mesh generation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hdgns/parallel.hpp"
#include "hdgns/perturblab.hpp"
#include "hdgns/runconfig.hpp"
#include "hdgns/study.hpp"

namespace {

using namespace hdgns;

/// Write via a temporary file and rename, so readers never see partial output.
void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

Mesh make_mesh(const RunConfig& cfg) {
  return cfg.flow_case == "lid" ? generate_unit_square(cfg.nx)
                                : generate_bfs(cfg.n);
}

int run_solve(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg);
  const SpaceLayout layout = build_layout(mesh, cfg.k);
  const ContinuationSchedule schedule = cfg.flow_case == "lid"
                                            ? ContinuationSchedule::lid(cfg.re_max)
                                            : ContinuationSchedule::bfs(cfg.re_max);
  const FlowCase fc = cfg.flow_case == "lid" ? FlowCase::lid : FlowCase::bfs;
  const SteadyResult result = solve_steady(mesh, layout, fc, schedule,
                                           cfg.driver_options());
  std::ostringstream csv;
  write_report_csv(csv, result.records);
  if (cfg.output.empty())
    std::cout << csv.str();
  else
    atomic_write(cfg.output, csv.str());
  if (!cfg.json_output.empty()) {
    std::ostringstream js;
    write_report_json(js, result.records);
    atomic_write(cfg.json_output, js.str());
  }
  if (!result.ok) {
    std::cerr << "solve failed: " << result.message << "\n";
    return 1;
  }
  return 0;
}

int run_study(const RunConfig& cfg) {
  DriverOptions opts = cfg.driver_options();
  const StudyResult result =
      convergence_study(trig_vortex(), cfg.k, cfg.levels, 1.0, opts);
  std::ostringstream csv;
  write_study_csv(csv, result);
  if (cfg.output.empty())
    std::cout << csv.str();
  else
    atomic_write(cfg.output, csv.str());
  if (!result.ok) {
    std::cerr << "study failed: " << result.message << "\n";
    return 1;
  }
  return 0;
}

int run_verify(const RunConfig& cfg) {
  std::string json;
  const bool ok = run_verification(cfg.seed, std::cout, &json);
  if (!cfg.json_output.empty())
    atomic_write(cfg.json_output, json);
  else if (!cfg.output.empty())
    atomic_write(cfg.output, json);
  return ok ? 0 : 1;
}

int run_mesh(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg);
  std::ostringstream out;
  write_mesh(mesh, out);
  if (cfg.output.empty())
    std::cout << out.str();
  else
    atomic_write(cfg.output, out.str());
  std::cerr << "mesh: " << mesh.num_vertices() << " vertices, "
            << mesh.num_cells() << " cells, " << mesh.num_faces() << " faces ("
            << mesh.num_boundary_faces() << " boundary)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG Navier-Stokes solver with augmented Lagrangian block "
               "preconditioning"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.threads = 0;  // 0 = unset; falls back to HDGAL_THREADS, then 1
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--threads", cfg.threads, "worker threads for assembly");
    sub->add_option("-o,--output", cfg.output, "output file (default: stdout)");
    sub->add_flag("--verbose", cfg.verbose, "per-iteration progress on stderr");
  };

  CLI::App* solve = app.add_subcommand("solve", "steady solve with continuation");
  solve->add_option("--case", cfg.flow_case, "lid | bfs")
      ->check(CLI::IsMember({"lid", "bfs"}));
  solve->add_option("--nx", cfg.nx, "unit-square resolution (lid)");
  solve->add_option("--n", cfg.n, "cells per unit length (bfs)");
  solve->add_option("--k", cfg.k, "polynomial degree");
  solve->add_option("--gamma", cfg.gamma, "augmentation weight");
  solve->add_option("--alpha", cfg.alpha, "interior penalty (default 10 k^2)");
  solve->add_option("--precond", cfg.precond, "G | GM")
      ->check(CLI::IsMember({"G", "GM"}));
  solve->add_option("--re-max", cfg.re_max, "final Reynolds number");
  solve->add_option("--json", cfg.json_output, "also write a JSON report");
  add_common(solve);

  CLI::App* study = app.add_subcommand("study", "manufactured-solution rates");
  study->add_option("--k", cfg.k, "polynomial degree");
  study->add_option("--levels", cfg.levels, "unit-square resolutions")
      ->delimiter(',');
  study->add_option("--gamma", cfg.gamma, "augmentation weight");
  study->add_option("--precond", cfg.precond, "G | GM")
      ->check(CLI::IsMember({"G", "GM"}));
  add_common(study);

  CLI::App* verify = app.add_subcommand("verify", "dense verification lab");
  verify->add_option("--seed", cfg.seed, "random seed");
  verify->add_option("--json", cfg.json_output, "JSON report path");
  add_common(verify);

  CLI::App* meshcmd = app.add_subcommand("mesh", "generate a mesh file");
  meshcmd->add_option("--case", cfg.flow_case, "lid | bfs")
      ->check(CLI::IsMember({"lid", "bfs"}));
  meshcmd->add_option("--nx", cfg.nx, "unit-square resolution (lid)");
  meshcmd->add_option("--n", cfg.n, "cells per unit length (bfs)");
  add_common(meshcmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    // config file first, then re-parse so flags win
    if (!config_path.empty()) {
      RunConfig file_cfg;
      apply_config_file(config_path, file_cfg);
      cfg = file_cfg;
      app.clear();
      app.parse(argc, argv);
    }
    if (cfg.threads < 1) {
      const char* env = std::getenv("HDGAL_THREADS");
      cfg.threads = env ? std::max(1, std::atoi(env)) : 1;
    }
    set_num_threads(cfg.threads);

    if (app.got_subcommand(solve)) {
      cfg.subcommand = "solve";
      return run_solve(cfg);
    }
    if (app.got_subcommand(study)) {
      cfg.subcommand = "study";
      return run_study(cfg);
    }
    if (app.got_subcommand(verify)) {
      cfg.subcommand = "verify";
      return run_verify(cfg);
    }
    if (app.got_subcommand(meshcmd)) {
      cfg.subcommand = "mesh";
      return run_mesh(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const std::string msg = e.what();
    return msg.rfind("config", 0) == 0 ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
