#ifndef HDGNS_RUNCONFIG_HPP
#define HDGNS_RUNCONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hdgns/newton.hpp"

namespace hdgns {

/// Settings shared by the CLI subcommands. Defaults match the solver
/// parameters used throughout: gamma = 1e4, alpha = 10 k^2, outer/inner
/// linear tolerances 1e-4/1e-2, nonlinear tolerances 1e-7/1e-8.
struct RunConfig {
  std::string subcommand;  // solve | study | verify | mesh
  std::string flow_case = "lid";
  int nx = 8;
  int n = 2;
  int k = 2;
  double gamma = 1e4;
  double alpha = -1.0;  // <0: 10 k^2
  std::string precond = "GM";
  double re_max = 100.0;
  std::vector<int> levels{4, 8, 16};
  double newton_atol = 1e-7;
  double newton_rtol = 1e-8;
  double rtol_outer = 1e-4;
  double atol_outer = 1e-9;
  double rtol_inner = 1e-2;
  double atol_inner = 1e-8;
  std::string output;
  std::string json_output;
  std::uint64_t seed = 7;
  int threads = 1;
  bool verbose = false;

  PrecondVariant precond_variant() const;
  DriverOptions driver_options() const;

  /// key=value rendering of every configurable field; parse(render()) is the
  /// identity.
  std::string render() const;
};

/// Parse a key=value file ('#' starts a comment). Unknown keys and malformed
/// values are errors.
void apply_config_file(const std::string& path, RunConfig& cfg);
void apply_config_line(const std::string& line, int lineno, RunConfig& cfg);

}  // namespace hdgns

#endif
