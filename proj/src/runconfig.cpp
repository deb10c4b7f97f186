#include "hdgns/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hdgns {

PrecondVariant RunConfig::precond_variant() const {
  if (precond == "G") return PrecondVariant::G;
  if (precond == "GM") return PrecondVariant::GM;
  throw Error("config: precond must be 'G' or 'GM', got '" + precond + "'");
}

DriverOptions RunConfig::driver_options() const {
  DriverOptions opts;
  opts.gamma = gamma;
  opts.alpha = alpha;
  opts.variant = precond_variant();
  opts.tol.newton_atol = newton_atol;
  opts.tol.newton_rtol = newton_rtol;
  opts.tol.outer_rtol = rtol_outer;
  opts.tol.outer_atol = atol_outer;
  opts.tol.inner_rtol = rtol_inner;
  opts.tol.inner_atol = atol_inner;
  opts.verbose = verbose;
  return opts;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_levels(const std::vector<int>& levels) {
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(levels[i]);
  }
  return s;
}

std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw Error("config: bad level list entry '" + tok + "'");
    }
  }
  if (out.empty()) throw Error("config: empty level list");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw Error("");
    return x;
  } catch (...) {
    throw Error("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw Error("");
    return x;
  } catch (...) {
    throw Error("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

}  // namespace

std::string RunConfig::render() const {
  std::ostringstream out;
  out << "case=" << flow_case << '\n'
      << "nx=" << nx << '\n'
      << "n=" << n << '\n'
      << "k=" << k << '\n'
      << "gamma=" << fmt_double(gamma) << '\n'
      << "alpha=" << fmt_double(alpha) << '\n'
      << "precond=" << precond << '\n'
      << "re_max=" << fmt_double(re_max) << '\n'
      << "levels=" << fmt_levels(levels) << '\n'
      << "newton_atol=" << fmt_double(newton_atol) << '\n'
      << "newton_rtol=" << fmt_double(newton_rtol) << '\n'
      << "rtol_outer=" << fmt_double(rtol_outer) << '\n'
      << "atol_outer=" << fmt_double(atol_outer) << '\n'
      << "rtol_inner=" << fmt_double(rtol_inner) << '\n'
      << "atol_inner=" << fmt_double(atol_inner) << '\n'
      << "output=" << output << '\n'
      << "json_output=" << json_output << '\n'
      << "seed=" << seed << '\n'
      << "threads=" << threads << '\n'
      << "verbose=" << (verbose ? 1 : 0) << '\n';
  return out.str();
}

void apply_config_line(const std::string& raw, int lineno, RunConfig& cfg) {
  std::string line = raw;
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  // trim
  const auto l = line.find_first_not_of(" \t\r");
  if (l == std::string::npos) return;
  const auto r = line.find_last_not_of(" \t\r");
  line = line.substr(l, r - l + 1);
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw Error("config line " + std::to_string(lineno) + ": expected key=value");
  const std::string key = line.substr(0, eq);
  const std::string val = line.substr(eq + 1);

  if (key == "case") {
    if (val != "lid" && val != "bfs")
      throw Error("config: case must be 'lid' or 'bfs', got '" + val + "'");
    cfg.flow_case = val;
  } else if (key == "nx") {
    cfg.nx = int(parse_int(key, val));
  } else if (key == "n") {
    cfg.n = int(parse_int(key, val));
  } else if (key == "k") {
    cfg.k = int(parse_int(key, val));
  } else if (key == "gamma") {
    cfg.gamma = parse_double(key, val);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, val);
  } else if (key == "precond") {
    if (val != "G" && val != "GM")
      throw Error("config: precond must be 'G' or 'GM', got '" + val + "'");
    cfg.precond = val;
  } else if (key == "re_max") {
    cfg.re_max = parse_double(key, val);
  } else if (key == "levels") {
    cfg.levels = parse_levels(val);
  } else if (key == "newton_atol") {
    cfg.newton_atol = parse_double(key, val);
  } else if (key == "newton_rtol") {
    cfg.newton_rtol = parse_double(key, val);
  } else if (key == "rtol_outer") {
    cfg.rtol_outer = parse_double(key, val);
  } else if (key == "atol_outer") {
    cfg.atol_outer = parse_double(key, val);
  } else if (key == "rtol_inner") {
    cfg.rtol_inner = parse_double(key, val);
  } else if (key == "atol_inner") {
    cfg.atol_inner = parse_double(key, val);
  } else if (key == "output") {
    cfg.output = val;
  } else if (key == "json_output") {
    cfg.json_output = val;
  } else if (key == "seed") {
    cfg.seed = std::uint64_t(parse_int(key, val));
  } else if (key == "threads") {
    cfg.threads = int(parse_int(key, val));
  } else if (key == "verbose") {
    cfg.verbose = parse_int(key, val) != 0;
  } else {
    throw Error("config: unknown key '" + key + "'");
  }
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) apply_config_line(line, ++lineno, cfg);
}

}  // namespace hdgns
