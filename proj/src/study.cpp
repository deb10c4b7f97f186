#include "hdgns/study.hpp"

#include <cmath>
#include <ostream>

namespace hdgns {

VectorField ManufacturedSolution::forcing(double mu, bool with_convection) const {
  const auto lap = laplacian_u;
  const auto gu = grad_u;
  const auto uf = u;
  const auto gp = grad_p;
  return [mu, with_convection, lap, gu, uf, gp](Vec2 x) {
    const Vec2 l = lap(x);
    const Vec2 dp = gp(x);
    Vec2 f{-mu * l.x + dp.x, -mu * l.y + dp.y};
    if (with_convection) {
      const Vec2 uv = uf(x);
      const auto g = gu(x);
      f.x += g[0].dot(uv);
      f.y += g[1].dot(uv);
    }
    return f;
  };
}

BoundaryData ManufacturedSolution::boundary_data(double mu,
                                                 bool with_convection) const {
  return BoundaryData::manufactured(u, forcing(mu, with_convection));
}

ManufacturedSolution trig_vortex() {
  const double pi = M_PI;
  ManufacturedSolution ms;
  ms.u = [pi](Vec2 v) {
    const double sx = std::sin(pi * v.x);
    return Vec2{sx * sx * std::sin(2 * pi * v.y),
                -std::sin(2 * pi * v.x) * std::sin(pi * v.y) * std::sin(pi * v.y)};
  };
  ms.grad_u = [pi](Vec2 v) {
    const double sx = std::sin(pi * v.x), sy = std::sin(pi * v.y);
    const double s2x = std::sin(2 * pi * v.x), s2y = std::sin(2 * pi * v.y);
    const double c2x = std::cos(2 * pi * v.x), c2y = std::cos(2 * pi * v.y);
    return std::array<Vec2, 2>{
        Vec2{pi * s2x * s2y, 2 * pi * sx * sx * c2y},
        Vec2{-2 * pi * c2x * sy * sy, -pi * s2x * s2y}};
  };
  ms.laplacian_u = [pi](Vec2 v) {
    const double sx = std::sin(pi * v.x), sy = std::sin(pi * v.y);
    const double s2x = std::sin(2 * pi * v.x), s2y = std::sin(2 * pi * v.y);
    const double c2x = std::cos(2 * pi * v.x), c2y = std::cos(2 * pi * v.y);
    return Vec2{2 * pi * pi * (c2x * s2y - 2 * sx * sx * s2y),
                2 * pi * pi * (2 * s2x * sy * sy - s2x * c2y)};
  };
  ms.p = [pi](Vec2 v) { return std::cos(pi * v.x) * std::cos(pi * v.y); };
  ms.grad_p = [pi](Vec2 v) {
    return Vec2{-pi * std::sin(pi * v.x) * std::cos(pi * v.y),
                -pi * std::cos(pi * v.x) * std::sin(pi * v.y)};
  };
  return ms;
}

ManufacturedSolution quadratic_solution() {
  ManufacturedSolution ms;
  ms.u = [](Vec2 v) { return Vec2{v.x * v.x, -2.0 * v.x * v.y}; };
  ms.grad_u = [](Vec2 v) {
    return std::array<Vec2, 2>{Vec2{2.0 * v.x, 0.0}, Vec2{-2.0 * v.y, -2.0 * v.x}};
  };
  ms.laplacian_u = [](Vec2) { return Vec2{2.0, 0.0}; };
  ms.p = [](Vec2 v) { return v.x + v.y - 1.0; };
  ms.grad_p = [](Vec2) { return Vec2{1.0, 1.0}; };
  return ms;
}

StudyResult convergence_study(const ManufacturedSolution& ms, int k,
                              const std::vector<int>& levels, double re,
                              DriverOptions opts) {
  StudyResult out;
  const double mu = 1.0 / re;
  for (int nx : levels) {
    const Mesh mesh = generate_unit_square(nx);
    const SpaceLayout layout = build_layout(mesh, k);
    const BoundaryData bdata = ms.boundary_data(mu, opts.convection);
    SteadyResult sr = solve_single(mesh, layout, bdata, re, opts,
                                   "manufactured-nx" + std::to_string(nx));
    if (!sr.ok) {
      out.ok = false;
      out.message = "level nx=" + std::to_string(nx) + ": " + sr.message;
      return out;
    }
    StudyLevel level;
    level.nx = nx;
    level.error = compute_error_norms(mesh, layout, sr.state, ms.u, ms.grad_u,
                                      ms.p, opts.gamma, mu);
    out.levels.push_back(level);
  }
  for (std::size_t i = 1; i < out.levels.size(); ++i) {
    const auto& c = out.levels[i - 1].error;
    const auto& f = out.levels[i].error;
    out.rate_v_gamma.push_back(std::log2(c.v_gamma / f.v_gamma));
    out.rate_p_l2.push_back(std::log2(c.l2_p / f.l2_p));
    out.rate_u_l2.push_back(std::log2(c.l2_u / f.l2_u));
  }
  return out;
}

void write_study_csv(std::ostream& out, const StudyResult& r) {
  out << "nx,err_v_gamma,err_p_l2,err_u_l2,rate_v_gamma,rate_p_l2,rate_u_l2\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    char buf[160];
    if (i == 0)
      std::snprintf(buf, sizeof buf, "%d,%.6e,%.6e,%.6e,,,\n", r.levels[i].nx,
                    r.levels[i].error.v_gamma, r.levels[i].error.l2_p,
                    r.levels[i].error.l2_u);
    else
      std::snprintf(buf, sizeof buf, "%d,%.6e,%.6e,%.6e,%.3f,%.3f,%.3f\n",
                    r.levels[i].nx, r.levels[i].error.v_gamma,
                    r.levels[i].error.l2_p, r.levels[i].error.l2_u,
                    r.rate_v_gamma[i - 1], r.rate_p_l2[i - 1],
                    r.rate_u_l2[i - 1]);
    out << buf;
  }
}

}  // namespace hdgns
