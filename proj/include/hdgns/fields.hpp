// Interpolation of analytic fields into the discrete spaces and pointwise
// evaluation of discrete states.

#ifndef HDGNS_FIELDS_HPP
#define HDGNS_FIELDS_HPP

#include <functional>

#include "hdgns/assembly.hpp"

namespace hdgns {

using VectorField = std::function<Vec2(Vec2)>;
using ScalarField = std::function<double(Vec2)>;

/// L2 projection of (u, p) onto all four spaces; traces are projections of
/// the same fields restricted to faces.
StateVector interpolate_state(const Mesh& mesh, const SpaceLayout& layout,
                              const VectorField& u, const ScalarField& p);

/// L2 projection of a vector field onto the cell velocity space only
/// (coefficients written into a full-size state).
void project_cell_velocity(const Mesh& mesh, const SpaceLayout& layout,
                           const VectorField& u, StateVector& state);

Vec2 eval_velocity(const Mesh& mesh, const SpaceLayout& layout,
                   const StateVector& state, int cell, Vec2 ref_point);
double eval_pressure(const Mesh& mesh, const SpaceLayout& layout,
                     const StateVector& state, int cell, Vec2 ref_point);
Vec2 eval_trace_velocity(const SpaceLayout& layout, const StateVector& state,
                         int face, double s);
double eval_trace_pressure(const SpaceLayout& layout, const StateVector& state,
                           int face, double s);

/// Map a reference point of the given cell to physical coordinates.
Vec2 map_to_physical(const Mesh& mesh, int cell, Vec2 ref_point);

}  // namespace hdgns

#endif
