/// @file fluid.hpp
/// @brief Incompressible momentum solver on the reference channel grid with
///        Hanzawa-transformed coefficients and extra-stress forcing. IMEX
///        update: implicit constant-coefficient viscosity, explicit
///        convection and geometric corrections, then a variable-coefficient
///        pressure projection enforcing div(B u) = 0.

#pragma once

#include <optional>
#include <vector>

#include "corofsi/fields.hpp"
#include "corofsi/geometry.hpp"

namespace corofsi {

/// Velocity at the staggered faces plus the projection pressure.
/// u_prev carries the previous velocity for the lagged (1-J) du/dt term;
/// it is empty before the first step.
struct FluidState {
    VectorField u;
    ScalarField p;
    VectorField u_prev;
    bool has_prev = false;

    FluidState() = default;
    explicit FluidState(const Grid2& g) : u(g), p(g), u_prev(g) {}
};

/// Interface data on the flexible top wall: normal velocity at the top
/// v-faces (length nx). Tangential velocity vanishes there; the rigid
/// bottom wall is no-slip.
struct InterfaceBC {
    std::vector<double> v_top;
};

/// Discrete transformed divergence: MAC divergence of the mass flux
/// m = B u evaluated on faces. Reduces to the plain MAC divergence when
/// eta = 0 (B = I).
ScalarField transformed_divergence(const VectorField& u, const GeometryTensors& G);

/// Projects u onto the discretely B-solenoidal space:
///   u <- u - C^T phi,  C(u) := div(B u),  (C C^T) phi = C(u*).
/// Wall v-faces are Dirichlet and never corrected. Returns the potential
/// phi (mean-zero). Throws ProjectionDiverged on CG failure.
ScalarField pressure_projection(VectorField& u, const GeometryTensors& G,
                                double rel_tol = 1e-10, int max_iter = 20000,
                                const ScalarField* warm_start = nullptr);

/// One IMEX step. T_stress is the extra stress on cells, bc the interface
/// velocity, body an optional manufactured body force at the faces.
FluidState fluid_step(const FluidState& f, const SymTensorField& T_stress,
                      const GeometryTensors& G, const GeometryTensors& G_prev,
                      const InterfaceBC& bc, double dt,
                      const VectorField* body = nullptr);

} // namespace corofsi
