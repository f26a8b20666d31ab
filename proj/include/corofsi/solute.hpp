/// @file solute.hpp
/// @brief Polymer number density and extra stress transport: conservative
///        upwind advection (with the geometric flux corrections), exact
///        pointwise rotation-relaxation, and implicit A-weighted diffusion
///        with zero-flux boundaries for eps > 0.

#pragma once

#include "corofsi/fields.hpp"
#include "corofsi/geometry.hpp"

namespace corofsi {

/// Monotone advection schemes. Upwind1 is the plain first-order flux;
/// Muscl adds MC-limited slopes (still monotone under the CFL guard).
enum class AdvectScheme { Upwind1, Muscl };

struct SoluteState {
    ScalarField rho;
    SymTensorField T;

    SoluteState() = default;
    explicit SoluteState(const Grid2& g) : rho(g), T(g) {}

    /// True when T is SPD (t11 > 0 and det > 0) at every active cell.
    bool stress_spd(const Grid2& g) const;
};

struct SoluteOptions {
    AdvectScheme rho_scheme = AdvectScheme::Muscl;
    AdvectScheme stress_scheme = AdvectScheme::Upwind1;
    double cg_tol = 1e-12;
    int cg_max_iter = 20000;
};

/// Conservative flux-form advection by the transformed flux velocity
/// m = B u + J w on faces; update f <- f - (dt/J) div(m f). Includes the
/// (I - B) convection correction and the domain-velocity drift through m.
ScalarField advect(const ScalarField& f, const VectorField& u,
                   const GeometryTensors& G, double dt, AdvectScheme scheme);
SymTensorField advect(const SymTensorField& f, const VectorField& u,
                      const GeometryTensors& G, double dt, AdvectScheme scheme);

/// Backward-Euler step of J df/dt = eps div(A grad f) with zero-flux
/// boundaries; the A off-diagonal is treated explicitly. eps = 0 returns
/// the input unchanged. Conserves the J-weighted integral up to solver
/// tolerance.
ScalarField diffuse_neumann(const ScalarField& f, double eps,
                            const GeometryTensors& G, double dt,
                            const SoluteOptions& opt = {});
SymTensorField diffuse_neumann(const SymTensorField& f, double eps,
                               const GeometryTensors& G, double dt,
                               const SoluteOptions& opt = {});

/// Strang-split step: half advection, exact reaction (W from the physical
/// velocity gradient, rho frozen per cell), half advection, lagged
/// geometric mass correction, then diffusion for eps > 0.
SoluteState solute_step(const SoluteState& s, const VectorField& u,
                        const GeometryTensors& G, const GeometryTensors& G_prev,
                        double eps, double dt, const SoluteOptions& opt = {});

} // namespace corofsi
