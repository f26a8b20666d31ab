/// @file fp_oracle.hpp
/// @brief Configuration-space Fokker-Planck solver under a frozen
///        homogeneous velocity gradient, used to check that the moments
///        follow the corotational stress law the macroscopic solver
///        implements (relaxation coefficient 2, rotational drag).

#pragma once

#include "corofsi/fields.hpp"
#include "corofsi/geometry.hpp"
#include "corofsi/tensor_ops.hpp"

namespace corofsi {

/// Truncated configuration grid [-q_max, q_max]^2 with the Hookean
/// Maxwellian M = exp(-|q|^2/2) / (2 pi) precomputed at cell centers.
struct QGrid {
    Grid2 grid;
    ScalarField M;
    double q_max = 6.0;
    int nq = 128;

    QGrid(int nq_, double q_max_);

    /// Midpoint mass of M over the truncated grid; must sit in [0.999, 1.001].
    double maxwellian_mass() const;
    double maxwellian(double qx, double qy) const;
};

/// Probability density over configurations.
struct FPState {
    ScalarField f;

    FPState() = default;
    explicit FPState(const QGrid& qg) : f(qg.grid) {}

    double mass(const QGrid& qg) const;
    bool nonnegative() const;
};

/// Gaussian with mass rho0 and second moment T0 (so covariance T0/rho0).
FPState gaussian_state(const QGrid& qg, double rho0, const SymMat2& T0);

/// One step: explicit monotone (MC-limited upwind) rotational drift
/// div_q(W q f), implicit backward-Euler configurational diffusion
/// div_q(M grad_q(f/M)); no-flux truncation boundary, mass-conservative.
FPState fp_step(const FPState& s, const QGrid& qg, const Mat2& W, double dt);

/// Zeroth and second moments: rho = int f, T = int f q (x) q.
void moments(const FPState& s, const QGrid& qg, double& rho, SymMat2& T);

/// Evolves f mesoscopically and T macroscopically (reaction_exact, same W)
/// from matched initial data; returns max_t |T_meso - T_macro| / |T_macro|.
double closure_residual(const Mat2& W, double rho0, const SymMat2& T0,
                        double t_end, double dt, const QGrid& qg);

/// Exponential-decay rate of the deviatoric stress under W = 0, from a
/// least-squares fit of log |dev T_meso|(t); the model value is 2.
double relaxation_rate(const QGrid& qg, double rho0, const SymMat2& T0,
                       double t_end, double dt);

} // namespace corofsi
