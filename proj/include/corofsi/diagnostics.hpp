/// @file diagnostics.hpp
/// @brief Energy functionals, Lp reports, the relative-energy distance
///        between an eps-run and the eps = 0 run (pullback comparison on
///        the zero-run's domain), and convergence-rate fits.

#pragma once

#include <string>
#include <vector>

#include "corofsi/coupled.hpp"

namespace corofsi {

/// Instantaneous terms of the energy estimate; cumulative integrals are
/// accumulated by the run loop.
struct EnergyBreakdown {
    double fluid_kinetic = 0.0;     // 1/2 ||u||^2, J-weighted
    double structure_kinetic = 0.0; // 1/2 ||d eta/dt||^2
    double structure_bending = 0.0; // 1/2 ||d2 eta/dy2||^2
    double rho_l2sq = 0.0;          // ||rho||^2, J-weighted
    double stress_l2sq = 0.0;       // ||T||^2 (Frobenius), J-weighted
    double viscous_rate = 0.0;      // (A grad u) : grad u
    double gamma_rate = 0.0;        // ||d/dy d eta/dt||^2
    double eps_rate = 0.0;          // (A grad rho).grad rho + tensor analogue

    double total() const {
        return fluid_kinetic + structure_kinetic + structure_bending + rho_l2sq +
               stress_l2sq;
    }
};

EnergyBreakdown energy(const FluidState& f, const SoluteState& s,
                       const StructureState& st, double eps, double gamma,
                       const GeometryTensors& G);

/// One time point of the relative-energy functional between two runs.
struct RelEnergyPoint {
    double time = 0.0;
    double structure_vel = 0.0;  // ||d/dt (eta - zeta)||^2
    double structure_bend = 0.0; // ||d2/dy2 (eta - zeta)||^2
    double velocity = 0.0;       // ||ubar - v||^2 on the zeta domain
    double rho = 0.0;            // ||rhobar - sigma||^2
    double stress = 0.0;         // ||Tbar - U||^2
    double grad_velocity = 0.0;  // ||grad(ubar - v)||^2 (rate)
    double gamma_rate = 0.0;     // ||d/dt d/dy (eta - zeta)||^2 (rate)

    double sup_part() const {
        return structure_vel + structure_bend + velocity + rho + stress;
    }
};

struct RelEnergySeries {
    std::vector<RelEnergyPoint> pts;
    double sup_sum = 0.0;        // max over time of the instantaneous sum
    double cum_stress = 0.0;     // int ||Tbar - U||^2 dt
    double cum_grad_velocity = 0.0;
    double cum_gamma = 0.0;      // gamma int ||d/dt d/dy (eta-zeta)||^2 dt
    double D = 0.0;              // sup_sum + cumulative terms
};

/// Compares snapshots at one matched time: fields of run_eps are pulled
/// back onto the zero run's domain through Psi_{eta-zeta} via exact map
/// composition and bilinear interpolation through Psi_eta^{-1}.
RelEnergyPoint pullback_compare(const Snapshot& snap_eps,
                                const Snapshot& snap_zero, const SimConfig& cfg);

/// Full series over matched snapshot times; GridMismatch if the runs do
/// not share layout or snapshot cadence.
RelEnergySeries relative_energy(const RunOutput& run_eps,
                                const RunOutput& run_zero, double gamma);

/// Least-squares slope of log D vs log eps with goodness of fit.
/// DegenerateFit when fewer than 3 pairs or any D <= 0.
void fit_rate(const std::vector<double>& eps_list,
              const std::vector<double>& D_list, double& slope, double& r2);

/// Lp / Lq conservation-dissipation report per snapshot. For each snapshot:
/// relative drift of ||rho||_p for each p, and the residual of the stress
/// dissipation inequality
///   tr-norm: ||T(t)||_q^q + 2 int_0^t ||T||_q^q <= 2 T_end ||rho_0||_q^q
///            + ||T_0||_q^q
/// with Schatten-q norms (eigenvalue powers) for SPD T.
struct LpReport {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
LpReport lp_report(const RunOutput& out, const std::vector<double>& p_list,
                   const std::vector<double>& q_list);

/// Schatten-q integral norm^q of an SPD tensor field: int tr(T^q) J dx.
double stress_schatten_q(const SymTensorField& T, double q, const ScalarField& J,
                         const Grid2& g);

} // namespace corofsi
