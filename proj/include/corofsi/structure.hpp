/// @file structure.hpp
/// @brief Viscoelastic shell integrator: d2/dt2 eta - gamma d/dt d2/dy2 eta
///        + d4/dy4 eta = F on the periodic parameter interval [0,1),
///        advanced by one backward-Euler step solved exactly per Fourier
///        mode. The zero mode is projected out (mean-zero states).

#pragma once

#include <utility>
#include <vector>

#include "corofsi/fields.hpp"

namespace corofsi {

/// Right-hand side of the shell equation at the structure nodes
/// (force per unit parameter length).
struct StructureForcing {
    std::vector<double> F;
};

/// One backward-Euler step of the first-order system (eta, w = d eta/dt):
/// per wavenumber k,
///   w+ = (w + dt (F_k - k^4 eta)) / (1 + dt gamma k^2 + dt^2 k^4),
///   eta+ = eta + dt w+.
/// Unconditionally solvable for dt > 0, gamma >= 0; output mean-zero.
StructureState structure_step(const StructureState& s, const StructureForcing& F,
                              double dt, double gamma);

struct StructureEnergy {
    double kinetic = 0.0; // 1/2 ||d eta/dt||^2_{L2}
    double bending = 0.0; // 1/2 ||d2 eta/dy2||^2_{L2}
};

/// Spectral evaluation of the two energy norms.
StructureEnergy structure_energy(const StructureState& s);

/// ||d^order f/dy^order||^2_{L2[0,1)} of the trigonometric interpolant of
/// periodic nodal data (order 0 gives the plain L2 norm squared).
double periodic_deriv_norm_sq(const std::vector<double>& nodal, int order);

} // namespace corofsi
