/// @file coupled.hpp
/// @brief Orchestrates one full simulation: geometry update, traction,
///        staggered structure/fluid/solute substeps with optional
///        subiterations, diagnostics capture, and eps-sweeps.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corofsi/config.hpp"
#include "corofsi/fluid.hpp"
#include "corofsi/solute.hpp"
#include "corofsi/structure.hpp"

namespace corofsi {

struct SimState {
    double time = 0.0;
    FluidState fluid;
    SoluteState solute;
    StructureState structure;
    GeometryTensors G, G_prev;
};

struct Snapshot {
    double time = 0.0;
    VectorField u;
    ScalarField p;
    ScalarField rho;
    SymTensorField T;
    StructureState structure;
};

struct RunOutput {
    SimConfig cfg;
    Grid2 grid;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<Snapshot> snapshots;
    bool truncated = false;
    std::string error;
};

struct SweepOutput {
    SweepConfig cfg;
    RunOutput zero_run;
    std::vector<double> eps_values;
    std::vector<RunOutput> runs;                    // one per eps, same order
    std::vector<std::string> run_errors;            // empty string when ok
};

/// Builds the initial state from the config descriptors (mean-zero
/// structure, compatible boundary data, SPD stress).
SimState make_initial_state(const SimConfig& cfg);

/// Fluid traction on the shell: minus the normal component of the Piola
/// traction B [ (grad_z u + grad_z u^T) - p I + T ] n at the flexible
/// boundary nodes, one-sided normal stencils, times |d varphi / dy|.
StructureForcing traction(const FluidState& f, const SymTensorField& T,
                          const GeometryTensors& G);

/// One staggered step: geometry from the current eta, traction, structure
/// step, interface velocity, fluid step, solute step; the traction-to-fluid
/// loop runs cfg.subiterations times. Throws WallContact when
/// ||eta||_inf >= 0.95 L.
void step(SimState& state, const SimConfig& cfg, double dt);

/// Runs to T_final, capturing diagnostics and snapshots every
/// output_cadence steps (plus the initial and final states).
RunOutput run(const SimConfig& cfg);

/// Runs the eps = 0 reference plus one run per entry of eps_list with
/// identical data; individual failures are recorded, not fatal.
SweepOutput sweep(const SweepConfig& cfg);

} // namespace corofsi
