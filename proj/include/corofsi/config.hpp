/// @file config.hpp
/// @brief Run/sweep/oracle configuration: the key = value document format,
///        validation against the simulation invariants, and rendering for
///        the config echo (round-trip exact).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corofsi/geometry.hpp"
#include "corofsi/tensor_ops.hpp"

namespace corofsi {

/// All physical and numerical parameters of one simulation run.
struct SimConfig {
    // physical
    double eps = 0.0;    // center-of-mass diffusion, >= 0
    double gamma = 0.5;  // structure viscoelasticity, > 0
    double L = 0.25;     // tubular width
    double T_final = 1.0;

    // discretization
    std::string geometry = "channel"; // channel | disk
    int nx = 64, ny = 64, ny_s = 64;
    double dt = 1e-3;
    int subiterations = 2;
    int output_cadence = 10;
    std::uint64_t seed = 0;

    // initial data descriptors
    int eta0_mode = 1;
    double eta0_amp = 0.0;
    int etastar_mode = 1;
    double etastar_amp = 0.0;
    std::string u0_kind = "zero"; // zero | lifted
    double rho0_base = 0.5;
    double rho0_bump_amp = 0.0;
    double rho0_bump_x = 0.5, rho0_bump_y = 0.5;
    double rho0_bump_width = 0.1;
    double t0_base = 0.5;
    double t0_dev_amp = 0.0;
    int t0_dev_mode = 1;

    InstanceKind instance() const {
        return geometry == "disk" ? InstanceKind::Disk
                                  : InstanceKind::PeriodicChannel;
    }

    void validate() const; // throws ValidationError naming the invariant
};

struct SweepConfig {
    SimConfig base;
    std::vector<double> eps_list; // strictly decreasing, all > 0

    void validate() const;
};

struct OracleConfig {
    int nq = 128;
    double q_max = 6.0;
    double theta = 1.0; // rotational W = theta [[0,1],[-1,0]]
    double t_end = 1.0;
    double dt = 2.5e-3;
    double rho0 = 1.0;
    double t0_11 = 2.0, t0_12 = 0.0, t0_22 = 1.0;

    SymMat2 T0() const { return {t0_11, t0_12, t0_22}; }
    void validate() const;
};

/// Parses the [run] section (plus top-level keys) of a config document.
SimConfig parse_run_config(const std::string& text);
/// Parses [run] + [sweep].
SweepConfig parse_sweep_config(const std::string& text);
/// Parses [oracle].
OracleConfig parse_oracle_config(const std::string& text);

std::string render_config(const SimConfig& cfg);
std::string render_config(const SweepConfig& cfg);
std::string render_config(const OracleConfig& cfg);

} // namespace corofsi
