/// @file test_coupled.cpp
/// @brief Traction sign conventions, coupled fixed points, energy
///        behaviour against the running estimate, run/sweep contracts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "corofsi/coupled.hpp"
#include "corofsi/diagnostics.hpp"

using namespace corofsi;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SimConfig base_config() {
    SimConfig c;
    c.nx = c.ny = 32;
    c.ny_s = 32;
    c.dt = 1e-3;
    c.T_final = 0.02;
    c.gamma = 0.5;
    c.L = 0.25;
    c.output_cadence = 5;
    return c;
}
} // namespace

TEST_CASE("traction of uniform pressure is +p") {
    SimConfig cfg = base_config();
    SimState st = make_initial_state(cfg);
    const double c = 1.7;
    FluidState f(st.G.grid);
    for (double& v : f.p.v) v = c;
    SymTensorField T(st.G.grid);
    const StructureForcing F = traction(f, T, st.G);
    for (double v : F.F) CHECK(v == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("traction of constant isotropic stress is -c") {
    SimConfig cfg = base_config();
    SimState st = make_initial_state(cfg);
    const double c = 0.8;
    FluidState f(st.G.grid);
    SymTensorField T(st.G.grid, {c, 0.0, c});
    const StructureForcing F = traction(f, T, st.G);
    for (double v : F.F) CHECK(v == doctest::Approx(-c).epsilon(1e-12));
}

TEST_CASE("zero traction for the quiescent state") {
    SimConfig cfg = base_config();
    SimState st = make_initial_state(cfg);
    FluidState f(st.G.grid);
    SymTensorField T(st.G.grid);
    const StructureForcing F = traction(f, T, st.G);
    for (double v : F.F) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("all-zero initial data stays zero") {
    SimConfig cfg = base_config();
    cfg.rho0_base = 0.0;
    cfg.t0_base = 0.0;
    cfg.t0_dev_amp = 0.0;
    // t0_base = 0 with zero dev: T0 = 0 (not SPD, but admissible as data)
    SimState st;
    CHECK_THROWS_AS(cfg.validate(), ValidationError); // t0 SPD guard trips
    cfg.t0_base = 1e-12;
    st = make_initial_state(cfg);
    for (int k = 0; k < 10; ++k) step(st, cfg, cfg.dt);
    for (double v : st.fluid.u.u) CHECK(std::abs(v) <= 1e-12);
    CHECK(st.structure.max_abs_eta() <= 1e-12);
}

TEST_CASE("uniform equilibrium is a fixed point of the coupled step") {
    SimConfig cfg = base_config();
    const double r = 0.6;
    cfg.rho0_base = r;
    cfg.rho0_bump_amp = 0.0;
    cfg.t0_base = r;
    cfg.t0_dev_amp = 0.0;
    SimState st = make_initial_state(cfg);
    for (int k = 0; k < 20; ++k) step(st, cfg, cfg.dt);
    for (double v : st.fluid.u.u) CHECK(std::abs(v) <= 1e-10);
    for (double v : st.fluid.u.v) CHECK(std::abs(v) <= 1e-10);
    CHECK(st.structure.max_abs_eta() <= 1e-10);
    for (int j = 0; j < cfg.ny; ++j)
        for (int i = 0; i < cfg.nx; ++i) {
            CHECK(st.solute.rho(i, j) == doctest::Approx(r).epsilon(1e-12));
            CHECK((st.solute.T.at(i, j) - SymMat2{r, 0.0, r}).frobenius() <=
                  1e-12);
        }
}

TEST_CASE("single-mode shell oscillation decays; energy estimate holds") {
    SimConfig cfg = base_config();
    cfg.eta0_amp = 0.02;
    cfg.eta0_mode = 1;
    cfg.rho0_base = 0.5;
    cfg.t0_base = 0.5;
    cfg.T_final = 0.05;
    SimState st = make_initial_state(cfg);

    const EnergyBreakdown e0 =
        energy(st.fluid, st.solute, st.structure, cfg.eps, cfg.gamma, st.G);
    const double E0 = e0.total();
    double cum = 0.0;
    for (int k = 0; k < 50; ++k) {
        step(st, cfg, cfg.dt);
        const EnergyBreakdown e =
            energy(st.fluid, st.solute, st.structure, cfg.eps, cfg.gamma, st.G);
        cum += cfg.dt * (e.viscous_rate + cfg.gamma * e.gamma_rate);
        const double rhs = E0 + 2.0 * (50 * cfg.dt) * e0.rho_l2sq;
        CHECK(e.total() + cum <= rhs + 1e-4 * E0);
    }
    // the structure must have lost energy to the fluid
    const StructureEnergy se = structure_energy(st.structure);
    const StructureEnergy se0{0.0, 0.25 * cfg.eta0_amp * cfg.eta0_amp *
                                        std::pow(kTwoPi, 4)};
    CHECK(se.kinetic + se.bending <= se0.kinetic + se0.bending);
}

TEST_CASE("run with T_final = 0 emits only the initial diagnostics") {
    SimConfig cfg = base_config();
    cfg.T_final = 0.0;
    const RunOutput out = run(cfg);
    CHECK(out.rows.size() == 1);
    CHECK(out.snapshots.size() == 1);
    CHECK(out.rows[0][0] == 0.0);
}

TEST_CASE("identical configs give bit-identical outputs") {
    SimConfig cfg = base_config();
    cfg.eta0_amp = 0.01;
    cfg.T_final = 0.01;
    const RunOutput a = run(cfg);
    const RunOutput b = run(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        for (std::size_t j = 0; j < a.rows[i].size(); ++j)
            CHECK(a.rows[i][j] == b.rows[i][j]);
}

TEST_CASE("equilibrium run reports zero dissipation") {
    SimConfig cfg = base_config();
    cfg.rho0_base = 0.5;
    cfg.t0_base = 0.5;
    cfg.T_final = 0.01;
    const RunOutput out = run(cfg);
    const auto& last = out.rows.back();
    // viscous and gamma dissipation columns (6, 7) stay at roundoff
    CHECK(std::abs(last[6]) <= 1e-12);
    CHECK(std::abs(last[7]) <= 1e-12);
}

TEST_CASE("sweep validation rejects duplicates and wrong order") {
    SweepConfig sc;
    sc.base = base_config();
    sc.eps_list = {0.1, 0.1};
    CHECK_THROWS_AS(sc.validate(), ValidationError);
    sc.eps_list = {0.01, 0.1};
    CHECK_THROWS_AS(sc.validate(), ValidationError);
    sc.eps_list = {0.1, -0.01};
    CHECK_THROWS_AS(sc.validate(), ValidationError);
}

TEST_CASE("sweep shape contract") {
    SweepConfig sc;
    sc.base = base_config();
    sc.base.T_final = 0.005;
    sc.base.eta0_amp = 0.01;
    sc.base.rho0_bump_amp = 0.2;
    sc.base.rho0_bump_width = 0.15;
    sc.base.rho0_bump_y = 0.5;
    sc.eps_list = {0.1, 0.03};
    const SweepOutput sw = sweep(sc);
    CHECK(sw.zero_run.cfg.eps == 0.0);
    REQUIRE(sw.runs.size() == 2);
    CHECK(sw.run_errors[0].empty());
    CHECK(sw.run_errors[1].empty());
    const RelEnergySeries s0 =
        relative_energy(sw.runs[0], sw.zero_run, sc.base.gamma);
    const RelEnergySeries s1 =
        relative_energy(sw.runs[1], sw.zero_run, sc.base.gamma);
    CHECK(s0.D > s1.D);
    CHECK(s1.D > 0.0);
}

TEST_CASE("wall contact guard trips") {
    SimConfig cfg = base_config();
    cfg.eta0_amp = 0.24; // 0.96 L
    SimState st = make_initial_state(cfg);
    CHECK_THROWS_AS(step(st, cfg, cfg.dt), WallContact);
}

TEST_CASE("disk runs evolve the solute only") {
    SimConfig cfg = base_config();
    cfg.geometry = "disk";
    cfg.eta0_amp = 0.0;
    cfg.rho0_base = 0.4;
    cfg.rho0_bump_amp = 0.3;
    cfg.rho0_bump_x = 0.2;
    cfg.rho0_bump_y = 0.0;
    cfg.t0_base = 0.5;
    cfg.T_final = 0.01;
    const RunOutput out = run(cfg);
    CHECK_FALSE(out.truncated);
    CHECK(out.rows.size() >= 2);
}
