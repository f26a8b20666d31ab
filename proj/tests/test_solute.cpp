/// @file test_solute.cpp
/// @brief Transport, exact reaction, diffusion: conservation, positivity,
///        SPD preservation, and the decoupled relaxation oracles.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corofsi/solute.hpp"

using namespace corofsi;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
std::mt19937_64 rng(11311);
double unif() {
    static std::uniform_real_distribution<double> d(-1.0, 1.0);
    return d(rng);
}

Grid2 disk_grid(int n) {
    Grid2 g(n, n, -1.0, -1.0, 2.0, 2.0, false);
    g.set_disk_mask(0.0, 0.0, 1.0);
    return g;
}

/// Rigid rotation about the origin at MAC faces.
VectorField rotation_field(const Grid2& g, double omega) {
    VectorField u(g);
    const int nux = u.nux();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) u.U(i, j) = -omega * g.yc(j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.V(i, j) = omega * g.xc(i);
    return u;
}

ScalarField gaussian_bump(const Grid2& g, double cx, double cy, double w,
                          double amp, double base) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double dx = g.xc(i) - cx, dy = g.yc(j) - cy;
            f(i, j) = base + amp * std::exp(-0.5 * (dx * dx + dy * dy) / (w * w));
        }
    return f;
}

double mass(const ScalarField& f, const GeometryTensors& G) {
    double acc = 0.0;
    const Grid2& g = G.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.active(i, j)) acc += f(i, j) * G.J(i, j);
    return acc * g.cell_area();
}
} // namespace

TEST_CASE("zero velocity leaves the field unchanged") {
    const Grid2 g = disk_grid(32);
    const GeometryTensors G = identity_tensors(g);
    VectorField u(g);
    const ScalarField f = gaussian_bump(g, 0.3, 0.0, 0.15, 1.0, 0.2);
    for (AdvectScheme s : {AdvectScheme::Upwind1, AdvectScheme::Muscl}) {
        const ScalarField out = advect(f, u, G, 1e-2, s);
        for (int k = 0; k < g.ncells(); ++k) CHECK(out.v[k] == f.v[k]);
    }
}

TEST_CASE("unit-CFL translation in the periodic direction is an exact shift") {
    Grid2 g(32, 16, 0.0, 0.0, 1.0, 1.0, true);
    const GeometryTensors G = identity_tensors(g);
    VectorField u(g);
    const double c = 1.0;
    for (double& x : u.u) x = c;
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = unif();
    const double dt = g.hx / c; // CFL exactly 1
    const ScalarField out = advect(f, u, G, dt, AdvectScheme::Upwind1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(out(i, j) == doctest::Approx(f((i - 1 + g.nx) % g.nx, j))
                                   .epsilon(1e-14));
}

TEST_CASE("CFL guard trips above one") {
    Grid2 g(16, 16, 0.0, 0.0, 1.0, 1.0, true);
    const GeometryTensors G = identity_tensors(g);
    VectorField u(g);
    for (double& x : u.u) x = 1.0;
    ScalarField f(g, 1.0);
    CHECK_THROWS_AS(advect(f, u, G, 1.2 * g.hx, AdvectScheme::Upwind1),
                    CFLViolation);
}

TEST_CASE("rotating bump on the disk: L1 exact, L2 decays mildly") {
    const int n = 64;
    const Grid2 g = disk_grid(n);
    const GeometryTensors G = identity_tensors(g);
    const double omega = 1.0;
    const VectorField u = rotation_field(g, omega);
    ScalarField f = gaussian_bump(g, 0.4, 0.0, 0.15, 1.0, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (!g.active(i, j)) f(i, j) = 0.0;

    const ScalarField J(g, 1.0);
    const double m0 = mass(f, G);
    const double l2_0 = weighted_lp_norm(f, 2.0, J, g);
    const double dt = 0.35 * g.hx; // max |u| ~ 1.4 inside the disk
    const int nsteps = 200;        // a partial revolution is enough here
    for (int k = 0; k < nsteps; ++k) f = advect(f, u, G, dt, AdvectScheme::Muscl);

    CHECK(std::abs(mass(f, G) - m0) <= 1e-12 * std::abs(m0));
    const double l2_1 = weighted_lp_norm(f, 2.0, J, g);
    CHECK(l2_1 <= l2_0);
    CHECK(l2_1 >= 0.93 * l2_0);
    for (double v : f.v) CHECK(v >= -1e-14);
}

TEST_CASE("uniform state reduces to the exact reaction solution") {
    Grid2 g(16, 16, 0.0, 0.0, 1.0, 1.0, true);
    const GeometryTensors G = identity_tensors(g);
    VectorField u(g);
    const double r = 0.7;
    SoluteState s(g);
    const SymMat2 T0{1.4, 0.2, 0.9};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            s.rho(i, j) = r;
            s.T.set(i, j, T0);
        }
    const double dt = 0.05;
    SoluteState out = s;
    for (int k = 0; k < 4; ++k) out = solute_step(out, u, G, G, 0.0, dt);
    const SymMat2 expect = reaction_exact(T0, r, Mat2::zero(), 4 * dt);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            CHECK(out.rho(i, j) == doctest::Approx(r).epsilon(1e-14));
            CHECK((out.T.at(i, j) - expect).frobenius() <= 1e-13);
        }
}

TEST_CASE("stress stays SPD under rotation with SPD data") {
    const int n = 48;
    const Grid2 g = disk_grid(n);
    const GeometryTensors G = identity_tensors(g);
    const VectorField u = rotation_field(g, 1.0);
    SoluteState s(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.xc(i), y = g.yc(j);
            const double d = 0.4 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y);
            const double sh = 0.2 * std::cos(kTwoPi * x);
            s.rho(i, j) = 0.5 + 0.3 * std::exp(-4.0 * (x * x + y * y));
            s.T.set(i, j, {1.0 + d, sh, 1.0 - d});
        }
    REQUIRE(s.stress_spd(g));
    const double dt = 0.3 * g.hx;
    SoluteState out = s;
    for (int k = 0; k < 60; ++k) {
        out = solute_step(out, u, G, G, 0.0, dt);
        CHECK(out.stress_spd(g));
    }
}

TEST_CASE("diffusion with eps = 0 is the identity") {
    const Grid2 g = disk_grid(24);
    const GeometryTensors G = identity_tensors(g);
    const ScalarField f = gaussian_bump(g, 0.0, 0.0, 0.2, 1.0, 0.1);
    const ScalarField out = diffuse_neumann(f, 0.0, G, 1e-2);
    for (int k = 0; k < g.ncells(); ++k) CHECK(out.v[k] == f.v[k]);
}

TEST_CASE("constant field is a Neumann equilibrium") {
    const Grid2 g = disk_grid(24);
    const GeometryTensors G = identity_tensors(g);
    ScalarField f(g, 2.2);
    const ScalarField out = diffuse_neumann(f, 0.5, G, 1e-2);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.active(i, j))
                CHECK(out(i, j) == doctest::Approx(2.2).epsilon(1e-10));
}

TEST_CASE("sine mode decays at the heat-kernel rate") {
    Grid2 g(64, 16, 0.0, 0.0, 1.0, 1.0, true);
    const GeometryTensors G = identity_tensors(g);
    const double eps = 0.1, k1 = kTwoPi;
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = std::sin(k1 * g.xc(i));
    const double dt = 1e-3;
    const int nsteps = 50;
    ScalarField out = f;
    for (int k = 0; k < nsteps; ++k) out = diffuse_neumann(out, eps, G, dt);
    double amp = 0.0;
    for (int i = 0; i < g.nx; ++i) amp = std::max(amp, std::abs(out(i, 4)));
    const double expect = std::exp(-eps * k1 * k1 * nsteps * dt);
    CHECK(std::abs(amp - expect) / expect <= 0.01);
}

TEST_CASE("zero-flux diffusion conserves the J-weighted integral") {
    const int n = 48;
    const Grid2 g = disk_grid(n);
    const GeometryTensors G = identity_tensors(g);
    ScalarField f = gaussian_bump(g, 0.3, -0.2, 0.2, 1.0, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (!g.active(i, j)) f(i, j) = 0.0;
    const double m0 = mass(f, G);
    for (int k = 0; k < 20; ++k) f = diffuse_neumann(f, 0.3, G, 5e-3);
    CHECK(std::abs(mass(f, G) - m0) <= 1e-8 * std::abs(m0));
}

TEST_CASE("stress relaxes toward rho I with eps > 0") {
    Grid2 g(32, 32, 0.0, 0.0, 1.0, 1.0, true);
    const GeometryTensors G = identity_tensors(g);
    VectorField u(g);
    SoluteState s(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double r = 0.5 + 0.2 * std::sin(kTwoPi * g.xc(i));
            s.rho(i, j) = r;
            s.T.set(i, j, {r + 0.3, 0.1, r - 0.1});
        }
    double prev = 1e300;
    for (int k = 0; k < 10; ++k) {
        s = solute_step(s, u, G, G, 0.05, 0.01);
        double dev = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const SymMat2 d = s.T.at(i, j) -
                                  SymMat2{s.rho(i, j), 0.0, s.rho(i, j)};
                dev = std::max(dev, d.frobenius());
            }
        CHECK(dev <= prev * (1.0 + 1e-12));
        prev = dev;
    }
}

TEST_CASE("Lp norms are conserved by transport within the upwind envelope") {
    // prescribed solenoidal rotation; short run, coarse tolerance (the
    // quantitative refinement study is an acceptance criterion)
    const int n = 64;
    const Grid2 g = disk_grid(n);
    const GeometryTensors G = identity_tensors(g);
    const VectorField u = rotation_field(g, 1.0);
    SoluteState s(g);
    s.rho = gaussian_bump(g, 0.4, 0.0, 0.18, 1.0, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) s.rho(i, j) = 0.0;
            s.T.set(i, j, SymMat2::identity());
        }
    const ScalarField J(g, 1.0);
    const double l1_0 = weighted_lp_norm(s.rho, 1.0, J, g);
    const double l4_0 = weighted_lp_norm(s.rho, 4.0, J, g);
    const double dt = 0.3 * g.hx;
    for (int k = 0; k < 150; ++k)
        s.rho = advect(s.rho, u, G, dt, AdvectScheme::Muscl);
    CHECK(std::abs(weighted_lp_norm(s.rho, 1.0, J, g) - l1_0) <= 1e-12 * l1_0);
    const double l4_1 = weighted_lp_norm(s.rho, 4.0, J, g);
    CHECK(l4_1 <= l4_0 * (1.0 + 1e-12));
    CHECK(l4_1 >= 0.85 * l4_0);
}
