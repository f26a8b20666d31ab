/// @file test_fp_oracle.cpp
/// @brief Configuration-space solver: equilibrium, conservation,
///        positivity, moments, and the closure residual.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "corofsi/fp_oracle.hpp"

using namespace corofsi;

namespace {
std::mt19937_64 rng(31415);
double unif01() {
    static std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(rng);
}
} // namespace

TEST_CASE("Maxwellian mass is within the tail-control window") {
    const QGrid qg(96, 6.0);
    CHECK(qg.maxwellian_mass() >= 0.999);
    CHECK(qg.maxwellian_mass() <= 1.001);
    for (double m : qg.M.v) CHECK(m > 0.0);
}

TEST_CASE("moments of the Maxwellian are (1, I)") {
    const QGrid qg(128, 6.0);
    FPState s(qg);
    s.f = qg.M;
    double rho;
    SymMat2 T;
    moments(s, qg, rho, T);
    CHECK(std::abs(rho - 1.0) <= 1e-3);
    CHECK(std::abs(T.t11 - 1.0) <= 1e-3);
    CHECK(std::abs(T.t22 - 1.0) <= 1e-3);
    CHECK(std::abs(T.t12) <= 1e-12);
}

TEST_CASE("moments are linear and vanish at f = 0") {
    const QGrid qg(64, 6.0);
    FPState z(qg);
    double rho;
    SymMat2 T;
    moments(z, qg, rho, T);
    CHECK(rho == 0.0);
    CHECK(T.frobenius() == 0.0);
    FPState two(qg);
    for (int k = 0; k < qg.grid.ncells(); ++k) two.f.v[k] = 2.0 * qg.M.v[k];
    moments(two, qg, rho, T);
    CHECK(std::abs(rho - 2.0) <= 2e-3);
    CHECK(std::abs(T.t11 - 2.0) <= 2e-3);
}

TEST_CASE("the Maxwellian is stationary without drift") {
    const QGrid qg(64, 6.0);
    FPState s(qg);
    s.f = qg.M;
    const FPState out = fp_step(s, qg, Mat2::zero(), 1e-2);
    for (int k = 0; k < qg.grid.ncells(); ++k)
        CHECK(std::abs(out.f.v[k] - qg.M.v[k]) <= 1e-12);
}

TEST_CASE("the Maxwellian is near-stationary under rotational drift") {
    // the rotational flux of a radial density is divergence-free
    const QGrid qg(64, 6.0);
    const Mat2 W{0.0, 1.0, -1.0, 0.0};
    FPState s(qg);
    s.f = qg.M;
    const double m0 = s.mass(qg);
    for (int k = 0; k < 20; ++k) s = fp_step(s, qg, W, 5e-3);
    CHECK(std::abs(s.mass(qg) - m0) <= 1e-10);
    CHECK(s.nonnegative());
    double rho;
    SymMat2 T;
    moments(s, qg, rho, T);
    CHECK(std::abs(rho - 1.0) <= 5e-3);
    CHECK((T - SymMat2{1.0, 0.0, 1.0}).frobenius() <= 5e-3);
}

TEST_CASE("mass conservation and positivity on random data") {
    const QGrid qg(48, 6.0);
    const Mat2 W{0.0, 0.8, -0.8, 0.0};
    FPState s(qg);
    for (int k = 0; k < qg.grid.ncells(); ++k)
        s.f.v[k] = qg.M.v[k] * (0.5 + unif01());
    const double m0 = s.mass(qg);
    for (int step = 0; step < 10; ++step) {
        s = fp_step(s, qg, W, 4e-3);
        CHECK(std::abs(s.mass(qg) - m0) <= 1e-10 * m0);
        CHECK(s.nonnegative());
    }
}

TEST_CASE("gaussian_state realizes the requested moments") {
    const QGrid qg(128, 6.0);
    const SymMat2 T0{1.6, 0.3, 0.9};
    const double rho0 = 1.7;
    const FPState s = gaussian_state(qg, rho0, T0);
    double rho;
    SymMat2 T;
    moments(s, qg, rho, T);
    CHECK(std::abs(rho - rho0) <= 3e-3);
    CHECK((T - T0).frobenius() <= 6e-3);
}

TEST_CASE("fp_step rejects a non-antisymmetric drift") {
    const QGrid qg(32, 6.0);
    FPState s(qg);
    s.f = qg.M;
    CHECK_THROWS_AS(fp_step(s, qg, {1.0, 0.0, 0.0, 1.0}, 1e-3), NotAntisymmetric);
}

TEST_CASE("closure residual is small at equilibrium data") {
    const QGrid qg(64, 6.0);
    const double r = closure_residual(Mat2::zero(), 1.0, {1.0, 0.0, 1.0},
                                      0.2, 5e-3, qg);
    CHECK(r <= 2e-3);
}

TEST_CASE("pure relaxation matches the macroscopic law") {
    const QGrid qg(96, 6.0);
    const double r = closure_residual(Mat2::zero(), 1.0, {2.0, 0.0, 1.0},
                                      0.5, 5e-3, qg);
    CHECK(r <= 5e-3);
}
