/// @file test_tensor_ops.cpp
/// @brief Pointwise tensor algebra: vorticity, corotational products, the
///        zero-contraction identity, and the exact reaction solve.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "corofsi/tensor_ops.hpp"

using namespace corofsi;

namespace {
std::mt19937_64 rng(20240817);
double unif() {
    static std::uniform_real_distribution<double> d(-1.0, 1.0);
    return d(rng);
}
Mat2 random_mat() { return {unif(), unif(), unif(), unif()}; }
} // namespace

TEST_CASE("vorticity of a symmetric matrix vanishes") {
    const Mat2 W = vorticity(Mat2::identity());
    CHECK(W.frobenius() == 0.0);
}

TEST_CASE("vorticity of a shear gradient") {
    const Mat2 W = vorticity({0.0, 2.0, 0.0, 0.0});
    CHECK(W.a11 == 0.0);
    CHECK(W.a12 == 1.0);
    CHECK(W.a21 == -1.0);
    CHECK(W.a22 == 0.0);
}

TEST_CASE("vorticity output is antisymmetric for random inputs") {
    for (int i = 0; i < 1000; ++i) {
        const Mat2 W = vorticity(random_mat());
        const Mat2 S = W + W.transpose();
        CHECK(S.frobenius() <= 1e-15);
    }
}

TEST_CASE("corotational product of the identity vanishes") {
    const Mat2 W{0.0, 0.7, -0.7, 0.0};
    const SymMat2 out = corotational_product(W, SymMat2::identity());
    CHECK(out.frobenius() == 0.0);
}

TEST_CASE("corotational product of a diagonal tensor") {
    // W T + T W^T = [[0, b-a], [b-a, 0]] for W = [[0,1],[-1,0]], T = diag(a,b)
    const Mat2 W{0.0, 1.0, -1.0, 0.0};
    const double a = 1.3, b = -0.4;
    const SymMat2 out = corotational_product(W, {a, 0.0, b});
    CHECK(out.t11 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.t22 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.t12 == doctest::Approx(b - a).epsilon(1e-14));
}

TEST_CASE("corotational product is trace-free") {
    for (int i = 0; i < 1000; ++i) {
        const double w = unif();
        const Mat2 W{0.0, w, -w, 0.0};
        const SymMat2 T{unif(), unif(), unif()};
        CHECK(std::abs(corotational_product(W, T).trace()) <= 1e-14);
    }
}

TEST_CASE("corotational product rejects non-antisymmetric W") {
    CHECK_THROWS_AS(corotational_product({1.0, 0.0, 0.0, 1.0}, SymMat2::identity()),
                    NotAntisymmetric);
}

TEST_CASE("contraction with Z = I and n = 1 is zero") {
    CHECK(corotational_contraction(random_mat(), Mat2::identity(), 1) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("contraction worked example") {
    // grad_w with d w_1/d x_2 = 2: W = [[0,1],[-1,0]]; Z = [[1,2],[3,4]].
    // The two halves evaluate to +5 and -5 and cancel.
    const Mat2 gw{0.0, 2.0, 0.0, 0.0};
    const Mat2 Z{1.0, 2.0, 3.0, 4.0};
    const Mat2 W = vorticity(gw);
    CHECK(colon(W * Z, Z, ColonConvention::ByTrace) == doctest::Approx(5.0));
    CHECK(colon(Z * vorticity(gw.transpose()), Z, ColonConvention::ByTrace) ==
          doctest::Approx(-5.0));
    CHECK(std::abs(corotational_contraction(gw, Z, 1)) <= 1e-14);
}

TEST_CASE("contraction vanishes for random inputs, all n and conventions") {
    for (int i = 0; i < 10000; ++i) {
        const Mat2 gw = random_mat();
        const Mat2 Z = random_mat();
        const int n = 1 + i % 4;
        const double scale =
            vorticity(gw).frobenius() * std::pow(Z.frobenius(), n + 1);
        for (ContractionTarget tgt :
             {ContractionTarget::Z, ContractionTarget::ZTranspose}) {
            for (ColonConvention conv :
                 {ColonConvention::ByTrace, ColonConvention::Elementwise}) {
                CHECK(std::abs(corotational_contraction(gw, Z, n, tgt, conv)) <=
                      1e-12 * scale);
            }
        }
    }
}

TEST_CASE("reaction with W = 0, rho = 0 is pure relaxation") {
    const SymMat2 T0{1.5, 0.3, 0.8};
    const double dt = 0.37;
    const SymMat2 out = reaction_exact(T0, 0.0, Mat2::zero(), dt);
    const double decay = std::exp(-2.0 * dt);
    CHECK(out.t11 == doctest::Approx(decay * T0.t11).epsilon(1e-14));
    CHECK(out.t12 == doctest::Approx(decay * T0.t12).epsilon(1e-14));
    CHECK(out.t22 == doctest::Approx(decay * T0.t22).epsilon(1e-14));
}

TEST_CASE("reaction fixed point T = rho I") {
    const double rho = 0.8;
    const Mat2 W{0.0, 1.4, -1.4, 0.0};
    const SymMat2 out = reaction_exact({rho, 0.0, rho}, rho, W, 0.5);
    CHECK(out.t11 == doctest::Approx(rho).epsilon(1e-14));
    CHECK(out.t12 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(out.t22 == doctest::Approx(rho).epsilon(1e-14));
}

TEST_CASE("quarter rotation swaps the eigendirections") {
    const double theta = 2.0;
    const double dt = 0.5 * std::acos(-1.0) / theta; // theta dt = pi/2
    const Mat2 W{0.0, theta, -theta, 0.0};
    const SymMat2 out = reaction_exact({1.0, 0.0, 2.0}, 0.0, W, dt);
    const double decay = std::exp(-2.0 * dt);
    CHECK(out.t11 == doctest::Approx(2.0 * decay).epsilon(1e-13));
    CHECK(out.t22 == doctest::Approx(1.0 * decay).epsilon(1e-13));
    CHECK(out.t12 == doctest::Approx(0.0).epsilon(5e-13));
}

TEST_CASE("reaction semigroup property") {
    for (int i = 0; i < 500; ++i) {
        const SymMat2 T0{1.0 + 0.5 * unif(), 0.3 * unif(), 1.0 + 0.5 * unif()};
        const double rho = 0.5 + 0.4 * unif();
        const double th = unif();
        const Mat2 W{0.0, th, -th, 0.0};
        const double dt1 = 0.1 * (unif() + 1.5), dt2 = 0.1 * (unif() + 1.5);
        const SymMat2 two =
            reaction_exact(reaction_exact(T0, rho, W, dt1), rho, W, dt2);
        const SymMat2 one = reaction_exact(T0, rho, W, dt1 + dt2);
        CHECK((two - one).frobenius() <= 1e-12 * (1.0 + one.frobenius()));
    }
}

TEST_CASE("reaction preserves SPD") {
    for (int i = 0; i < 500; ++i) {
        const double a = 1.05 + 0.9 * std::abs(unif());
        const double c = 1.05 + 0.9 * std::abs(unif());
        const double b = 0.3 * unif() * std::sqrt(a * c);
        const SymMat2 T0{a, b, c};
        REQUIRE(T0.spd());
        const double th = 2.0 * unif();
        const Mat2 W{0.0, th, -th, 0.0};
        const SymMat2 out = reaction_exact(T0, 0.5 * (unif() + 1.0) + 0.01, W,
                                           0.3 * (unif() + 1.01));
        CHECK(out.spd());
    }
}

TEST_CASE("reaction derivative at dt = 0 matches the stress law") {
    const SymMat2 T0{1.2, 0.4, 0.9};
    const double rho = 0.6;
    const double th = 1.3;
    const Mat2 W{0.0, th, -th, 0.0};
    const double dt = 1e-6;
    const SymMat2 out = reaction_exact(T0, rho, W, dt);
    const SymMat2 fd = (out - T0) * (1.0 / dt);
    const SymMat2 rhoI = SymMat2::identity() * rho;
    const SymMat2 exact = corotational_product(W, T0) - (T0 - rhoI) * 2.0;
    CHECK((fd - exact).frobenius() <= 1e-4);
}

TEST_CASE("reaction rejects non-antisymmetric W") {
    CHECK_THROWS_AS(reaction_exact(SymMat2::identity(), 1.0,
                                   {0.0, 1.0, 1.0, 0.0}, 0.1),
                    NotAntisymmetric);
}
