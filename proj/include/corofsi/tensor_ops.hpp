/// @file tensor_ops.hpp
/// @brief Pointwise 2x2 tensor algebra: vorticity, corotational products,
///        and the exact rotation-relaxation solution of the local stress ODE.

#pragma once

#include <array>
#include <cmath>

#include "corofsi/errors.hpp"

namespace corofsi {

/// Plain 2D point / vector.
struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// General 2x2 matrix, row-major.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
    double frobenius() const {
        return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

/// Symmetric 2x2 tensor stored as three components (stress units by context).
struct SymMat2 {
    double t11 = 0.0, t12 = 0.0, t22 = 0.0;

    static SymMat2 identity() { return {1.0, 0.0, 1.0} ; }

    double trace() const { return t11 + t22; }
    double det() const { return t11 * t22 - t12 * t12; }
    double frobenius() const {
        return std::sqrt(t11 * t11 + 2.0 * t12 * t12 + t22 * t22);
    }
    /// SPD check: leading minor and determinant both positive.
    bool spd() const { return t11 > 0.0 && det() > 0.0; }

    Mat2 full() const { return {t11, t12, t12, t22}; }

    SymMat2 operator+(const SymMat2& o) const {
        return {t11 + o.t11, t12 + o.t12, t22 + o.t22};
    }
    SymMat2 operator-(const SymMat2& o) const {
        return {t11 - o.t11, t12 - o.t12, t22 - o.t22};
    }
    SymMat2 operator*(double s) const { return {t11 * s, t12 * s, t22 * s}; }
};

inline SymMat2 operator*(double s, const SymMat2& m) { return m * s; }

/// Scalar matrix product convention used in contractions.
/// ByTrace is sum a_ij b_ji (= trace(AB)); Elementwise is sum a_ij b_ij.
enum class ColonConvention { ByTrace, Elementwise };

/// Choice of the contraction target Y in W(grad_w) Z : Y^n + Z W(grad_w^T) : Y^n.
enum class ContractionTarget { Z, ZTranspose };

double colon(const Mat2& a, const Mat2& b, ColonConvention conv);

/// Antisymmetric part W(G) = (G - G^T)/2 of a velocity gradient.
Mat2 vorticity(const Mat2& grad_u);

/// W*T + T*W^T for antisymmetric W; output symmetric and trace-free.
/// Throws NotAntisymmetric if |W + W^T| > 1e-12 |W|.
SymMat2 corotational_product(const Mat2& W, const SymMat2& T);

/// Evaluates W(grad_w) Z : Y^n + Z W(grad_w^T) : Y^n by direct matrix
/// arithmetic. The value is identically zero; the operation exists so that
/// the cancellation can be tested at machine precision.
double corotational_contraction(const Mat2& grad_w, const Mat2& Z, int n,
                                ContractionTarget target = ContractionTarget::Z,
                                ColonConvention conv = ColonConvention::ByTrace);

/// Exact solution at time dt of  dT/dt = W T + T W^T - 2 (T - rho I)
/// with W antisymmetric and rho frozen:
///   T(dt) = e^{-2 dt} R T0 R^T + rho (1 - e^{-2 dt}) I,  R = exp(dt W).
/// Preserves symmetry exactly and SPD whenever T0 is SPD and rho >= 0.
SymMat2 reaction_exact(const SymMat2& T0, double rho, const Mat2& W, double dt);

} // namespace corofsi
