#include "corofsi/tensor_ops.hpp"

namespace corofsi {

namespace {

void require_antisymmetric(const Mat2& W) {
    const Mat2 sym = W + W.transpose();
    if (sym.frobenius() > 1e-12 * W.frobenius()) {
        throw NotAntisymmetric("matrix is not antisymmetric within 1e-12 relative");
    }
}

Mat2 matrix_power(const Mat2& m, int n) {
    Mat2 r = Mat2::identity();
    for (int i = 0; i < n; ++i) r = r * m;
    return r;
}

} // namespace

double colon(const Mat2& a, const Mat2& b, ColonConvention conv) {
    if (conv == ColonConvention::ByTrace) {
        return a.a11 * b.a11 + a.a12 * b.a21 + a.a21 * b.a12 + a.a22 * b.a22;
    }
    return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}

Mat2 vorticity(const Mat2& grad_u) {
    const double w = 0.5 * (grad_u.a12 - grad_u.a21);
    return {0.0, w, -w, 0.0};
}

SymMat2 corotational_product(const Mat2& W, const SymMat2& T) {
    require_antisymmetric(W);
    // W T + T W^T with W = [[0,w],[-w,0]]:
    //   = w [[2 t12, t22 - t11], [t22 - t11, -2 t12]]
    const double w = W.a12;
    return {2.0 * w * T.t12, w * (T.t22 - T.t11), -2.0 * w * T.t12};
}

double corotational_contraction(const Mat2& grad_w, const Mat2& Z, int n,
                                ContractionTarget target, ColonConvention conv) {
    const Mat2 W = vorticity(grad_w);
    const Mat2 Y = (target == ContractionTarget::Z) ? Z : Z.transpose();
    const Mat2 Yn = matrix_power(Y, n);
    const Mat2 Wt = vorticity(grad_w.transpose());
    return colon(W * Z, Yn, conv) + colon(Z * Wt, Yn, conv);
}

SymMat2 reaction_exact(const SymMat2& T0, double rho, const Mat2& W, double dt) {
    require_antisymmetric(W);
    const double w = W.a12;
    const double c = std::cos(dt * w);
    const double s = std::sin(dt * w);
    // R T0 R^T with R = [[c, s], [-s, c]]
    const double r11 = c * c * T0.t11 + 2.0 * c * s * T0.t12 + s * s * T0.t22;
    const double r12 = c * c * T0.t12 - c * s * T0.t11 + c * s * T0.t22 - s * s * T0.t12;
    const double r22 = s * s * T0.t11 - 2.0 * c * s * T0.t12 + c * c * T0.t22;
    const double decay = std::exp(-2.0 * dt);
    const double relax = rho * (1.0 - decay);
    return {decay * r11 + relax, decay * r12, decay * r22 + relax};
}

} // namespace corofsi
