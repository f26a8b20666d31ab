#include "corofsi/fp_oracle.hpp"

#include <cmath>
#include <numbers>

#include "corofsi/solute.hpp"

namespace corofsi {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

QGrid::QGrid(int nq_, double q_max_)
    : grid(nq_, nq_, -q_max_, -q_max_, 2.0 * q_max_, 2.0 * q_max_, false),
      M(grid), q_max(q_max_), nq(nq_) {
    for (int j = 0; j < nq; ++j)
        for (int i = 0; i < nq; ++i) M(i, j) = maxwellian(grid.xc(i), grid.yc(j));
}

double QGrid::maxwellian(double qx, double qy) const {
    return std::exp(-0.5 * (qx * qx + qy * qy)) / kTwoPi;
}

double QGrid::maxwellian_mass() const {
    double s = 0.0;
    for (double m : M.v) s += m;
    return s * grid.cell_area();
}

double FPState::mass(const QGrid& qg) const {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * qg.grid.cell_area();
}

bool FPState::nonnegative() const {
    for (double x : f.v)
        if (x < 0.0) return false;
    return true;
}

FPState gaussian_state(const QGrid& qg, double rho0, const SymMat2& T0) {
    // covariance Sigma = T0 / rho0; density rho0 * N(0, Sigma)
    const double s11 = T0.t11 / rho0, s12 = T0.t12 / rho0, s22 = T0.t22 / rho0;
    const double det = s11 * s22 - s12 * s12;
    const double i11 = s22 / det, i12 = -s12 / det, i22 = s11 / det;
    const double norm = rho0 / (kTwoPi * std::sqrt(det));
    FPState st(qg);
    for (int j = 0; j < qg.nq; ++j)
        for (int i = 0; i < qg.nq; ++i) {
            const double qx = qg.grid.xc(i), qy = qg.grid.yc(j);
            const double quad = i11 * qx * qx + 2.0 * i12 * qx * qy + i22 * qy * qy;
            st.f(i, j) = norm * std::exp(-0.5 * quad);
        }
    return st;
}

namespace {

/// Rotational drift as a prescribed MAC face velocity u = W q.
VectorField drift_field(const QGrid& qg, const Mat2& W) {
    VectorField u(qg.grid);
    const Grid2& g = qg.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            u.U(i, j) = W.a11 * g.xu(i) + W.a12 * g.yc(j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u.V(i, j) = W.a21 * g.xc(i) + W.a22 * g.yv(j);
    return u;
}

/// Backward-Euler configurational diffusion: with g = f/M,
///   M g+ - dt div(M_face grad g+) = f,
/// solved by CG (SPD); the flux form conserves mass and keeps f >= 0.
void diffuse_config(ScalarField& f, const QGrid& qg, double dt) {
    const Grid2& g = qg.grid;
    const int n = g.ncells();
    std::vector<double> mface_x(static_cast<std::size_t>((g.nx + 1) * g.ny), 0.0);
    std::vector<double> mface_y(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            mface_x[i + (g.nx + 1) * j] = qg.maxwellian(g.xu(i), g.yc(j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            mface_y[i + g.nx * j] = qg.maxwellian(g.xc(i), g.yv(j));

    const double ax = dt / (g.hx * g.hx), ay = dt / (g.hy * g.hy);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const int k = g.cidx(i, j);
                double acc = qg.M(i, j) * x[k];
                if (i > 0)
                    acc += ax * mface_x[i + (g.nx + 1) * j] * (x[k] - x[k - 1]);
                if (i < g.nx - 1)
                    acc -= ax * mface_x[i + 1 + (g.nx + 1) * j] * (x[k + 1] - x[k]);
                if (j > 0)
                    acc += ay * mface_y[i + g.nx * j] * (x[k] - x[k - g.nx]);
                if (j < g.ny - 1)
                    acc -= ay * mface_y[i + g.nx * (j + 1)] * (x[k + g.nx] - x[k]);
                out[k] = acc;
            }
    };

    // Jacobi-preconditioned CG: the diagonal spans many orders of magnitude
    // because of the Maxwellian tails, so plain CG stalls.
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.cidx(i, j);
            double d = qg.M(i, j);
            if (i > 0) d += ax * mface_x[i + (g.nx + 1) * j];
            if (i < g.nx - 1) d += ax * mface_x[i + 1 + (g.nx + 1) * j];
            if (j > 0) d += ay * mface_y[i + g.nx * j];
            if (j < g.ny - 1) d += ay * mface_y[i + g.nx * (j + 1)];
            diag[k] = d;
        }

    std::vector<double> rhs = f.v;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) x[k] = f.v[k] / qg.M.v[k]; // warm start g = f/M

    std::vector<double> r(x.size()), z(x.size()), p(x.size()), Ap(x.size());
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    apply(x, Ap);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = rhs[i] - Ap[i];
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    const double b2 = std::sqrt(dot(rhs, rhs));
    const double stop = 1e-13 * b2 + 1e-300;
    int it = 0;
    while (std::sqrt(dot(r, r)) > stop) {
        if (++it > 20000) throw SolveDiverged("Fokker-Planck diffusion CG failed");
        apply(p, Ap);
        const double alpha = rz / dot(p, Ap);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = r[i] / diag[i];
        const double rzn = dot(r, z);
        const double beta = rzn / rz;
        rz = rzn;
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    for (int k = 0; k < n; ++k) f.v[k] = qg.M.v[k] * x[k];
}

} // namespace

FPState fp_step(const FPState& s, const QGrid& qg, const Mat2& W, double dt) {
    const Mat2 sym = W + W.transpose();
    if (sym.frobenius() > 1e-12 * (W.frobenius() + 1e-300))
        throw NotAntisymmetric("fp_step drift requires antisymmetric W");

    FPState out(qg);
    if (W.frobenius() > 0.0) {
        const VectorField u = drift_field(qg, W);
        const GeometryTensors I = identity_tensors(qg.grid);
        out.f = advect(s.f, u, I, dt, AdvectScheme::Muscl);
    } else {
        out.f = s.f;
    }
    diffuse_config(out.f, qg, dt);
    return out;
}

void moments(const FPState& s, const QGrid& qg, double& rho, SymMat2& T) {
    rho = 0.0;
    T = {};
    const Grid2& g = qg.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double f = s.f(i, j);
            const double qx = g.xc(i), qy = g.yc(j);
            rho += f;
            T.t11 += f * qx * qx;
            T.t12 += f * qx * qy;
            T.t22 += f * qy * qy;
        }
    const double da = g.cell_area();
    rho *= da;
    T = T * da;
}

double closure_residual(const Mat2& W, double rho0, const SymMat2& T0,
                        double t_end, double dt, const QGrid& qg) {
    FPState f = gaussian_state(qg, rho0, T0);
    double worst = 0.0;
    const int nsteps = static_cast<int>(std::round(t_end / dt));
    for (int n = 1; n <= nsteps; ++n) {
        f = fp_step(f, qg, W, dt);
        const double t = n * dt;
        const SymMat2 macro = reaction_exact(T0, rho0, W, t);
        double rho;
        SymMat2 meso;
        moments(f, qg, rho, meso);
        const double rel = (meso - macro).frobenius() / macro.frobenius();
        worst = std::max(worst, rel);
    }
    return worst;
}

double relaxation_rate(const QGrid& qg, double rho0, const SymMat2& T0,
                       double t_end, double dt) {
    FPState f = gaussian_state(qg, rho0, T0);
    const Mat2 W0 = Mat2::zero();
    std::vector<double> ts, logdev;
    const int nsteps = static_cast<int>(std::round(t_end / dt));
    for (int n = 1; n <= nsteps; ++n) {
        f = fp_step(f, qg, W0, dt);
        double rho;
        SymMat2 T;
        moments(f, qg, rho, T);
        const double mean = 0.5 * T.trace();
        const SymMat2 dev{T.t11 - mean, T.t12, T.t22 - mean};
        const double d = dev.frobenius();
        if (d > 1e-14) {
            ts.push_back(n * dt);
            logdev.push_back(std::log(d));
        }
    }
    // least-squares slope of log d vs t; lambda = -slope
    const std::size_t n = ts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += ts[i];
        sy += logdev[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * logdev[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

} // namespace corofsi
