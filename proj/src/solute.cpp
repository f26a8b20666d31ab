#include "corofsi/solute.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace corofsi {

namespace {

using dvec = std::vector<double>;

bool face_open_x(const Grid2& g, int i, int j) {
    if (!g.periodic_x && (i == 0 || i == g.nx)) return false;
    const int il = g.wrap_i(i - 1);
    const int ir = g.wrap_i(i);
    return g.active(il, j) && g.active(ir, j);
}

/// Index of the right u-face of cell i (faces are not wrapped/clamped
/// like cells: the nonperiodic layout has nx + 1 of them).
int uface_right(const Grid2& g, int i) {
    return g.periodic_x ? (i + 1) % g.nx : i + 1;
}

bool face_open_y(const Grid2& g, int i, int j) {
    if (j == 0 || j == g.ny) return false;
    return g.active(i, j - 1) && g.active(i, j);
}

/// Transformed flux velocity m = B u + J w at the two face families.
struct FaceFlux {
    std::vector<double> mx, my;
};

FaceFlux flux_velocity(const VectorField& u, const GeometryTensors& G) {
    const Grid2& g = G.grid;
    const int nux = u.nux();
    FaceFlux f;
    f.mx.assign(static_cast<std::size_t>(nux * g.ny), 0.0);
    f.my.assign(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            if (!face_open_x(g, i, j)) continue;
            const int k = i + nux * j;
            const Mat2& B = G.B_uface[k];
            const int il = g.wrap_i(i - 1);
            const double vbar = 0.25 * (u.V(il, j) + u.V(il, j + 1) +
                                        u.V(g.wrap_i(i), j) + u.V(g.wrap_i(i), j + 1));
            f.mx[k] = B.a11 * u.U(i, j) + B.a12 * vbar + G.J_uface[k] * G.w_uface[k].x;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!face_open_y(g, i, j)) continue;
            const int k = i + g.nx * j;
            const Mat2& B = G.B_vface[k];
            const int ip = g.periodic_x ? (i + 1) % g.nx : std::min(i + 1, g.nx);
            const double ubar = 0.25 * (u.U(i, j - 1) + u.U(ip, j - 1) +
                                        u.U(i, j) + u.U(ip, j));
            f.my[k] = B.a21 * ubar + B.a22 * u.V(i, j) + G.J_vface[k] * G.w_vface[k].y;
        }
    return f;
}

void check_cfl(const FaceFlux& m, const GeometryTensors& G, double dt) {
    const Grid2& g = G.grid;
    const int nux = g.periodic_x ? g.nx : g.nx + 1;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const double J = G.J(i, j);
            const double ax = std::max(std::abs(m.mx[i + nux * j]),
                                       std::abs(m.mx[uface_right(g, i) + nux * j]));
            const double ay = std::max(std::abs(m.my[i + g.nx * j]),
                                       std::abs(m.my[i + g.nx * (j + 1)]));
            worst = std::max(worst, dt / J * (ax / g.hx + ay / g.hy));
        }
    if (worst > 1.0 + 1e-12)
        throw CFLViolation("solute advection CFL exceeded 1");
}

double mc_limited_slope(double fm, double f0, double fp) {
    const double central = 0.5 * (fp - fm);
    const double left = 2.0 * (f0 - fm);
    const double right = 2.0 * (fp - f0);
    if (left * right <= 0.0) return 0.0;
    const double sgn = (central >= 0.0) ? 1.0 : -1.0;
    return sgn * std::min({std::abs(central), std::abs(left), std::abs(right)});
}

/// One conservative component update shared by the scalar and tensor paths.
void advect_component(const std::vector<double>& f, std::vector<double>& out,
                      const FaceFlux& m, const GeometryTensors& G, double dt,
                      AdvectScheme scheme) {
    const Grid2& g = G.grid;
    const int nux = g.periodic_x ? g.nx : g.nx + 1;
    auto F = [&](int i, int j) { return f[i + g.nx * j]; };

    // per-cell limited slopes (zero near closed faces)
    std::vector<double> sx, sy;
    if (scheme == AdvectScheme::Muscl) {
        sx.assign(f.size(), 0.0);
        sy.assign(f.size(), 0.0);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!g.active(i, j)) continue;
                const int k = i + g.nx * j;
                if (face_open_x(g, i, j) && face_open_x(g, i + 1, j)) {
                    sx[k] = mc_limited_slope(F(g.wrap_i(i - 1), j), F(i, j),
                                             F(g.wrap_i(i + 1), j));
                }
                if (face_open_y(g, i, j) && face_open_y(g, i, j + 1)) {
                    sy[k] = mc_limited_slope(F(i, j - 1), F(i, j), F(i, j + 1));
                }
            }
    }

    // MUSCL face states carry the (1 - nu) time-centering of the TVD flux;
    // without it the forward-Euler update is weakly unstable in L2
    auto face_state_x = [&](int i, int j, bool from_left, double nu) {
        const int ic = from_left ? g.wrap_i(i - 1) : g.wrap_i(i);
        double val = F(ic, j);
        if (scheme == AdvectScheme::Muscl) {
            val += (from_left ? 0.5 : -0.5) * (1.0 - nu) * sx[ic + g.nx * j];
        }
        return val;
    };
    auto face_state_y = [&](int i, int j, bool from_below, double nu) {
        const int jc = from_below ? j - 1 : j;
        double val = F(i, jc);
        if (scheme == AdvectScheme::Muscl) {
            val += (from_below ? 0.5 : -0.5) * (1.0 - nu) * sy[i + g.nx * jc];
        }
        return val;
    };

    std::vector<double> fx(m.mx.size(), 0.0), fy(m.my.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            if (!face_open_x(g, i, j)) continue;
            const int k = i + nux * j;
            const double mv = m.mx[k];
            const double nu = std::abs(mv) * dt / (G.J_uface[k] * g.hx);
            fx[k] = mv * (mv >= 0.0 ? face_state_x(i, j, true, nu)
                                    : face_state_x(i, j, false, nu));
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!face_open_y(g, i, j)) continue;
            const int k = i + g.nx * j;
            const double mv = m.my[k];
            const double nu = std::abs(mv) * dt / (G.J_vface[k] * g.hy);
            fy[k] = mv * (mv >= 0.0 ? face_state_y(i, j, true, nu)
                                    : face_state_y(i, j, false, nu));
        }

    out = f;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const int k = i + g.nx * j;
            const double divf =
                (fx[uface_right(g, i) + nux * j] - fx[i + nux * j]) / g.hx +
                (fy[i + g.nx * (j + 1)] - fy[i + g.nx * j]) / g.hy;
            out[k] = f[k] - dt * divf / G.J(i, j);
        }
}

} // namespace

bool SoluteState::stress_spd(const Grid2& g) const {
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            if (!T.at(i, j).spd()) return false;
        }
    return true;
}

ScalarField advect(const ScalarField& f, const VectorField& u,
                   const GeometryTensors& G, double dt, AdvectScheme scheme) {
    const FaceFlux m = flux_velocity(u, G);
    check_cfl(m, G, dt);
    ScalarField out(G.grid);
    advect_component(f.v, out.v, m, G, dt, scheme);
    return out;
}

SymTensorField advect(const SymTensorField& f, const VectorField& u,
                      const GeometryTensors& G, double dt, AdvectScheme scheme) {
    const FaceFlux m = flux_velocity(u, G);
    check_cfl(m, G, dt);
    SymTensorField out(G.grid);
    advect_component(f.t11, out.t11, m, G, dt, scheme);
    advect_component(f.t12, out.t12, m, G, dt, scheme);
    advect_component(f.t22, out.t22, m, G, dt, scheme);
    return out;
}

namespace {

double dot(const dvec& a, const dvec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Explicit off-diagonal part of div(A grad f) in flux form.
void offdiag_fluxes(const std::vector<double>& f, const GeometryTensors& G,
                    std::vector<double>& out) {
    const Grid2& g = G.grid;
    const int nux = g.periodic_x ? g.nx : g.nx + 1;
    auto F = [&](int i, int j) { return f[i + g.nx * j]; };
    // tangential derivative at a face, averaged over the flanking cells;
    // one-sided fallbacks when a neighbour face is closed
    out.assign(f.size(), 0.0);
    std::vector<double> fx(static_cast<std::size_t>(nux * g.ny), 0.0);
    std::vector<double> fy(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            if (!face_open_x(g, i, j)) continue;
            const int k = i + nux * j;
            const double a12 = G.A_uface[k].a12;
            if (a12 == 0.0) continue;
            const int il = g.wrap_i(i - 1), ir = g.wrap_i(i);
            double dfdy = 0.0;
            int cnt = 0;
            if (j + 1 < g.ny && g.active(il, j + 1) && g.active(ir, j + 1) &&
                j - 1 >= 0 && g.active(il, j - 1) && g.active(ir, j - 1)) {
                dfdy = (F(il, j + 1) + F(ir, j + 1) - F(il, j - 1) - F(ir, j - 1)) /
                       (4.0 * g.hy);
                cnt = 1;
            }
            if (cnt) fx[k] = a12 * dfdy;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!face_open_y(g, i, j)) continue;
            const int k = i + g.nx * j;
            const double a21 = G.A_vface[k].a21;
            if (a21 == 0.0) continue;
            const int il = g.wrap_i(i - 1), ir = g.wrap_i(i + 1);
            double dfdx = 0.0;
            int cnt = 0;
            if (g.active(il, j - 1) && g.active(il, j) && g.active(ir, j - 1) &&
                g.active(ir, j)) {
                dfdx = (F(ir, j - 1) + F(ir, j) - F(il, j - 1) - F(il, j)) /
                       (4.0 * g.hx);
                cnt = 1;
            }
            if (cnt) fy[k] = a21 * dfdx;
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const int k = i + g.nx * j;
            out[k] = (fx[uface_right(g, i) + nux * j] - fx[i + nux * j]) / g.hx +
                     (fy[i + g.nx * (j + 1)] - fy[i + g.nx * j]) / g.hy;
        }
}

/// CG solve of (J - dt eps div(A_diag grad)) x = rhs with zero-flux faces.
void diffuse_component(std::vector<double>& f, double eps,
                       const GeometryTensors& G, double dt,
                       const SoluteOptions& opt) {
    const Grid2& g = G.grid;
    const int nux = g.periodic_x ? g.nx : g.nx + 1;

    std::vector<double> rhs(f.size(), 0.0), off;
    offdiag_fluxes(f, G, off);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = i + g.nx * j;
            rhs[k] = g.active(i, j) ? G.J(i, j) * f[k] + dt * eps * off[k] : 0.0;
        }

    auto apply = [&](const dvec& x, dvec& ax) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const int k = i + g.nx * j;
                if (!g.active(i, j)) {
                    ax[k] = x[k];
                    continue;
                }
                double acc = G.J(i, j) * x[k];
                if (face_open_x(g, i, j)) {
                    const double a = G.A_uface[i + nux * j].a11;
                    acc += dt * eps * a * (x[k] - x[g.wrap_i(i - 1) + g.nx * j]) /
                           (g.hx * g.hx);
                }
                if (face_open_x(g, i + 1, j)) {
                    const double a = G.A_uface[uface_right(g, i) + nux * j].a11;
                    acc -= dt * eps * a * (x[g.wrap_i(i + 1) + g.nx * j] - x[k]) /
                           (g.hx * g.hx);
                }
                if (face_open_y(g, i, j)) {
                    const double a = G.A_vface[i + g.nx * j].a22;
                    acc += dt * eps * a * (x[k] - x[i + g.nx * (j - 1)]) /
                           (g.hy * g.hy);
                }
                if (face_open_y(g, i, j + 1)) {
                    const double a = G.A_vface[i + g.nx * (j + 1)].a22;
                    acc -= dt * eps * a * (x[i + g.nx * (j + 1)] - x[k]) /
                           (g.hy * g.hy);
                }
                ax[k] = acc;
            }
    };

    dvec x = f; // warm start from the pre-diffusion field
    dvec r(x.size()), p(x.size()), Ap(x.size());
    apply(x, Ap);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = rhs[i] - Ap[i];
    p = r;
    double rr = dot(r, r);
    const double stop = opt.cg_tol * std::sqrt(dot(rhs, rhs)) + 1e-300;
    int it = 0;
    while (std::sqrt(rr) > stop) {
        if (++it > opt.cg_max_iter)
            throw DiffusionSolveDiverged("implicit solute diffusion CG failed");
        apply(p, Ap);
        const double alpha = rr / dot(p, Ap);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    f = x;
}

} // namespace

ScalarField diffuse_neumann(const ScalarField& f, double eps,
                            const GeometryTensors& G, double dt,
                            const SoluteOptions& opt) {
    if (eps == 0.0) return f;
    ScalarField out = f;
    diffuse_component(out.v, eps, G, dt, opt);
    return out;
}

SymTensorField diffuse_neumann(const SymTensorField& f, double eps,
                               const GeometryTensors& G, double dt,
                               const SoluteOptions& opt) {
    if (eps == 0.0) return f;
    SymTensorField out = f;
    diffuse_component(out.t11, eps, G, dt, opt);
    diffuse_component(out.t12, eps, G, dt, opt);
    diffuse_component(out.t22, eps, G, dt, opt);
    return out;
}

SoluteState solute_step(const SoluteState& s, const VectorField& u,
                        const GeometryTensors& G, const GeometryTensors& G_prev,
                        double eps, double dt, const SoluteOptions& opt) {
    const Grid2& g = G.grid;

    SoluteState st(g);
    st.rho = advect(s.rho, u, G, 0.5 * dt, opt.rho_scheme);
    st.T = advect(s.T, u, G, 0.5 * dt, opt.stress_scheme);

    // exact rotation-relaxation with the physical velocity gradient
    WallBC wbc;
    wbc.u_bottom.assign(g.nx, 0.0);
    wbc.u_top.assign(g.nx, 0.0);
    const std::vector<Mat2> gradu = grad_vec(u, g, wbc);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const int k = g.cidx(i, j);
            const Mat2 grad_phys = gradu[k] * G.Finv[k];
            const Mat2 W = vorticity(grad_phys);
            st.T.set(i, j, reaction_exact(st.T.at(i, j), st.rho(i, j), W, dt));
        }

    st.rho = advect(st.rho, u, G, 0.5 * dt, opt.rho_scheme);
    st.T = advect(st.T, u, G, 0.5 * dt, opt.stress_scheme);

    // lagged geometric mass correction: J changed between the steps
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const double ratio = G_prev.J(i, j) / G.J(i, j);
            if (ratio != 1.0) {
                st.rho(i, j) *= ratio;
                st.T.set(i, j, st.T.at(i, j) * ratio);
            }
        }

    if (eps > 0.0) {
        st.rho = diffuse_neumann(st.rho, eps, G, dt, opt);
        st.T = diffuse_neumann(st.T, eps, G, dt, opt);
    }
    return st;
}

} // namespace corofsi
