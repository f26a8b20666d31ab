#include "corofsi/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace corofsi {

namespace {

using dvec = std::vector<double>;

double dot(const dvec& a, const dvec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Plain conjugate gradients; returns false if tolerance not reached.
bool cg(const std::function<void(const dvec&, dvec&)>& apply, const dvec& b,
        dvec& x, double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    dvec r(n), p(n), Ap(n);
    apply(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    p = r;
    double rr = dot(r, r);
    const double b2 = std::sqrt(dot(b, b));
    if (b2 == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return true;
    }
    const double stop = rel_tol * b2;
    if (std::sqrt(rr) <= stop) return true;
    for (int it = 0; it < max_iter; ++it) {
        apply(p, Ap);
        const double alpha = rr / dot(p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= stop) return true;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return false;
}

void subtract_mean(dvec& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

// v averaged to the u-face at (i, j); u averaged to the v-face at (i, j).
double v_at_uface(const VectorField& w, const Grid2& g, int i, int j) {
    const int il = g.wrap_i(i - 1);
    return 0.25 * (w.V(il, j) + w.V(il, j + 1) + w.V(i, j) + w.V(i, j + 1));
}

double u_at_vface(const VectorField& w, const Grid2& g, int i, int j) {
    const int ip = g.periodic_x ? (i + 1) % g.nx : i + 1;
    return 0.25 * (w.U(i, j - 1) + w.U(ip, j - 1) + w.U(i, j) + w.U(ip, j));
}

} // namespace

ScalarField transformed_divergence(const VectorField& u, const GeometryTensors& G) {
    const Grid2& g = G.grid;
    VectorField m(g);
    const int nux = m.nux();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            const Mat2& B = G.B_uface[i + nux * j];
            m.U(i, j) = B.a11 * u.U(i, j) + B.a12 * v_at_uface(u, g, i, j);
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Mat2& B = G.B_vface[i + g.nx * j];
            const double ubar = (j == 0 || j == g.ny) ? 0.0 : u_at_vface(u, g, i, j);
            m.V(i, j) = B.a21 * ubar + B.a22 * u.V(i, j);
        }
    return div(m, g);
}

namespace {

/// Applies the correction transpose: given cell potential phi, produces the
/// face field C^T phi, where C(u) = div(B u). Wall v-faces stay untouched.
void apply_ct(const ScalarField& phi, const GeometryTensors& G, VectorField& out) {
    const Grid2& g = G.grid;
    const int nux = out.nux();
    std::fill(out.u.begin(), out.u.end(), 0.0);
    std::fill(out.v.begin(), out.v.end(), 0.0);

    // gx, gy: transpose of the MAC divergence = negative MAC gradient
    // gx on u-faces, gy on interior v-faces
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            const int ir = g.wrap_i(i);
            const int il = g.wrap_i(i - 1);
            const double gx = (phi(ir, j) - phi(il, j)) / g.hx;
            const Mat2& B = G.B_uface[i + nux * j];
            // direct part: mx at this face feeds u here
            out.U(i, j) += B.a11 * gx;
            // averaged part: mx fed by 4 v-faces with weight B12/4
            const double c = 0.25 * B.a12 * gx;
            out.V(il, j) += c;
            out.V(il, j + 1) += c;
            out.V(ir, j) += c;
            out.V(ir, j + 1) += c;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double gy = (phi(i, j) - phi(i, j - 1)) / g.hy;
            const Mat2& B = G.B_vface[i + g.nx * j];
            out.V(i, j) += B.a22 * gy;
            const double c = 0.25 * B.a21 * gy;
            const int ip = g.periodic_x ? (i + 1) % g.nx : i + 1;
            out.U(i, j - 1) += c;
            out.U(ip, j - 1) += c;
            out.U(i, j) += c;
            out.U(ip, j) += c;
        }
    // wall v-faces are Dirichlet: no correction
    for (int i = 0; i < g.nx; ++i) {
        out.V(i, 0) = 0.0;
        out.V(i, g.ny) = 0.0;
    }
}

} // namespace

ScalarField pressure_projection(VectorField& u, const GeometryTensors& G,
                                double rel_tol, int max_iter,
                                const ScalarField* warm_start) {
    const Grid2& g = G.grid;
    ScalarField rhs_f = transformed_divergence(u, G);
    dvec rhs = rhs_f.v;
    subtract_mean(rhs);

    VectorField scratch(g);
    auto apply = [&](const dvec& x, dvec& ax) {
        ScalarField phi(g);
        phi.v = x;
        apply_ct(phi, G, scratch);
        ScalarField d = transformed_divergence(scratch, G);
        ax = d.v;
        subtract_mean(ax);
    };

    dvec phi(static_cast<std::size_t>(g.ncells()), 0.0);
    if (warm_start && warm_start->v.size() == phi.size()) phi = warm_start->v;
    subtract_mean(phi);
    if (!cg(apply, rhs, phi, rel_tol, max_iter)) {
        throw ProjectionDiverged("pressure projection CG did not reach tolerance");
    }
    subtract_mean(phi);

    ScalarField phif(g);
    phif.v = phi;
    apply_ct(phif, G, scratch);
    const int nux = u.nux();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) u.U(i, j) -= scratch.U(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.V(i, j) -= scratch.V(i, j);
    return phif;
}

namespace {

/// Implicit Helmholtz solve (I - dt Lap) x = rhs for the u component with
/// homogeneous tangential Dirichlet walls via ghost elimination.
void solve_helmholtz_u(dvec& x, const dvec& rhs, const Grid2& g, double dt,
                       double rel_tol, int max_iter) {
    const int nux = g.periodic_x ? g.nx : g.nx + 1;
    auto apply = [&](const dvec& in, dvec& out) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < nux; ++i) {
                const int k = i + nux * j;
                const int ipl = g.wrap_i(i + 1) + nux * j;
                const int imn = g.wrap_i(i - 1) + nux * j;
                double lap = (in[ipl] - 2.0 * in[k] + in[imn]) / (g.hx * g.hx);
                double up, dn;
                if (j == g.ny - 1) up = -in[k]; // ghost: 2*0 - u
                else up = in[k + nux];
                if (j == 0) dn = -in[k];
                else dn = in[k - nux];
                lap += (up - 2.0 * in[k] + dn) / (g.hy * g.hy);
                out[k] = in[k] - dt * lap;
            }
    };
    if (!cg(apply, rhs, x, rel_tol, max_iter))
        throw DiffusionSolveDiverged("implicit viscous solve (u) failed");
}

/// Same for the v component; wall faces are Dirichlet with values in bc0/bc1
/// already lifted into rhs. Unknowns are the interior v-faces j=1..ny-1.
void solve_helmholtz_v(dvec& x, const dvec& rhs, const Grid2& g, double dt,
                       double rel_tol, int max_iter) {
    const int rows = g.ny - 1;
    auto apply = [&](const dvec& in, dvec& out) {
        for (int r = 0; r < rows; ++r)
            for (int i = 0; i < g.nx; ++i) {
                const int k = i + g.nx * r;
                const int ipl = g.wrap_i(i + 1) + g.nx * r;
                const int imn = g.wrap_i(i - 1) + g.nx * r;
                double lap = (in[ipl] - 2.0 * in[k] + in[imn]) / (g.hx * g.hx);
                const double up = (r == rows - 1) ? 0.0 : in[k + g.nx];
                const double dn = (r == 0) ? 0.0 : in[k - g.nx];
                lap += (up - 2.0 * in[k] + dn) / (g.hy * g.hy);
                out[k] = in[k] - dt * lap;
            }
    };
    if (!cg(apply, rhs, x, rel_tol, max_iter))
        throw DiffusionSolveDiverged("implicit viscous solve (v) failed");
}

} // namespace

FluidState fluid_step(const FluidState& f, const SymTensorField& T_stress,
                      const GeometryTensors& G, const GeometryTensors& G_prev,
                      const InterfaceBC& bc, double dt, const VectorField* body) {
    const Grid2& g = G.grid;
    const int nux = f.u.nux();

    // CFL guard on the explicit convection
    double cfl = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i)
            cfl = std::max(cfl, std::abs(f.u.U(i, j)) * dt / g.hx);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            cfl = std::max(cfl, std::abs(f.u.V(i, j)) * dt / g.hy);
    if (cfl > 0.9) throw CFLViolation("fluid convection CFL exceeded 0.9");

    // cell-centered velocity gradient with the current wall traces
    WallBC wbc;
    wbc.u_bottom.assign(g.nx, 0.0);
    wbc.u_top.assign(g.nx, 0.0);
    const std::vector<Mat2> gradu = grad_vec(f.u, g, wbc);

    // incremental pressure-correction: the explicit half carries the
    // current pressure gradient; the projection then solves for the
    // increment only, so the steady state satisfies the unsplit discrete
    // momentum equation (no O(dt) wall layer)
    VectorField gp(g);
    apply_ct(f.p, G, gp);

    // G_mat = (I - A) grad(u) - (I - B)(p I - T), on cells
    std::vector<Mat2> Gm(static_cast<std::size_t>(g.ncells()));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.cidx(i, j);
            const Mat2 IA = Mat2::identity() - G.A[k];
            const Mat2 IB = Mat2::identity() - G.B[k];
            const Mat2 pT = Mat2{f.p(i, j), 0.0, 0.0, f.p(i, j)} -
                            T_stress.at(i, j).full();
            Gm[k] = IA * gradu[k] - IB * pT;
        }

    // helpers: y-derivative of a cell column quantity at a u-face row,
    // second-order one-sided at the walls
    auto dyd = [&](auto&& val, int i, int j) {
        if (j == 0)
            return (-3.0 * val(i, 0) + 4.0 * val(i, 1) - val(i, 2)) / (2.0 * g.hy);
        if (j == g.ny - 1)
            return (3.0 * val(i, j) - 4.0 * val(i, j - 1) + val(i, j - 2)) /
                   (2.0 * g.hy);
        return (val(i, j + 1) - val(i, j - 1)) / (2.0 * g.hy);
    };

    // --- explicit right-hand sides ------------------------------------
    dvec rhs_u(static_cast<std::size_t>(nux * g.ny), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            const int k = i + nux * j;
            const int ir = g.wrap_i(i);
            const int il = g.wrap_i(i - 1);

            // B-corrected convection velocity: B u + J w at the face
            const Mat2& B = G.B_uface[k];
            const double J = G.J_uface[k];
            const Vec2& w = G.w_uface[k];
            const double uval = f.u.U(i, j);
            const double vval = v_at_uface(f.u, g, i, j);
            const double cx = B.a11 * uval + B.a12 * vval + J * w.x;
            const double cy = B.a21 * uval + B.a22 * vval + J * w.y;

            const double dudx =
                (f.u.U(g.wrap_i(i + 1), j) - f.u.U(g.wrap_i(i - 1), j)) /
                (2.0 * g.hx);
            double up, dn;
            up = (j == g.ny - 1) ? -uval : f.u.U(i, j + 1);
            dn = (j == 0) ? -uval : f.u.U(i, j - 1);
            const double dudy = (up - dn) / (2.0 * g.hy);
            double acc = -(cx * dudx + cy * dudy);

            // lagged (1 - J) du/dt
            if (f.has_prev) {
                acc += (1.0 - J) * (f.u.U(i, j) - f.u_prev.U(i, j)) / dt;
            }

            // div T, x-component: dx T11 + dy T12
            acc += (T_stress.t11[g.cidx(ir, j)] - T_stress.t11[g.cidx(il, j)]) / g.hx;
            auto t12u = [&](int ii, int jj) {
                (void)ii;
                return 0.5 * (T_stress.t12[g.cidx(il, jj)] +
                              T_stress.t12[g.cidx(ir, jj)]);
            };
            acc += dyd(t12u, i, j);

            // -div G_mat, x-component
            acc -= (Gm[g.cidx(ir, j)].a11 - Gm[g.cidx(il, j)].a11) / g.hx;
            auto g12u = [&](int ii, int jj) {
                (void)ii;
                return 0.5 * (Gm[g.cidx(il, jj)].a12 + Gm[g.cidx(ir, jj)].a12);
            };
            acc -= dyd(g12u, i, j);

            if (body) acc += body->U(i, j);
            acc -= gp.U(i, j);
            rhs_u[k] = f.u.U(i, j) + dt * acc;
        }

    dvec rhs_v(static_cast<std::size_t>(g.nx * (g.ny - 1)), 0.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int kf = i + g.nx * j;
            const int kr = i + g.nx * (j - 1);

            const Mat2& B = G.B_vface[kf];
            const double J = G.J_vface[kf];
            const Vec2& w = G.w_vface[kf];
            const double vval = f.u.V(i, j);
            const double uval = u_at_vface(f.u, g, i, j);
            const double cx = B.a11 * uval + B.a12 * vval + J * w.x;
            const double cy = B.a21 * uval + B.a22 * vval + J * w.y;

            const double dvdx =
                (f.u.V(g.wrap_i(i + 1), j) - f.u.V(g.wrap_i(i - 1), j)) /
                (2.0 * g.hx);
            const double dvdy = (f.u.V(i, j + 1) - f.u.V(i, j - 1)) / (2.0 * g.hy);
            double acc = -(cx * dvdx + cy * dvdy);

            if (f.has_prev) {
                acc += (1.0 - J) * (f.u.V(i, j) - f.u_prev.V(i, j)) / dt;
            }

            // div T, y-component: dx T12 + dy T22  (natural at v-faces)
            auto t12v = [&](int ii) {
                return 0.5 * (T_stress.t12[g.cidx(ii, j - 1)] +
                              T_stress.t12[g.cidx(ii, j)]);
            };
            acc += (t12v(g.wrap_i(i + 1)) - t12v(g.wrap_i(i - 1))) / (2.0 * g.hx);
            acc += (T_stress.t22[g.cidx(i, j)] - T_stress.t22[g.cidx(i, j - 1)]) / g.hy;

            auto g21v = [&](int ii) {
                return 0.5 * (Gm[g.cidx(ii, j - 1)].a21 + Gm[g.cidx(ii, j)].a21);
            };
            acc -= (g21v(g.wrap_i(i + 1)) - g21v(g.wrap_i(i - 1))) / (2.0 * g.hx);
            acc -= (Gm[g.cidx(i, j)].a22 - Gm[g.cidx(i, j - 1)].a22) / g.hy;

            if (body) acc += body->V(i, j);
            acc -= gp.V(i, j);
            rhs_v[i + g.nx * (j - 1)] = f.u.V(i, j) + dt * acc;
            (void)kr;
        }

    // Dirichlet lift for the top boundary value in the implicit solve
    for (int i = 0; i < g.nx; ++i) {
        const double vtop = bc.v_top.empty() ? 0.0 : bc.v_top[i];
        rhs_v[i + g.nx * (g.ny - 2)] += dt * vtop / (g.hy * g.hy);
    }

    // --- implicit viscous solves ---------------------------------------
    FluidState out(g);
    dvec xu = f.u.u; // warm start from the previous velocity
    solve_helmholtz_u(xu, rhs_u, g, dt, 1e-12, 10000);
    out.u.u = xu;

    dvec xv(static_cast<std::size_t>(g.nx * (g.ny - 1)), 0.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) xv[i + g.nx * (j - 1)] = f.u.V(i, j);
    solve_helmholtz_v(xv, rhs_v, g, dt, 1e-12, 10000);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.u.V(i, j) = xv[i + g.nx * (j - 1)];
    for (int i = 0; i < g.nx; ++i) {
        out.u.V(i, 0) = 0.0;
        out.u.V(i, g.ny) = bc.v_top.empty() ? 0.0 : bc.v_top[i];
    }

    // --- projection (increment) -------------------------------------
    const ScalarField dphi = pressure_projection(out.u, G, 1e-10, 20000);
    for (int k = 0; k < g.ncells(); ++k) out.p.v[k] = f.p.v[k] + dphi.v[k] / dt;

    out.u_prev = f.u;
    out.has_prev = true;
    (void)G_prev;
    return out;
}

} // namespace corofsi
