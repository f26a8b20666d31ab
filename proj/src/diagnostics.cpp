#include "corofsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "corofsi/structure.hpp"

namespace corofsi {

namespace {

/// Cell-centered velocity components from the MAC field.
void cell_velocity(const VectorField& u, const Grid2& g, int i, int j,
                   double& uc, double& vc) {
    const int ip = g.periodic_x ? (i + 1) % g.nx : i + 1;
    uc = 0.5 * (u.U(i, j) + u.U(ip, j));
    vc = 0.5 * (u.V(i, j) + u.V(i, j + 1));
}

/// Gradient vector of a cell scalar at a cell: centered, one-sided at walls.
Vec2 cell_grad(const ScalarField& f, const Grid2& g, int i, int j) {
    const int ip = g.wrap_i(i + 1), im = g.wrap_i(i - 1);
    const double dfdx = (f(ip, j) - f(im, j)) / (2.0 * g.hx);
    double dfdy;
    if (j == 0)
        dfdy = (f(i, 1) - f(i, 0)) / g.hy;
    else if (j == g.ny - 1)
        dfdy = (f(i, j) - f(i, j - 1)) / g.hy;
    else
        dfdy = (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.hy);
    return {dfdx, dfdy};
}

double quad_form(const Mat2& A, const Vec2& v) {
    return A.a11 * v.x * v.x + (A.a12 + A.a21) * v.x * v.y + A.a22 * v.y * v.y;
}

} // namespace

EnergyBreakdown energy(const FluidState& f, const SoluteState& s,
                       const StructureState& st, double eps, double gamma,
                       const GeometryTensors& G) {
    (void)gamma;
    EnergyBreakdown e;
    const Grid2& g = G.grid;
    const double da = g.cell_area();

    WallBC wbc;
    wbc.u_bottom.assign(g.nx, 0.0);
    wbc.u_top.assign(g.nx, 0.0);
    const std::vector<Mat2> gradu = grad_vec(f.u, g, wbc);

    ScalarField t11v, t12v, t22v;
    t11v.nx = t12v.nx = t22v.nx = g.nx;
    t11v.ny = t12v.ny = t22v.ny = g.ny;
    t11v.v = s.T.t11;
    t12v.v = s.T.t12;
    t22v.v = s.T.t22;

    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const int k = g.cidx(i, j);
            const double J = G.J(i, j);
            double uc, vc;
            cell_velocity(f.u, g, i, j, uc, vc);
            e.fluid_kinetic += 0.5 * (uc * uc + vc * vc) * J * da;
            const double r = s.rho(i, j);
            e.rho_l2sq += r * r * J * da;
            const SymMat2 T = s.T.at(i, j);
            e.stress_l2sq += T.frobenius() * T.frobenius() * J * da;

            // J |grad_z u|^2 = sum_ij (grad u A)_ij (grad u)_ij
            const Mat2 GA = gradu[k] * G.A[k];
            e.viscous_rate += (GA.a11 * gradu[k].a11 + GA.a12 * gradu[k].a12 +
                               GA.a21 * gradu[k].a21 + GA.a22 * gradu[k].a22) *
                              da;

            if (eps > 0.0) {
                const Vec2 gr = cell_grad(s.rho, g, i, j);
                double acc = quad_form(G.A[k], gr);
                const Vec2 g11 = cell_grad(t11v, g, i, j);
                const Vec2 g12 = cell_grad(t12v, g, i, j);
                const Vec2 g22 = cell_grad(t22v, g, i, j);
                acc += quad_form(G.A[k], g11) + 2.0 * quad_form(G.A[k], g12) +
                       quad_form(G.A[k], g22);
                e.eps_rate += acc * da;
            }
        }

    const StructureEnergy se = structure_energy(st);
    e.structure_kinetic = se.kinetic;
    e.structure_bending = se.bending;
    e.gamma_rate = periodic_deriv_norm_sq(st.eta_dot, 1);
    return e;
}

RelEnergyPoint pullback_compare(const Snapshot& snap_eps,
                                const Snapshot& snap_zero, const SimConfig& cfg) {
    if (snap_eps.rho.nx != snap_zero.rho.nx || snap_eps.rho.ny != snap_zero.rho.ny)
        throw GridMismatch("snapshots live on different grids");
    if (snap_eps.structure.size() != snap_zero.structure.size())
        throw GridMismatch("snapshots have different structure grids");

    const ReferenceGeometry geom{cfg.instance(), cfg.L};
    const CutoffProfile cutoff = CutoffProfile::standard(cfg.L);
    const Grid2 grid = geom.make_grid(cfg.nx, cfg.ny);

    StructureState diff(snap_eps.structure.size());
    for (int k = 0; k < diff.size(); ++k) {
        diff.eta[k] = snap_eps.structure.eta[k] - snap_zero.structure.eta[k];
        diff.eta_dot[k] =
            snap_eps.structure.eta_dot[k] - snap_zero.structure.eta_dot[k];
    }

    const HanzawaMap map_eta(geom, cutoff, snap_eps.structure);
    const HanzawaMap map_zeta(geom, cutoff, snap_zero.structure);
    const HanzawaMap map_diff(geom, cutoff, diff);

    ScalarField t11e, t12e, t22e;
    t11e.nx = t12e.nx = t22e.nx = grid.nx;
    t11e.ny = t12e.ny = t22e.ny = grid.ny;
    t11e.v = snap_eps.T.t11;
    t12e.v = snap_eps.T.t12;
    t22e.v = snap_eps.T.t22;

    RelEnergyPoint pt;
    pt.time = snap_zero.time;

    ScalarField du(grid), dv(grid), Jz(grid, 1.0);
    std::vector<Mat2> Finv_z(static_cast<std::size_t>(grid.ncells()));

    const double da = grid.cell_area();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (!grid.active(i, j)) continue;
            const Vec2 xhat{grid.xc(i), grid.yc(j)};
            const Mat2 Fz = map_zeta.grad(xhat);
            const double J = Fz.det();
            Jz(i, j) = J;
            Finv_z[grid.cidx(i, j)] = Fz.inverse();

            // exact map composition: ubar(x) = u(Psi_{eta-zeta}(Psi_zeta(x)))
            const Vec2 z = map_zeta.forward(xhat);
            const Vec2 w = map_diff.forward(z);
            const Vec2 xp = map_eta.inverse(w);

            const double ue = interp_u(snap_eps.u, grid, xp.x, xp.y);
            const double ve = interp_v(snap_eps.u, grid, xp.x, xp.y);
            double uz, vz;
            cell_velocity(snap_zero.u, grid, i, j, uz, vz);
            du(i, j) = ue - uz;
            dv(i, j) = ve - vz;
            pt.velocity += (du(i, j) * du(i, j) + dv(i, j) * dv(i, j)) * J * da;

            const double re = interp_cell(snap_eps.rho, grid, xp.x, xp.y);
            const double dr = re - snap_zero.rho(i, j);
            pt.rho += dr * dr * J * da;

            const SymMat2 Te{interp_cell(t11e, grid, xp.x, xp.y),
                             interp_cell(t12e, grid, xp.x, xp.y),
                             interp_cell(t22e, grid, xp.x, xp.y)};
            const SymMat2 dT = Te - snap_zero.T.at(i, j);
            pt.stress += dT.frobenius() * dT.frobenius() * J * da;
        }

    // || grad_z (ubar - v) ||^2 over the zeta domain
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (!grid.active(i, j)) continue;
            const Vec2 g1 = cell_grad(du, grid, i, j);
            const Vec2 g2 = cell_grad(dv, grid, i, j);
            const Mat2 gref{g1.x, g1.y, g2.x, g2.y};
            const Mat2 gz = gref * Finv_z[grid.cidx(i, j)];
            pt.grad_velocity += gz.frobenius() * gz.frobenius() * Jz(i, j) * da;
        }

    pt.structure_vel = periodic_deriv_norm_sq(diff.eta_dot, 0);
    pt.structure_bend = periodic_deriv_norm_sq(diff.eta, 2);
    pt.gamma_rate = periodic_deriv_norm_sq(diff.eta_dot, 1);
    return pt;
}

RelEnergySeries relative_energy(const RunOutput& run_eps,
                                const RunOutput& run_zero, double gamma) {
    if (!run_eps.grid.same_layout(run_zero.grid))
        throw GridMismatch("runs use different grids");
    if (run_eps.snapshots.size() != run_zero.snapshots.size())
        throw GridMismatch("runs have different snapshot cadences");

    RelEnergySeries series;
    for (std::size_t k = 0; k < run_eps.snapshots.size(); ++k) {
        if (std::abs(run_eps.snapshots[k].time - run_zero.snapshots[k].time) >
            1e-12)
            throw GridMismatch("snapshot times do not match");
        series.pts.push_back(pullback_compare(run_eps.snapshots[k],
                                              run_zero.snapshots[k],
                                              run_zero.cfg));
    }

    for (std::size_t k = 0; k < series.pts.size(); ++k) {
        series.sup_sum = std::max(series.sup_sum, series.pts[k].sup_part());
        if (k > 0) {
            const double dt = series.pts[k].time - series.pts[k - 1].time;
            series.cum_stress +=
                0.5 * dt * (series.pts[k].stress + series.pts[k - 1].stress);
            series.cum_grad_velocity +=
                0.5 * dt *
                (series.pts[k].grad_velocity + series.pts[k - 1].grad_velocity);
            series.cum_gamma +=
                0.5 * dt * gamma *
                (series.pts[k].gamma_rate + series.pts[k - 1].gamma_rate);
        }
    }
    series.D = series.sup_sum + series.cum_stress + series.cum_grad_velocity +
               series.cum_gamma;
    return series;
}

void fit_rate(const std::vector<double>& eps_list,
              const std::vector<double>& D_list, double& slope, double& r2) {
    if (eps_list.size() != D_list.size() || eps_list.size() < 3)
        throw DegenerateFit("rate fit needs at least 3 (eps, D) pairs");
    for (double d : D_list)
        if (d <= 0.0) throw DegenerateFit("rate fit requires positive D values");
    for (double e : eps_list)
        if (e <= 0.0) throw DegenerateFit("rate fit requires positive eps values");

    const std::size_t n = eps_list.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(eps_list[i]);
        const double y = std::log(D_list[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    slope = (n * sxy - sx * sy) / denom;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = ss_tot - slope * (sxy - sx * sy / n);
    r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
}

double stress_schatten_q(const SymTensorField& T, double q, const ScalarField& J,
                         const Grid2& g) {
    double acc = 0.0;
    const double da = g.cell_area();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const SymMat2 t = T.at(i, j);
            const double mean = 0.5 * t.trace();
            const double r = std::sqrt(0.25 * (t.t11 - t.t22) * (t.t11 - t.t22) +
                                       t.t12 * t.t12);
            const double l1 = std::max(mean + r, 0.0);
            const double l2 = std::max(mean - r, 0.0);
            acc += (std::pow(l1, q) + std::pow(l2, q)) * J(i, j) * da;
        }
    return acc;
}

LpReport lp_report(const RunOutput& out, const std::vector<double>& p_list,
                   const std::vector<double>& q_list) {
    LpReport rep;
    rep.columns.push_back("time[nd]");
    for (double p : p_list)
        rep.columns.push_back("rho_L" + std::to_string(static_cast<int>(p)) +
                              "_drift[rel]");
    for (double q : q_list)
        rep.columns.push_back("stress_q" + std::to_string(static_cast<int>(q)) +
                              "_residual[rel]");

    const Grid2& g = out.grid;
    const ReferenceGeometry geom{out.cfg.instance(), out.cfg.L};
    const CutoffProfile cutoff = CutoffProfile::standard(out.cfg.L);

    std::vector<double> rho0_norms, q_rhs, cumql(q_list.size(), 0.0),
        prevq(q_list.size(), 0.0);
    double prev_time = 0.0;

    for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
        const Snapshot& s = out.snapshots[k];
        const GeometryTensors G = geometry_tensors(geom, cutoff, s.structure, g);
        std::vector<double> row{s.time};

        if (k == 0) {
            for (double p : p_list)
                rho0_norms.push_back(weighted_lp_norm(s.rho, p, G.J, g));
        }
        for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
            const double now = weighted_lp_norm(s.rho, p_list[ip], G.J, g);
            row.push_back(std::abs(now - rho0_norms[ip]) /
                          std::max(rho0_norms[ip], 1e-300));
        }

        std::vector<double> qnow(q_list.size());
        for (std::size_t iq = 0; iq < q_list.size(); ++iq)
            qnow[iq] = stress_schatten_q(s.T, q_list[iq], G.J, g);
        if (k == 0) {
            for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
                const double rho0q =
                    std::pow(weighted_lp_norm(s.rho, q_list[iq], G.J, g),
                             q_list[iq]);
                q_rhs.push_back(2.0 * out.cfg.T_final * rho0q + qnow[iq]);
            }
        } else {
            const double dt = s.time - prev_time;
            for (std::size_t iq = 0; iq < q_list.size(); ++iq)
                cumql[iq] += 0.5 * dt * (qnow[iq] + prevq[iq]);
        }
        for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
            const double lhs = qnow[iq] + 2.0 * cumql[iq];
            row.push_back(std::max(0.0, lhs - q_rhs[iq]) / q_rhs[iq]);
        }
        prevq = qnow;
        prev_time = s.time;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace corofsi
