#include "corofsi/coupled.hpp"

#include <cmath>
#include <numbers>

#include "corofsi/diagnostics.hpp"

namespace corofsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ReferenceGeometry make_geom(const SimConfig& cfg) {
    return ReferenceGeometry{cfg.instance(), cfg.L};
}

double periodic_dx(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

} // namespace

SimState make_initial_state(const SimConfig& cfg) {
    cfg.validate();
    const ReferenceGeometry geom = make_geom(cfg);
    const CutoffProfile cutoff = CutoffProfile::standard(cfg.L);
    const Grid2 grid = geom.make_grid(cfg.nx, cfg.ny);

    SimState st;
    st.structure = StructureState(cfg.ny_s);
    for (int k = 0; k < cfg.ny_s; ++k) {
        const double y = static_cast<double>(k) / cfg.ny_s;
        st.structure.eta[k] = cfg.eta0_amp * std::sin(kTwoPi * cfg.eta0_mode * y);
        st.structure.eta_dot[k] =
            cfg.etastar_amp * std::sin(kTwoPi * cfg.etastar_mode * y);
    }
    st.structure.project_mean_zero();

    st.G = geometry_tensors(geom, cutoff, st.structure, grid);
    st.G_prev = st.G;

    st.fluid = FluidState(grid);
    if (cfg.u0_kind == "lifted") {
        // smooth extension of eta* n into the channel, then projected
        const FourierSeries1 etastar(st.structure.eta_dot);
        for (int j = 0; j <= grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const double y = grid.yv(j);
                const double psi = y * y * (3.0 - 2.0 * y);
                st.fluid.u.V(i, j) = etastar.value(grid.xc(i)) * psi;
            }
        pressure_projection(st.fluid.u, st.G);
    }

    st.solute = SoluteState(grid);
    const bool channel = cfg.instance() == InstanceKind::PeriodicChannel;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.xc(i), y = grid.yc(j);
            const double dx =
                channel ? periodic_dx(x, cfg.rho0_bump_x) : x - cfg.rho0_bump_x;
            const double dy = y - cfg.rho0_bump_y;
            const double r2 = dx * dx + dy * dy;
            const double w2 = cfg.rho0_bump_width * cfg.rho0_bump_width;
            st.solute.rho(i, j) =
                cfg.rho0_base + cfg.rho0_bump_amp * std::exp(-0.5 * r2 / w2);

            double taper;
            if (channel) {
                taper = 16.0 * y * y * (1.0 - y) * (1.0 - y);
            } else {
                taper = std::exp(-2.0 * (x * x + y * y));
            }
            const double d =
                cfg.t0_dev_amp * std::cos(kTwoPi * cfg.t0_dev_mode * x) * taper;
            const double sshear =
                0.5 * cfg.t0_dev_amp * std::sin(kTwoPi * cfg.t0_dev_mode * x) * taper;
            st.solute.T.set(i, j,
                            {cfg.t0_base + d, sshear, cfg.t0_base - d});
        }
    return st;
}

StructureForcing traction(const FluidState& f, const SymTensorField& T,
                          const GeometryTensors& G) {
    const Grid2& g = G.grid;
    const int ns = static_cast<int>(G.n_def.size());
    StructureForcing out;
    out.F.assign(ns, 0.0);

    // x-derivative of the top-wall normal velocity trace (interface data)
    std::vector<double> dvdx_top(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        const int ip = (i + 1) % g.nx, im = (i - 1 + g.nx) % g.nx;
        dvdx_top[i] = (f.u.V(ip, g.ny) - f.u.V(im, g.ny)) / (2.0 * g.hx);
    }

    ScalarField T11v, T12v, T22v; // component views for the interpolator
    T11v.nx = T12v.nx = T22v.nx = g.nx;
    T11v.ny = T12v.ny = T22v.ny = g.ny;
    T11v.v = T.t11;
    T12v.v = T.t12;
    T22v.v = T.t22;

    const double h = g.hy;
    const double y1 = g.y0 + (g.ny - 0.5) * g.hy;
    const double y2 = g.y0 + (g.ny - 1.5) * g.hy;
    for (int k = 0; k < ns; ++k) {
        const double xb = static_cast<double>(k) / ns; // varphi(y) = (y, 1)

        // one-sided normal stencils at the flexible wall (tangential u = 0)
        const double u1 = interp_u(f.u, g, xb, y1);
        const double u2 = interp_u(f.u, g, xb, y2);
        const double dudy = (-3.0 * u1 + u2 / 3.0) / h;

        const double vw = interp_v(f.u, g, xb, g.y0 + g.ny * g.hy);
        const double v1 = interp_v(f.u, g, xb, g.y0 + (g.ny - 1) * g.hy);
        const double v2 = interp_v(f.u, g, xb, g.y0 + (g.ny - 2) * g.hy);
        const double dvdy = (3.0 * vw - 4.0 * v1 + v2) / (2.0 * h);

        // bilinear in x over the precomputed trace derivative
        double dvdx;
        {
            const double sx = (xb - g.x0) / g.hx - 0.5;
            const double sw = sx - std::floor(sx);
            int i0 = static_cast<int>(std::floor(sx)) % g.nx;
            if (i0 < 0) i0 += g.nx;
            const int i1 = (i0 + 1) % g.nx;
            dvdx = (1.0 - sw) * dvdx_top[i0] + sw * dvdx_top[i1];
        }

        // linear extrapolation of cell fields to the wall
        auto extrap = [&](const ScalarField& c) {
            return 1.5 * interp_cell(c, g, xb, y1) - 0.5 * interp_cell(c, g, xb, y2);
        };
        const double pw = extrap(f.p);
        const double t11 = extrap(T11v);
        const double t12 = extrap(T12v);
        const double t22 = extrap(T22v);

        // grad_z u = grad_ref u * Finv at the boundary node
        const Mat2 grad_ref{0.0, dudy, dvdx, dvdy};
        const Mat2 grad_z = grad_ref * G.Finv_bnd[k];
        const Mat2 S = grad_z + grad_z.transpose() +
                       Mat2{t11 - pw, t12, t12, t22 - pw};
        const Vec2 n{0.0, 1.0};
        const Vec2 Sn = S * n;
        const Vec2 tvec = G.B_bnd[k] * Sn;
        out.F[k] = -(tvec.dot(n)) * G.ref_speed;
    }
    return out;
}

void step(SimState& state, const SimConfig& cfg, double dt) {
    if (state.structure.max_abs_eta() >= 0.95 * cfg.L)
        throw WallContact("||eta||_inf reached 0.95 L");

    const ReferenceGeometry geom = make_geom(cfg);
    const CutoffProfile cutoff = CutoffProfile::standard(cfg.L);

    const bool coupled_fluid = cfg.instance() == InstanceKind::PeriodicChannel;
    StructureState s_new = state.structure;
    FluidState fluid_latest = state.fluid;

    if (coupled_fluid) {
        for (int it = 0; it < cfg.subiterations; ++it) {
            const StructureForcing F =
                traction(fluid_latest, state.solute.T, state.G);
            s_new = structure_step(state.structure, F, dt, cfg.gamma);

            InterfaceBC bc;
            bc.v_top.assign(cfg.nx, 0.0);
            const FourierSeries1 etadot(s_new.eta_dot);
            double mean = 0.0;
            for (int i = 0; i < cfg.nx; ++i) {
                bc.v_top[i] = etadot.value(state.G.grid.xc(i));
                mean += bc.v_top[i];
            }
            mean /= cfg.nx;
            for (double& v : bc.v_top) v -= mean; // exact discrete solvability

            fluid_latest =
                fluid_step(state.fluid, state.solute.T, state.G, state.G_prev, bc, dt);
        }
    }

    state.solute = solute_step(state.solute, fluid_latest.u, state.G,
                               state.G_prev, cfg.eps, dt);
    state.fluid = fluid_latest;
    state.structure = s_new;
    state.G_prev = state.G;
    state.G = geometry_tensors(geom, cutoff, state.structure, state.G.grid);
    state.time += dt;
}

namespace {

Snapshot capture(const SimState& st) {
    Snapshot s;
    s.time = st.time;
    s.u = st.fluid.u;
    s.p = st.fluid.p;
    s.rho = st.solute.rho;
    s.T = st.solute.T;
    s.structure = st.structure;
    return s;
}

double interface_residual(const SimState& st, const SimConfig& cfg) {
    if (cfg.instance() != InstanceKind::PeriodicChannel) return 0.0;
    const FourierSeries1 etadot(st.structure.eta_dot);
    double worst = 0.0;
    const Grid2& g = st.G.grid;
    for (int i = 0; i < g.nx; ++i) {
        worst = std::max(worst, std::abs(st.fluid.u.V(i, g.ny) -
                                         etadot.value(g.xc(i))));
    }
    return worst;
}

} // namespace

RunOutput run(const SimConfig& cfg) {
    RunOutput out;
    out.cfg = cfg;
    SimState st = make_initial_state(cfg);
    out.grid = st.G.grid;

    out.columns = {"time[nd]",
                   "fluid_kinetic[nd]",
                   "structure_kinetic[nd]",
                   "structure_bending[nd]",
                   "rho_l2sq[nd]",
                   "stress_l2sq[nd]",
                   "viscous_dissipation_cum[nd]",
                   "gamma_dissipation_cum[nd]",
                   "eps_dissipation_cum[nd]",
                   "rho_l1[nd]",
                   "rho_l2[nd]",
                   "rho_l4[nd]",
                   "stress_q2[nd]",
                   "stress_q4[nd]",
                   "interface_residual[nd]"};

    double cum_visc = 0.0, cum_gamma = 0.0, cum_eps = 0.0;
    const long nsteps = std::lround(cfg.T_final / cfg.dt);

    auto record = [&](const SimState& s) {
        const EnergyBreakdown e =
            energy(s.fluid, s.solute, s.structure, cfg.eps, cfg.gamma, s.G);
        const Grid2& g = s.G.grid;
        out.rows.push_back({s.time, e.fluid_kinetic, e.structure_kinetic,
                            e.structure_bending, e.rho_l2sq, e.stress_l2sq,
                            cum_visc, cum_gamma, cum_eps,
                            weighted_lp_norm(s.solute.rho, 1.0, s.G.J, g),
                            weighted_lp_norm(s.solute.rho, 2.0, s.G.J, g),
                            weighted_lp_norm(s.solute.rho, 4.0, s.G.J, g),
                            stress_schatten_q(s.solute.T, 2.0, s.G.J, g),
                            stress_schatten_q(s.solute.T, 4.0, s.G.J, g),
                            interface_residual(s, cfg)});
        out.snapshots.push_back(capture(s));
    };

    record(st);
    try {
        for (long n = 1; n <= nsteps; ++n) {
            step(st, cfg, cfg.dt);
            const EnergyBreakdown e =
                energy(st.fluid, st.solute, st.structure, cfg.eps, cfg.gamma, st.G);
            cum_visc += cfg.dt * e.viscous_rate;
            cum_gamma += cfg.dt * cfg.gamma * e.gamma_rate;
            cum_eps += cfg.dt * cfg.eps * e.eps_rate;
            if (n % cfg.output_cadence == 0 || n == nsteps) record(st);
        }
    } catch (const SimError& err) {
        out.truncated = true;
        out.error = err.what();
        record(st);
    }
    return out;
}

SweepOutput sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepOutput out;
    out.cfg = cfg;

    SimConfig zero_cfg = cfg.base;
    zero_cfg.eps = 0.0;
    out.zero_run = run(zero_cfg);

    for (double eps : cfg.eps_list) {
        SimConfig c = cfg.base;
        c.eps = eps;
        out.eps_values.push_back(eps);
        try {
            out.runs.push_back(run(c));
            if (out.runs.back().truncated) {
                out.run_errors.push_back(out.runs.back().error);
            } else {
                out.run_errors.push_back("");
            }
        } catch (const SimError& err) {
            out.runs.push_back(RunOutput{});
            out.run_errors.push_back(err.what());
        }
    }
    return out;
}

} // namespace corofsi
