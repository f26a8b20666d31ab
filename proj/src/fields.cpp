#include "corofsi/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corofsi {

Grid2::Grid2(int nx_, int ny_, double x0_, double y0_, double lx, double ly,
             bool periodic_x_)
    : nx(nx_), ny(ny_), x0(x0_), y0(y0_),
      hx(lx / nx_), hy(ly / ny_), periodic_x(periodic_x_) {}

int Grid2::wrap_i(int i) const {
    if (periodic_x) {
        i %= nx;
        if (i < 0) i += nx;
        return i;
    }
    return std::clamp(i, 0, nx - 1);
}

void Grid2::set_disk_mask(double cx, double cy, double r) {
    mask.assign(static_cast<std::size_t>(ncells()), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double dx = xc(i) - cx, dy = yc(j) - cy;
            if (dx * dx + dy * dy < r * r) mask[cidx(i, j)] = 1;
        }
}

double StructureState::max_abs_eta() const {
    double m = 0.0;
    for (double e : eta) m = std::max(m, std::abs(e));
    return m;
}

void StructureState::project_mean_zero() {
    if (eta.empty()) return;
    double me = 0.0, md = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        me += eta[i];
        md += eta_dot[i];
    }
    me /= static_cast<double>(eta.size());
    md /= static_cast<double>(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta[i] -= me;
        eta_dot[i] -= md;
    }
}

namespace {

double finish_lp(double acc, double p) { return std::pow(acc, 1.0 / p); }

} // namespace

double weighted_lp_norm(const ScalarField& f, double p, const ScalarField& J,
                        const Grid2& g) {
    if (p < 1.0) throw BadExponent("lp norm exponent must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.active(i, j)) m = std::max(m, std::abs(f(i, j)));
        return m;
    }
    double acc = 0.0;
    const double da = g.cell_area();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.active(i, j))
                acc += std::pow(std::abs(f(i, j)), p) * J(i, j) * da;
    return finish_lp(acc, p);
}

double weighted_lp_norm(const SymTensorField& f, double p, const ScalarField& J,
                        const Grid2& g) {
    if (p < 1.0) throw BadExponent("lp norm exponent must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.active(i, j)) m = std::max(m, f.at(i, j).frobenius());
        return m;
    }
    double acc = 0.0;
    const double da = g.cell_area();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.active(i, j))
                acc += std::pow(f.at(i, j).frobenius(), p) * J(i, j) * da;
    return finish_lp(acc, p);
}

VectorField grad(const ScalarField& f, const Grid2& g) {
    VectorField out(g);
    const int nux = out.nux();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            if (!g.periodic_x && (i == 0 || i == g.nx)) continue; // wall face
            const int il = g.wrap_i(i - 1);
            const int ir = g.wrap_i(i);
            out.U(i, j) = (f(ir, j) - f(il, j)) / g.hx;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.V(i, j) = (f(i, j) - f(i, j - 1)) / g.hy;
    return out;
}

ScalarField div(const VectorField& w, const Grid2& g) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.periodic_x ? (i + 1) % g.nx : i + 1;
            const double dudx = (w.U(ip, j) - w.U(i, j)) / g.hx;
            const double dvdy = (w.V(i, j + 1) - w.V(i, j)) / g.hy;
            out(i, j) = dudx + dvdy;
        }
    return out;
}

ScalarField laplace(const ScalarField& f, const Grid2& g) {
    return div(grad(f, g), g);
}

std::vector<Mat2> grad_vec(const VectorField& w, const Grid2& g,
                           const WallBC& bc) {
    std::vector<Mat2> out(static_cast<std::size_t>(g.ncells()));
    auto ubot = [&](int i) { return bc.u_bottom.empty() ? 0.0 : bc.u_bottom[i]; };
    auto utop = [&](int i) { return bc.u_top.empty() ? 0.0 : bc.u_top[i]; };

    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.periodic_x ? (i + 1) % g.nx : i + 1;
            // u at cell centers of this column and neighbours
            const double uc = 0.5 * (w.U(i, j) + w.U(ip, j));
            const double dudx = (w.U(ip, j) - w.U(i, j)) / g.hx;

            // Quadratic one-sided stencils at walls use the Dirichlet value
            // half a cell away: d/dy at y1 = h/2 through (0, wall), (h/2, uc),
            // (3h/2, ucp) gives (-4/3 wall + uc + ucp/3)/h.
            double dudy;
            if (j == 0) {
                const double uwall = ubot(i);
                const double ucp = 0.5 * (w.U(i, 1) + w.U(ip, 1));
                dudy = (-(4.0 / 3.0) * uwall + uc + ucp / 3.0) / g.hy;
            } else if (j == g.ny - 1) {
                const double uwall = utop(i);
                const double ucm = 0.5 * (w.U(i, j - 1) + w.U(ip, j - 1));
                dudy = ((4.0 / 3.0) * uwall - uc - ucm / 3.0) / g.hy;
            } else {
                const double ucp = 0.5 * (w.U(i, j + 1) + w.U(ip, j + 1));
                const double ucm = 0.5 * (w.U(i, j - 1) + w.U(ip, j - 1));
                dudy = (ucp - ucm) / (2.0 * g.hy);
            }

            const double dvdy = (w.V(i, j + 1) - w.V(i, j)) / g.hy;
            // v at cell center, x-derivative via neighbours (periodic wrap)
            const int il = g.wrap_i(i - 1);
            const int ir = g.wrap_i(i + 1);
            const double vcl = 0.5 * (w.V(il, j) + w.V(il, j + 1));
            const double vcr = 0.5 * (w.V(ir, j) + w.V(ir, j + 1));
            const double dvdx = (vcr - vcl) / (2.0 * g.hx);

            out[g.cidx(i, j)] = {dudx, dudy, dvdx, dvdy};
        }
    return out;
}

namespace {

// Locates x in a 1D uniform axis with first node at x0 + off*h, n nodes.
// Returns base index and fraction; periodic wrap when requested.
struct Loc {
    int i0, i1;
    double t;
};

Loc locate(double x, double x0, double h, double off, int n, bool periodic) {
    const double s = (x - x0) / h - off;
    if (periodic) {
        double sw = std::fmod(s, static_cast<double>(n));
        if (sw < 0) sw += n;
        const int i0 = static_cast<int>(std::floor(sw)) % n;
        return {i0, (i0 + 1) % n, sw - std::floor(sw)};
    }
    double sc = std::clamp(s, 0.0, static_cast<double>(n - 1));
    int i0 = std::min(static_cast<int>(std::floor(sc)), n - 2);
    i0 = std::max(i0, 0);
    return {i0, i0 + 1, sc - i0};
}

} // namespace

double interp_cell(const ScalarField& f, const Grid2& g, double x, double y) {
    const Loc lx = locate(x, g.x0, g.hx, 0.5, g.nx, g.periodic_x);
    const Loc ly = locate(y, g.y0, g.hy, 0.5, g.ny, false);
    const double f00 = f(lx.i0, ly.i0), f10 = f(lx.i1, ly.i0);
    const double f01 = f(lx.i0, ly.i1), f11 = f(lx.i1, ly.i1);
    return (1 - lx.t) * (1 - ly.t) * f00 + lx.t * (1 - ly.t) * f10 +
           (1 - lx.t) * ly.t * f01 + lx.t * ly.t * f11;
}

double interp_u(const VectorField& w, const Grid2& g, double x, double y) {
    const int nux = w.nux();
    const Loc lx = locate(x, g.x0, g.hx, 0.0, nux, g.periodic_x);
    const Loc ly = locate(y, g.y0, g.hy, 0.5, g.ny, false);
    const double f00 = w.U(lx.i0, ly.i0), f10 = w.U(lx.i1, ly.i0);
    const double f01 = w.U(lx.i0, ly.i1), f11 = w.U(lx.i1, ly.i1);
    return (1 - lx.t) * (1 - ly.t) * f00 + lx.t * (1 - ly.t) * f10 +
           (1 - lx.t) * ly.t * f01 + lx.t * ly.t * f11;
}

double interp_v(const VectorField& w, const Grid2& g, double x, double y) {
    const Loc lx = locate(x, g.x0, g.hx, 0.5, g.nx, g.periodic_x);
    const Loc ly = locate(y, g.y0, g.hy, 0.0, g.ny + 1, false);
    const double f00 = w.V(lx.i0, ly.i0), f10 = w.V(lx.i1, ly.i0);
    const double f01 = w.V(lx.i0, ly.i1), f11 = w.V(lx.i1, ly.i1);
    return (1 - lx.t) * (1 - ly.t) * f00 + lx.t * (1 - ly.t) * f10 +
           (1 - lx.t) * ly.t * f01 + lx.t * ly.t * f11;
}

std::vector<double> boundary_trace(const ScalarField& f, const Grid2& g, Side s) {
    std::vector<double> out;
    switch (s) {
        case Side::Bottom:
            out.resize(g.nx);
            for (int i = 0; i < g.nx; ++i) out[i] = f(i, 0);
            break;
        case Side::Top:
            out.resize(g.nx);
            for (int i = 0; i < g.nx; ++i) out[i] = f(i, g.ny - 1);
            break;
        case Side::Left:
            out.resize(g.ny);
            for (int j = 0; j < g.ny; ++j) out[j] = f(0, j);
            break;
        case Side::Right:
            out.resize(g.ny);
            for (int j = 0; j < g.ny; ++j) out[j] = f(g.nx - 1, j);
            break;
    }
    return out;
}

} // namespace corofsi
