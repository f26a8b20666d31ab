#include "corofsi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace corofsi {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Vec2 ReferenceGeometry::varphi(double y) const {
    if (kind == InstanceKind::PeriodicChannel) return {y, 1.0};
    return {std::cos(kTwoPi * y), std::sin(kTwoPi * y)};
}

Vec2 ReferenceGeometry::normal(double y) const {
    if (kind == InstanceKind::PeriodicChannel) return {0.0, 1.0};
    return {std::cos(kTwoPi * y), std::sin(kTwoPi * y)};
}

double ReferenceGeometry::varphi_speed(double y) const {
    (void)y;
    return kind == InstanceKind::PeriodicChannel ? 1.0 : kTwoPi;
}

Grid2 ReferenceGeometry::make_grid(int nx, int ny) const {
    if (kind == InstanceKind::PeriodicChannel) {
        return Grid2(nx, ny, 0.0, 0.0, 1.0, 1.0, true);
    }
    Grid2 g(nx, ny, -1.0, -1.0, 2.0, 2.0, false);
    g.set_disk_mask(0.0, 0.0, 1.0);
    return g;
}

void ReferenceGeometry::validate() const {
    if (L <= 0.0) throw ValidationError("tubular width L must be positive");
    if (kind == InstanceKind::PeriodicChannel && L >= 0.5)
        throw ValidationError("channel instance requires L < height/2 = 0.5");
    if (kind == InstanceKind::Disk && L >= 1.0)
        throw ValidationError("disk instance requires L < 1");
}

namespace {
// quintic smoothstep and its integral, the blend shape of the cutoff
double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep5_int(double t) {
    const double t4 = t * t * t * t;
    return t4 * (2.5 + t * (-3.0 + t));
}
} // namespace

double CutoffProfile::value(double s) const {
    if (s <= s_lo) return 0.0;
    if (s >= s_hi) return 1.0;
    const double t = (s - s_lo) / (s_hi - s_lo);
    const double b = blend;
    if (t < b) return b * smoothstep5_int(t / b) / (1.0 - b);
    if (t <= 1.0 - b) return (t - 0.5 * b) / (1.0 - b);
    return 1.0 - b * smoothstep5_int((1.0 - t) / b) / (1.0 - b);
}

double CutoffProfile::deriv(double s) const {
    if (s <= s_lo || s >= s_hi) return 0.0;
    const double t = (s - s_lo) / (s_hi - s_lo);
    const double b = blend;
    double shape = 1.0;
    if (t < b) shape = smoothstep5(t / b);
    else if (t > 1.0 - b) shape = smoothstep5((1.0 - t) / b);
    return shape / ((s_hi - s_lo) * (1.0 - b));
}

HanzawaMap::HanzawaMap(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
                       const StructureState& s)
    : geom_(geom), cutoff_(cutoff), eta_(s.eta), eta_dot_(s.eta_dot),
      max_eta_(s.max_abs_eta()) {
    geom_.validate();
    if (max_eta_ >= geom_.L) {
        throw DisplacementTooLarge("||eta||_inf >= L: Hanzawa map may lose injectivity");
    }
}

bool HanzawaMap::fiber_coords(const Vec2& x, double& y, double& s) const {
    if (geom_.kind == InstanceKind::PeriodicChannel) {
        y = x.x - std::floor(x.x);
        s = x.y - 1.0;
        return s > cutoff_.s_lo;
    }
    const double r = x.norm();
    s = r - 1.0;
    if (s <= cutoff_.s_lo) return false;
    y = std::atan2(x.y, x.x) / kTwoPi;
    if (y < 0.0) y += 1.0;
    return true;
}

Vec2 HanzawaMap::forward(const Vec2& x) const {
    double y, s;
    if (!fiber_coords(x, y, s)) return x;
    const double disp = eta_.value(y) * cutoff_.value(s);
    const Vec2 n = geom_.normal(y);
    return {x.x + n.x * disp, x.y + n.y * disp};
}

Mat2 HanzawaMap::grad(const Vec2& x) const {
    double y, s;
    if (!fiber_coords(x, y, s)) return Mat2::identity();
    const double eta = eta_.value(y);
    const double etap = eta_.deriv(y);
    const double phi = cutoff_.value(s);
    const double phip = cutoff_.deriv(s);
    if (geom_.kind == InstanceKind::PeriodicChannel) {
        return {1.0, 0.0, etap * phi, 1.0 + eta * phip};
    }
    const double r = x.norm();
    const double c = x.x / r, sn = x.y / r;
    // F = (1 + eta phi') n(x)n + (eta' phi / (2 pi r)) n(x)t + (1 + eta phi / r) t(x)t
    const double cn = 1.0 + eta * phip;
    const double cm = etap * phi / (kTwoPi * r);
    const double ct = 1.0 + eta * phi / r;
    const double tx = -sn, ty = c;
    return {cn * c * c + cm * c * tx + ct * tx * tx,
            cn * c * sn + cm * c * ty + ct * tx * ty,
            cn * sn * c + cm * sn * tx + ct * ty * tx,
            cn * sn * sn + cm * sn * ty + ct * ty * ty};
}

Vec2 HanzawaMap::dt_psi(const Vec2& x) const {
    double y, s;
    if (!fiber_coords(x, y, s)) return {0.0, 0.0};
    const double disp = eta_dot_.value(y) * cutoff_.value(s);
    const Vec2 n = geom_.normal(y);
    return {n.x * disp, n.y * disp};
}

Vec2 HanzawaMap::domain_velocity(const Vec2& x) const {
    const Vec2 dtp = dt_psi(x);
    if (dtp.x == 0.0 && dtp.y == 0.0) return {0.0, 0.0};
    const Mat2 Finv = grad(x).inverse();
    return {-(Finv.a11 * dtp.x + Finv.a12 * dtp.y),
            -(Finv.a21 * dtp.x + Finv.a22 * dtp.y)};
}

namespace {

/// Solves g(r) = r + eta * phi(r - 1) - target = 0, monotone in r, by
/// Newton iteration safeguarded by bisection on [lo, hi].
double solve_fiber(double eta, const CutoffProfile& cut, double target,
                   double lo, double hi) {
    auto g = [&](double r) { return r + eta * cut.value(r - 1.0) - target; };
    auto gp = [&](double r) { return 1.0 + eta * cut.deriv(r - 1.0); };
    double r = target; // good initial guess: displacement is O(eta)
    double glo = g(lo), ghi = g(hi);
    if (glo > 0.0 || ghi < 0.0) {
        // widen once; the displacement is bounded by |eta|
        lo -= std::abs(eta);
        hi += std::abs(eta);
        glo = g(lo);
        ghi = g(hi);
    }
    for (int it = 0; it < 100; ++it) {
        const double gr = g(r);
        if (std::abs(gr) < 1e-14) return r;
        if (gr > 0.0) hi = r; else lo = r;
        const double dp = gp(r);
        double rn = r - gr / dp;
        if (!(rn > lo && rn < hi)) rn = 0.5 * (lo + hi);
        if (std::abs(rn - r) < 1e-15 && std::abs(gr) < 1e-12) return rn;
        r = rn;
    }
    throw NoConvergence("fiber root solve did not converge in 100 iterations");
}

} // namespace

Vec2 HanzawaMap::inverse(const Vec2& z) const {
    // the preimage can sit up to ||eta||_inf above the image, so the
    // identity short-circuit must be conservative by that margin
    if (geom_.kind == InstanceKind::PeriodicChannel) {
        double y = z.x - std::floor(z.x);
        if (z.y - 1.0 + max_eta_ <= cutoff_.s_lo) return z;
        const double eta = eta_.value(y);
        const double x2 = solve_fiber(eta, cutoff_, z.y,
                                      z.y - geom_.L, z.y + geom_.L);
        return {z.x, std::min(x2, 1.0)};
    }
    const double rho = z.norm();
    if (rho - 1.0 + max_eta_ <= cutoff_.s_lo) return z;
    double y = std::atan2(z.y, z.x) / kTwoPi;
    if (y < 0.0) y += 1.0;
    const double eta = eta_.value(y);
    const double r = solve_fiber(eta, cutoff_, rho,
                                 std::max(rho - geom_.L, 0.0), rho + geom_.L);
    const double rc = std::min(r, 1.0);
    return {rc * z.x / rho, rc * z.y / rho};
}

Vec2 hanzawa_forward(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
                     const StructureState& eta, const Vec2& x) {
    return HanzawaMap(geom, cutoff, eta).forward(x);
}

Vec2 hanzawa_inverse(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
                     const StructureState& eta, const Vec2& z) {
    return HanzawaMap(geom, cutoff, eta).inverse(z);
}

GeometryTensors geometry_tensors(const ReferenceGeometry& geom,
                                 const CutoffProfile& cutoff,
                                 const StructureState& s, const Grid2& grid) {
    const HanzawaMap map(geom, cutoff, s);
    GeometryTensors gt;
    gt.grid = grid;
    gt.max_abs_eta = map.max_abs_eta();
    gt.J = ScalarField(grid, 1.0);
    gt.A.assign(static_cast<std::size_t>(grid.ncells()), Mat2::identity());
    gt.B.assign(static_cast<std::size_t>(grid.ncells()), Mat2::identity());
    gt.Finv.assign(static_cast<std::size_t>(grid.ncells()), Mat2::identity());
    gt.domain_vel.assign(static_cast<std::size_t>(grid.ncells()), Vec2{});

    auto eval = [&](const Vec2& x, double& J, Mat2& A, Mat2& B, Mat2& Finv,
                    Vec2& w) {
        const Mat2 F = map.grad(x);
        J = F.det();
        Finv = F.inverse();
        B = J * Finv;
        A = B * Finv.transpose();
        const Vec2 dtp = map.dt_psi(x);
        w = {-(Finv.a11 * dtp.x + Finv.a12 * dtp.y),
             -(Finv.a21 * dtp.x + Finv.a22 * dtp.y)};
    };

    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int k = grid.cidx(i, j);
            eval({grid.xc(i), grid.yc(j)}, gt.J.v[k], gt.A[k], gt.B[k],
                 gt.Finv[k], gt.domain_vel[k]);
        }

    const int nux = grid.periodic_x ? grid.nx : grid.nx + 1;
    gt.J_uface.assign(static_cast<std::size_t>(nux * grid.ny), 1.0);
    gt.B_uface.assign(static_cast<std::size_t>(nux * grid.ny), Mat2::identity());
    gt.A_uface.assign(static_cast<std::size_t>(nux * grid.ny), Mat2::identity());
    gt.w_uface.assign(static_cast<std::size_t>(nux * grid.ny), Vec2{});
    Mat2 Finv_scratch;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < nux; ++i) {
            const int k = i + nux * j;
            eval({grid.xu(i), grid.yc(j)}, gt.J_uface[k], gt.A_uface[k],
                 gt.B_uface[k], Finv_scratch, gt.w_uface[k]);
        }

    gt.J_vface.assign(static_cast<std::size_t>(grid.nx * (grid.ny + 1)), 1.0);
    gt.B_vface.assign(static_cast<std::size_t>(grid.nx * (grid.ny + 1)),
                      Mat2::identity());
    gt.A_vface.assign(static_cast<std::size_t>(grid.nx * (grid.ny + 1)),
                      Mat2::identity());
    gt.w_vface.assign(static_cast<std::size_t>(grid.nx * (grid.ny + 1)), Vec2{});
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int k = i + grid.nx * j;
            eval({grid.xc(i), grid.yv(j)}, gt.J_vface[k], gt.A_vface[k],
                 gt.B_vface[k], Finv_scratch, gt.w_vface[k]);
        }

    deformed_boundary_data(geom, s, gt.n_def, gt.bnd_measure);

    const int ns = s.size();
    gt.B_bnd.resize(ns);
    gt.Finv_bnd.resize(ns);
    gt.ref_speed = geom.varphi_speed(0.0);
    for (int k = 0; k < ns; ++k) {
        const double y = static_cast<double>(k) / ns;
        const Vec2 xb = geom.varphi(y);
        const Mat2 F = map.grad(xb);
        gt.Finv_bnd[k] = F.inverse();
        gt.B_bnd[k] = F.det() * gt.Finv_bnd[k];
    }
    return gt;
}

GeometryTensors identity_tensors(const Grid2& grid) {
    GeometryTensors gt;
    gt.grid = grid;
    gt.J = ScalarField(grid, 1.0);
    const auto ncells = static_cast<std::size_t>(grid.ncells());
    gt.A.assign(ncells, Mat2::identity());
    gt.B.assign(ncells, Mat2::identity());
    gt.Finv.assign(ncells, Mat2::identity());
    gt.domain_vel.assign(ncells, Vec2{});
    const int nux = grid.periodic_x ? grid.nx : grid.nx + 1;
    const auto nu = static_cast<std::size_t>(nux * grid.ny);
    const auto nv = static_cast<std::size_t>(grid.nx * (grid.ny + 1));
    gt.J_uface.assign(nu, 1.0);
    gt.B_uface.assign(nu, Mat2::identity());
    gt.A_uface.assign(nu, Mat2::identity());
    gt.w_uface.assign(nu, Vec2{});
    gt.J_vface.assign(nv, 1.0);
    gt.B_vface.assign(nv, Mat2::identity());
    gt.A_vface.assign(nv, Mat2::identity());
    gt.w_vface.assign(nv, Vec2{});
    return gt;
}

void deformed_boundary_data(const ReferenceGeometry& geom,
                            const StructureState& s,
                            std::vector<Vec2>& n_def,
                            std::vector<double>& bnd_measure) {
    geom.validate();
    if (s.max_abs_eta() >= geom.L) {
        throw DisplacementTooLarge("||eta||_inf >= L in deformed_boundary_data");
    }
    const FourierSeries1 eta(s.eta);
    const int n = s.size();
    n_def.resize(n);
    bnd_measure.resize(n);
    for (int k = 0; k < n; ++k) {
        const double y = static_cast<double>(k) / n;
        const double e = eta.value(y);
        const double ep = eta.deriv(y);
        Vec2 tangent;
        if (geom.kind == InstanceKind::PeriodicChannel) {
            tangent = {1.0, ep};
        } else {
            const double c = std::cos(kTwoPi * y), sn = std::sin(kTwoPi * y);
            // d/dy [ (1+eta) (c, sn) ] = eta' (c, sn) + (1+eta) 2 pi (-sn, c)
            tangent = {ep * c - (1.0 + e) * kTwoPi * sn,
                       ep * sn + (1.0 + e) * kTwoPi * c};
        }
        const double m = tangent.norm();
        bnd_measure[k] = m;
        // outward normal: rotate the tangent so that eta = 0 recovers n(y)
        if (geom.kind == InstanceKind::PeriodicChannel) {
            n_def[k] = {-tangent.y / m, tangent.x / m};
        } else {
            n_def[k] = {tangent.y / m, -tangent.x / m};
        }
    }
}

} // namespace corofsi
