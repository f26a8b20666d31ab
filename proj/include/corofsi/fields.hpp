/// @file fields.hpp
/// @brief Staggered-grid layouts, field containers, interpolation,
///        differential stencils and weighted norms on the reference domain.
///
/// Staggering follows the MAC convention: u lives on x-faces, v on y-faces,
/// scalars and tensors at cell centers. The x direction may be periodic
/// (channel instance). Cell masks support the disk instance, where only
/// cells whose centers lie inside the disk are active.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "corofsi/errors.hpp"
#include "corofsi/tensor_ops.hpp"

namespace corofsi {

enum class Side { Bottom, Top, Left, Right };

/// Uniform 2D grid. Cells are nx*ny; u-faces nx*ny (periodic x) or
/// (nx+1)*ny (nonperiodic); v-faces nx*(ny+1).
struct Grid2 {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;
    double hx = 0.0, hy = 0.0;
    bool periodic_x = true;
    std::vector<std::uint8_t> mask; // per-cell; empty means all active

    Grid2() = default;
    Grid2(int nx_, int ny_, double x0_, double y0_, double lx, double ly,
          bool periodic_x_);

    int ncells() const { return nx * ny; }
    int nu() const { return (periodic_x ? nx : nx + 1) * ny; }
    int nv() const { return nx * (ny + 1); }

    int cidx(int i, int j) const { return i + nx * j; }
    int uidx(int i, int j) const { return i + (periodic_x ? nx : nx + 1) * j; }
    int vidx(int i, int j) const { return i + nx * j; }

    double xc(int i) const { return x0 + (i + 0.5) * hx; }
    double yc(int j) const { return y0 + (j + 0.5) * hy; }
    double xu(int i) const { return x0 + i * hx; }
    double yv(int j) const { return y0 + j * hy; }

    bool active(int i, int j) const {
        return mask.empty() ? true : mask[cidx(i, j)] != 0;
    }
    double cell_area() const { return hx * hy; }

    /// Wraps a cell index in the periodic direction; clamps otherwise.
    int wrap_i(int i) const;

    /// Marks cells whose center lies inside the disk |x - c| < r as active.
    void set_disk_mask(double cx, double cy, double r);

    bool same_layout(const Grid2& o) const {
        return nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy &&
               x0 == o.x0 && y0 == o.y0 && periodic_x == o.periodic_x;
    }
};

/// Cell-centered scalar field.
struct ScalarField {
    std::vector<double> v;
    int nx = 0, ny = 0;

    ScalarField() = default;
    explicit ScalarField(const Grid2& g, double fill = 0.0)
        : v(static_cast<std::size_t>(g.ncells()), fill), nx(g.nx), ny(g.ny) {}

    double& operator()(int i, int j) { return v[i + nx * j]; }
    double operator()(int i, int j) const { return v[i + nx * j]; }
};

/// MAC staggered velocity field (u on x-faces, v on y-faces).
struct VectorField {
    std::vector<double> u, v;
    int nx = 0, ny = 0;
    bool periodic_x = true;

    VectorField() = default;
    explicit VectorField(const Grid2& g)
        : u(static_cast<std::size_t>(g.nu()), 0.0),
          v(static_cast<std::size_t>(g.nv()), 0.0),
          nx(g.nx), ny(g.ny), periodic_x(g.periodic_x) {}

    int nux() const { return periodic_x ? nx : nx + 1; }
    double& U(int i, int j) { return u[i + nux() * j]; }
    double U(int i, int j) const { return u[i + nux() * j]; }
    double& V(int i, int j) { return v[i + nx * j]; }
    double V(int i, int j) const { return v[i + nx * j]; }
};

/// Cell-centered symmetric 2x2 tensor field (three components).
struct SymTensorField {
    std::vector<double> t11, t12, t22;
    int nx = 0, ny = 0;

    SymTensorField() = default;
    explicit SymTensorField(const Grid2& g, const SymMat2& fill = {})
        : t11(static_cast<std::size_t>(g.ncells()), fill.t11),
          t12(static_cast<std::size_t>(g.ncells()), fill.t12),
          t22(static_cast<std::size_t>(g.ncells()), fill.t22),
          nx(g.nx), ny(g.ny) {}

    SymMat2 at(int i, int j) const {
        const int k = i + nx * j;
        return {t11[k], t12[k], t22[k]};
    }
    void set(int i, int j, const SymMat2& m) {
        const int k = i + nx * j;
        t11[k] = m.t11;
        t12[k] = m.t12;
        t22[k] = m.t22;
    }
};

/// Shell displacement and velocity on the periodic 1D structure grid.
/// Both are kept mean-zero; the grid covers the parameter interval [0,1).
struct StructureState {
    std::vector<double> eta;
    std::vector<double> eta_dot;

    StructureState() = default;
    explicit StructureState(int ny_s) : eta(ny_s, 0.0), eta_dot(ny_s, 0.0) {}

    int size() const { return static_cast<int>(eta.size()); }
    double max_abs_eta() const;
    void project_mean_zero();
};

// --- norms ------------------------------------------------------------

/// (sum |f|^p J hx hy)^(1/p) over active cells; p = inf returns max |f|.
double weighted_lp_norm(const ScalarField& f, double p, const ScalarField& J,
                        const Grid2& g);

/// Same with the pointwise Frobenius norm of the tensor.
double weighted_lp_norm(const SymTensorField& f, double p, const ScalarField& J,
                        const Grid2& g);

// --- stencils ----------------------------------------------------------

/// Face-normal gradient of a cell scalar: gx on x-faces, gy on y-faces.
/// Wall faces (j = 0 and j = ny for gy; i = 0 / nx when nonperiodic) get 0,
/// the homogeneous-Neumann convention used by the diffusion fluxes.
VectorField grad(const ScalarField& f, const Grid2& g);

/// MAC divergence of a face field, at cells.
ScalarField div(const VectorField& w, const Grid2& g);

/// div(grad(f)) with periodic x and zero-flux walls.
ScalarField laplace(const ScalarField& f, const Grid2& g);

/// Cell-centered velocity gradient with rows = components, (grad u)_ij =
/// d u_i / d x_j. Wall values of the tangential component enter through
/// the supplied Dirichlet traces (size nx each; may be empty for zero).
struct WallBC {
    std::vector<double> u_bottom, u_top; // tangential u at walls
    std::vector<double> v_bottom, v_top; // normal v at walls (face values)
};
std::vector<Mat2> grad_vec(const VectorField& w, const Grid2& g,
                           const WallBC& bc);

// --- interpolation / traces --------------------------------------------

/// Bilinear interpolation of a cell-centered field at (x, y); periodic wrap
/// in x, clamped extrapolation-free evaluation in y.
double interp_cell(const ScalarField& f, const Grid2& g, double x, double y);

/// Bilinear interpolation of the MAC u / v components at (x, y).
double interp_u(const VectorField& w, const Grid2& g, double x, double y);
double interp_v(const VectorField& w, const Grid2& g, double x, double y);

/// Values of the cells adjacent to a side, as a 1D array.
std::vector<double> boundary_trace(const ScalarField& f, const Grid2& g, Side s);

} // namespace corofsi
