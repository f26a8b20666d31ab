/// @file geometry.hpp
/// @brief Hanzawa transform between the reference domain and the displaced
///        domain, its numerical inverse, and the geometric coefficient
///        fields (J, A, B, domain velocity, deformed boundary data) that
///        turn the moving-domain equations into fixed-domain equations.
///
/// Two concrete instances are shipped:
///   - periodic channel [0,1) x [0,1], flexible top edge, rigid bottom;
///   - unit disk, fully flexible boundary, embedded in the box [-1,1]^2.
/// The boundary parameter y runs over [0,1) in both cases.

#pragma once

#include <vector>

#include "corofsi/fields.hpp"
#include "corofsi/spectral.hpp"
#include "corofsi/tensor_ops.hpp"

namespace corofsi {

enum class InstanceKind { PeriodicChannel, Disk };

struct ReferenceGeometry {
    InstanceKind kind = InstanceKind::PeriodicChannel;
    double L = 0.25; // tubular width, 0 < L < height/2 (channel) or radius (disk)

    /// Boundary parametrization of the flexible part and its unit normal.
    Vec2 varphi(double y) const;
    Vec2 normal(double y) const;
    double varphi_speed(double y) const; // |d varphi / dy|

    /// Grid box covering the reference domain.
    Grid2 make_grid(int nx, int ny) const;

    void validate() const; // throws ValidationError
};

/// C^2 cutoff: exactly 0 for s <= s_lo, exactly 1 for s >= s_hi. The
/// profile is a near-linear ramp with quintic-smoothstep blends over the
/// fraction `blend` of the support at each end, so its maximum slope is
/// 1 / ((s_hi - s_lo)(1 - blend)). Keeping that slope below 1/(0.8 L)
/// is what makes the map injective (J > 0) up to ||eta|| = 0.8 L; a
/// plain smoothstep over the same support is too steep for that.
struct CutoffProfile {
    double s_lo = 0.0, s_hi = 0.0;
    double blend = 0.1;

    static CutoffProfile standard(double L) { return {-0.98 * L, -0.02 * L, 0.1}; }

    double value(double s) const;
    double deriv(double s) const;
    double max_slope() const { return 1.0 / ((s_hi - s_lo) * (1.0 - blend)); }
};

/// Per-step snapshot of the geometric coefficient fields on a grid.
/// F = grad Psi (rows = components), J = det F, B = J F^{-1},
/// A = J F^{-1} F^{-T}, domain velocity w = -F^{-1} dPsi/dt.
struct GeometryTensors {
    Grid2 grid;
    ScalarField J;                       // at cells
    std::vector<Mat2> A, B, Finv;        // at cells
    std::vector<Vec2> domain_vel;        // at cells
    std::vector<double> J_uface, J_vface;
    std::vector<Mat2> B_uface, B_vface;
    std::vector<Mat2> A_uface, A_vface;
    std::vector<Vec2> w_uface, w_vface;
    std::vector<Vec2> n_def;             // at structure nodes, unit length
    std::vector<double> bnd_measure;     // |d varphi_eta / dy| at nodes
    std::vector<Mat2> B_bnd, Finv_bnd;   // map tensors at the boundary nodes
    double ref_speed = 1.0;              // |d varphi / dy| of the reference
    double max_abs_eta = 0.0;
};

/// Callable form of the Hanzawa transform for one structure state.
/// eta and eta_dot are represented by their trigonometric interpolants,
/// so the map is smooth in both x and the boundary parameter.
class HanzawaMap {
  public:
    HanzawaMap(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
               const StructureState& s);

    Vec2 forward(const Vec2& x) const;
    /// Numerical inverse via a safeguarded Newton/bisection solve along the
    /// normal fiber; NoConvergence after 100 iterations.
    Vec2 inverse(const Vec2& z) const;

    Mat2 grad(const Vec2& x) const;    // F = grad Psi, analytic
    Vec2 dt_psi(const Vec2& x) const;  // time derivative of the map
    Vec2 domain_velocity(const Vec2& x) const; // -F^{-1} dt_psi

    const ReferenceGeometry& geometry() const { return geom_; }
    double max_abs_eta() const { return max_eta_; }

  private:
    ReferenceGeometry geom_;
    CutoffProfile cutoff_;
    FourierSeries1 eta_, eta_dot_;
    double max_eta_ = 0.0;

    // channel fiber data: (y, s) coordinates of a point near the boundary
    bool fiber_coords(const Vec2& x, double& y, double& s) const;
};

// Spec-level operations -------------------------------------------------

Vec2 hanzawa_forward(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
                     const StructureState& eta, const Vec2& x);

Vec2 hanzawa_inverse(const ReferenceGeometry& geom, const CutoffProfile& cutoff,
                     const StructureState& eta, const Vec2& z);

GeometryTensors geometry_tensors(const ReferenceGeometry& geom,
                                 const CutoffProfile& cutoff,
                                 const StructureState& s, const Grid2& grid);

/// Identity coefficients (J = 1, A = B = I, zero domain velocity) on an
/// arbitrary grid: the fixed-domain case, also used by prescribed-velocity
/// tests and the configuration-space solver.
GeometryTensors identity_tensors(const Grid2& grid);

/// Unit deformed normals and boundary measure at the structure nodes.
void deformed_boundary_data(const ReferenceGeometry& geom,
                            const StructureState& s,
                            std::vector<Vec2>& n_def,
                            std::vector<double>& bnd_measure);

} // namespace corofsi
