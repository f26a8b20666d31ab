#include "corofsi/structure.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "corofsi/errors.hpp"
#include "corofsi/spectral.hpp"

namespace corofsi {

namespace {

using cvec = std::vector<std::complex<double>>;

cvec to_modes(const std::vector<double>& nodal) {
    cvec a(nodal.begin(), nodal.end());
    fft(a, false);
    for (auto& z : a) z /= static_cast<double>(nodal.size());
    return a;
}

std::vector<double> to_nodes(cvec modes) {
    const int n = static_cast<int>(modes.size());
    for (auto& z : modes) z *= static_cast<double>(n);
    fft(modes, true);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = modes[i].real();
    return out;
}

double wavenumber(int m, int n) {
    const int signed_m = (m <= n / 2) ? m : m - n;
    return 2.0 * std::numbers::pi * signed_m;
}

} // namespace

StructureState structure_step(const StructureState& s, const StructureForcing& F,
                              double dt, double gamma) {
    const int n = s.size();
    if (!is_power_of_two(n))
        throw ValidationError("structure node count must be a power of two");
    if (static_cast<int>(F.F.size()) != n)
        throw GridMismatch("forcing length does not match structure grid");

    cvec eta = to_modes(s.eta);
    cvec w = to_modes(s.eta_dot);
    cvec f = to_modes(F.F);

    for (int m = 0; m < n; ++m) {
        if (m == 0) { // mean-zero projection
            eta[0] = 0.0;
            w[0] = 0.0;
            continue;
        }
        const double k = wavenumber(m, n);
        const double k2 = k * k, k4 = k2 * k2;
        const std::complex<double> wn =
            (w[m] + dt * (f[m] - k4 * eta[m])) / (1.0 + dt * gamma * k2 + dt * dt * k4);
        w[m] = wn;
        eta[m] = eta[m] + dt * wn;
    }

    StructureState out;
    out.eta = to_nodes(eta);
    out.eta_dot = to_nodes(w);
    out.project_mean_zero();
    return out;
}

double periodic_deriv_norm_sq(const std::vector<double>& nodal, int order) {
    const int n = static_cast<int>(nodal.size());
    if (!is_power_of_two(n))
        throw ValidationError("periodic norms require a power-of-two node count");
    cvec modes = to_modes(nodal);
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
        const double k = wavenumber(m, n);
        acc += std::pow(k * k, order) * std::norm(modes[m]);
    }
    return acc;
}

StructureEnergy structure_energy(const StructureState& s) {
    StructureEnergy e;
    e.kinetic = 0.5 * periodic_deriv_norm_sq(s.eta_dot, 0);
    e.bending = 0.5 * periodic_deriv_norm_sq(s.eta, 2);
    return e;
}

} // namespace corofsi
