#include "corofsi/spectral.hpp"

#include <cmath>
#include <numbers>

namespace corofsi {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    if (n <= 1) return;
    // bit-reversal permutation
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / len * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> even = a[i + k];
                const std::complex<double> odd = a[i + k + len / 2] * w;
                a[i + k] = even + odd;
                a[i + k + len / 2] = even - odd;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

FourierSeries1::FourierSeries1(const std::vector<double>& nodes) {
    n_ = static_cast<int>(nodes.size());
    const int half = n_ / 2;
    a_.assign(half + 1, 0.0);
    b_.assign(half + 1, 0.0);
    // direct DFT; n is small and this runs once per geometry build
    for (int m = 0; m <= half; ++m) {
        double ca = 0.0, cb = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double ang = 2.0 * std::numbers::pi * m * j / n_;
            ca += nodes[j] * std::cos(ang);
            cb += nodes[j] * std::sin(ang);
        }
        const double scale = (m == 0 || m == half) ? 1.0 / n_ : 2.0 / n_;
        a_[m] = ca * scale;
        b_[m] = (m == 0 || m == half) ? 0.0 : cb * scale;
    }
}

double FourierSeries1::value(double y) const {
    double s = a_[0];
    const int half = n_ / 2;
    for (int m = 1; m <= half; ++m) {
        const double ang = 2.0 * std::numbers::pi * m * y;
        s += a_[m] * std::cos(ang) + b_[m] * std::sin(ang);
    }
    return s;
}

double FourierSeries1::deriv(double y) const {
    double s = 0.0;
    const int half = n_ / 2;
    for (int m = 1; m <= half; ++m) {
        const double k = 2.0 * std::numbers::pi * m;
        const double ang = k * y;
        s += k * (-a_[m] * std::sin(ang) + b_[m] * std::cos(ang));
    }
    return s;
}

} // namespace corofsi
