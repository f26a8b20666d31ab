/// @file spectral.hpp
/// @brief Radix-2 FFT and a trigonometric interpolant for periodic 1D data
///        on the parameter interval [0,1).

#pragma once

#include <complex>
#include <vector>

namespace corofsi {

/// In-place iterative radix-2 FFT; size must be a power of two.
/// inverse = true applies the 1/n-scaled inverse transform.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(int n);

/// Trigonometric interpolant of real periodic nodal data f_j = f(j/n):
///   f(y) = a0 + sum_m [ a_m cos(2 pi m y) + b_m sin(2 pi m y) ]
/// with exact values and derivatives for band-limited data. The Nyquist
/// mode is kept as a pure cosine.
class FourierSeries1 {
  public:
    FourierSeries1() = default;
    explicit FourierSeries1(const std::vector<double>& nodes);

    double value(double y) const;
    double deriv(double y) const;
    int size() const { return n_; }

  private:
    int n_ = 0;
    std::vector<double> a_, b_; // a_[m], b_[m] for m = 0..n/2
};

} // namespace corofsi
