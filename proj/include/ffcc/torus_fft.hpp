#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ffcc/types.hpp"

namespace ffcc {

/// Half spectrum of a real n x n grid as produced by a real-to-complex 2D DFT:
/// n rows by n/2 + 1 columns, row-major. The DFT is unnormalized.
struct Spectrum {
  int n = 0;
  std::vector<std::complex<double>> bins;

  int cols() const { return n / 2 + 1; }
  std::complex<double>& operator()(int i, int j) {
    return bins[static_cast<std::size_t>(i) * cols() + j];
  }
  std::complex<double> operator()(int i, int j) const {
    return bins[static_cast<std::size_t>(i) * cols() + j];
  }
};

/// Forward unnormalized 2D DFT of a real grid (n even).
Spectrum rfft2(const Grid& z);
/// Inverse of rfft2, including the 1/n^2 normalization.
Grid irfft2(const Spectrum& s);

/// Frequency (i, j) of the DFT coefficient stored at an fftv slot, whether
/// the slot holds its imaginary part, and the slot's scale factor.
struct FftvSlot {
  int i;
  int j;
  bool imag;
  double scale;
};

/// Slot layout of fftv for side length n (n even, n >= 2). Blocks, in order:
///   Re F(0..n/2, 0), Re F(0..n/2, n/2), Re F(0..n-1, 1..n/2-1),
///   Im F(1..n/2-1, 0), Im F(1..n/2-1, n/2), Im F(0..n-1, 1..n/2-1),
/// with the two-dimensional blocks vectorized column by column (i fastest).
/// Every slot is scaled by sqrt(2) except Re F at (0,0), (n/2,0), (0,n/2)
/// and (n/2,n/2). This layout is part of the model file format.
const std::vector<FftvSlot>& fftv_layout(int n);

/// Real bijective FFT: maps a real n x n grid to n^2 reals with
/// ||fftv(Z)||^2 equal to the total squared magnitude of the full DFT.
std::vector<double> fftv(const Grid& z);
/// Vectorizes an existing half spectrum with the fftv layout.
std::vector<double> fftv(const Spectrum& s);
/// Inverse of fftv. The length must be n^2 for some even n >= 2.
Grid ifftv(std::span<const double> v);
/// Half spectrum represented by an fftv vector.
Spectrum spectrum_from_fftv(std::span<const double> v);

/// Periodic 2D convolution: out(i,j) = sum_{a,b} x(a,b) f(i-a, j-b), indices mod n.
Grid circular_convolve(const Grid& x, const Grid& f);

}  // namespace ffcc
