#include "ffcc/precond.hpp"

#include <cmath>
#include <complex>

#include "ffcc/torus_fft.hpp"

namespace ffcc {

RegWeights build_weights(int n, double lambda0, double lambda1) {
  if (!(lambda0 > 0.0)) throw Error("build_weights: lambda0 must be > 0");
  if (!(lambda1 >= 0.0)) throw Error("build_weights: lambda1 must be >= 0");
  Grid du(n), dv(n);
  du(0, 0) = 1.0;
  du(1, 0) = -1.0;
  dv(0, 0) = 1.0;
  dv(0, 1) = -1.0;
  const Spectrum su = rfft2(du);
  const Spectrum sv = rfft2(dv);

  RegWeights rw;
  rw.n = n;
  rw.lambda0 = lambda0;
  rw.lambda1 = lambda1;
  const auto& layout = fftv_layout(n);
  rw.w.resize(layout.size());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const FftvSlot& s = layout[k];
    const double energy = std::norm(su(s.i, s.j)) + std::norm(sv(s.i, s.j));
    rw.w[k] = std::sqrt(lambda1 * energy + lambda0) / n;
  }
  return rw;
}

double regularizer_time_domain(const Grid& z, double lambda0, double lambda1) {
  const int n = z.n();
  double tv = 0.0;
  double l2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = z(i, j);
      const double a = c - z.wrap(i + 1, j);
      const double b = c - z.wrap(i, j + 1);
      tv += a * a + b * b;
      l2 += c * c;
    }
  }
  return lambda1 * tv + lambda0 * l2;
}

Grid regularizer_gradient(const Grid& z, double lambda0, double lambda1) {
  const int n = z.n();
  Grid g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = z(i, j);
      const double lap = 4.0 * c - z.wrap(i + 1, j) - z.wrap(i - 1, j) - z.wrap(i, j + 1) -
                         z.wrap(i, j - 1);
      g(i, j) = 2.0 * lambda1 * lap + 2.0 * lambda0 * c;
    }
  }
  return g;
}

std::vector<double> to_preconditioned(const Grid& z, const RegWeights& w) {
  if (z.n() != w.n) throw Error("to_preconditioned: size mismatch");
  std::vector<double> v = fftv(z);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= w.w[k];
  return v;
}

Grid from_preconditioned(std::span<const double> z, const RegWeights& w) {
  if (z.size() != w.w.size()) throw Error("from_preconditioned: size mismatch");
  std::vector<double> v(z.begin(), z.end());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] /= w.w[k];
  return ifftv(v);
}

std::vector<double> gradient_to_preconditioned(const Grid& d_grid, const RegWeights& w) {
  if (d_grid.n() != w.n) throw Error("gradient_to_preconditioned: size mismatch");
  std::vector<double> v = fftv(d_grid);
  const double inv_n2 = 1.0 / (static_cast<double>(w.n) * w.n);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= inv_n2 / w.w[k];
  return v;
}

}  // namespace ffcc
