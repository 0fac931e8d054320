#include "ffcc/torus_fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace ffcc {

namespace {

// FFTW's planner is not thread-safe but executing an existing plan on new
// arrays is, so plans are created once per size under a lock and then shared.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t real_count = static_cast<std::size_t>(n) * n;
  const std::size_t complex_count = static_cast<std::size_t>(n) * (n / 2 + 1);
  double* real = fftw_alloc_real(real_count);
  fftw_complex* cplx = fftw_alloc_complex(complex_count);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(n, n, real, cplx, flags);
  p.inverse = fftw_plan_dft_c2r_2d(n, n, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (!p.forward || !p.inverse) throw Error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

void require_even(int n) {
  if (n < 2 || n % 2 != 0) throw Error("FFT size must be even and >= 2");
}

std::vector<FftvSlot> make_layout(int n) {
  const int h = n / 2;
  const double r2 = std::sqrt(2.0);
  std::vector<FftvSlot> slots;
  slots.reserve(static_cast<std::size_t>(n) * n);
  const auto scale_re = [&](int i, int j) {
    const bool self_conjugate = (i == 0 || i == h) && (j == 0 || j == h);
    return self_conjugate ? 1.0 : r2;
  };
  for (int i = 0; i <= h; ++i) slots.push_back({i, 0, false, scale_re(i, 0)});
  for (int i = 0; i <= h; ++i) slots.push_back({i, h, false, scale_re(i, h)});
  for (int j = 1; j < h; ++j)
    for (int i = 0; i < n; ++i) slots.push_back({i, j, false, r2});
  for (int i = 1; i < h; ++i) slots.push_back({i, 0, true, r2});
  for (int i = 1; i < h; ++i) slots.push_back({i, h, true, r2});
  for (int j = 1; j < h; ++j)
    for (int i = 0; i < n; ++i) slots.push_back({i, j, true, r2});
  return slots;
}

int side_from_length(std::size_t len) {
  const auto n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n < 2 || static_cast<std::size_t>(n) * n != len || n % 2 != 0) {
    throw Error("fftv vector length must be n^2 with n even and >= 2");
  }
  return n;
}

}  // namespace

Spectrum rfft2(const Grid& z) {
  require_even(z.n());
  const PlanPair& p = plans_for(z.n());
  Spectrum s;
  s.n = z.n();
  s.bins.resize(static_cast<std::size_t>(s.n) * s.cols());
  // r2c does not modify its input for out-of-place transforms.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(z.data()),
                       reinterpret_cast<fftw_complex*>(s.bins.data()));
  return s;
}

Grid irfft2(const Spectrum& s) {
  require_even(s.n);
  const PlanPair& p = plans_for(s.n);
  // c2r destroys its input.
  std::vector<std::complex<double>> scratch = s.bins;
  Grid out(s.n);
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double norm = 1.0 / (static_cast<double>(s.n) * s.n);
  for (double& v : out.values()) v *= norm;
  return out;
}

const std::vector<FftvSlot>& fftv_layout(int n) {
  require_even(n);
  static std::mutex m;
  static std::map<int, std::unique_ptr<const std::vector<FftvSlot>>> cache;
  std::lock_guard lock(m);
  auto& entry = cache[n];
  if (!entry) entry = std::make_unique<const std::vector<FftvSlot>>(make_layout(n));
  return *entry;
}

std::vector<double> fftv(const Spectrum& s) {
  const auto& layout = fftv_layout(s.n);
  std::vector<double> v(layout.size());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const FftvSlot& slot = layout[k];
    const std::complex<double> c = s(slot.i, slot.j);
    v[k] = slot.scale * (slot.imag ? c.imag() : c.real());
  }
  return v;
}

std::vector<double> fftv(const Grid& z) { return fftv(rfft2(z)); }

Spectrum spectrum_from_fftv(std::span<const double> v) {
  const int n = side_from_length(v.size());
  const auto& layout = fftv_layout(n);
  Spectrum s;
  s.n = n;
  s.bins.assign(static_cast<std::size_t>(n) * s.cols(), {0.0, 0.0});
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const FftvSlot& slot = layout[k];
    auto& c = s(slot.i, slot.j);
    const double x = v[k] / slot.scale;
    if (slot.imag) {
      c.imag(x);
    } else {
      c.real(x);
    }
  }
  // Columns 0 and n/2 are their own conjugate partners: F(n-i, j) = conj F(i, j).
  const int h = n / 2;
  for (int j : {0, h}) {
    for (int i = h + 1; i < n; ++i) s(i, j) = std::conj(s(n - i, j));
  }
  return s;
}

Grid ifftv(std::span<const double> v) { return irfft2(spectrum_from_fftv(v)); }

Grid circular_convolve(const Grid& x, const Grid& f) {
  if (x.n() != f.n()) throw Error("circular_convolve: size mismatch");
  Spectrum a = rfft2(x);
  const Spectrum b = rfft2(f);
  for (std::size_t k = 0; k < a.bins.size(); ++k) a.bins[k] *= b.bins[k];
  return irfft2(a);
}

}  // namespace ffcc
