#include "ffcc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ffcc/model.hpp"

namespace ffcc {

namespace {

// Distributions are written out by hand so the scenes do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

Rgb reflectance(Rng& rng, const SyntheticOptions& o) {
  Chroma c;
  if (rng.uniform() < o.neutral_fraction) {
    c = {0.03 * rng.normal(), 0.03 * rng.normal()};
  } else {
    // Skewed palette: greenish-yellow on average.
    c = {0.35 + 0.35 * rng.normal(), 0.45 + 0.35 * rng.normal()};
  }
  const Rgb dir = illuminant_rgb(c);
  const double albedo = rng.uniform(0.15, 0.8) / std::max({dir.r, dir.g, dir.b});
  return {albedo * dir.r, albedo * dir.g, albedo * dir.b};
}

}  // namespace

std::vector<SyntheticScene> make_synthetic_scenes(std::size_t count, std::uint64_t seed,
                                                  const SyntheticOptions& o) {
  Rng rng(seed);
  std::vector<SyntheticScene> scenes;
  scenes.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const bool first_cluster = rng.uniform() < 0.5;
    const Chroma lc{(first_cluster ? o.cluster_a_u : o.cluster_b_u) + o.cluster_sigma * rng.normal(),
                    (first_cluster ? o.cluster_a_v : o.cluster_b_v) + o.cluster_sigma * rng.normal()};
    const Rgb light = illuminant_rgb(lc);
    const double peak = std::max({light.r, light.g, light.b});

    std::vector<Rgb> refl(static_cast<std::size_t>(o.width) * o.height, reflectance(rng, o));
    for (int p = 0; p < o.patches; ++p) {
      const Rgb r = reflectance(rng, o);
      const int w = rng.integer(o.width / 8, o.width / 2);
      const int h = rng.integer(o.height / 8, o.height / 2);
      const int x0 = rng.integer(0, o.width - w);
      const int y0 = rng.integer(0, o.height - h);
      for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) refl[static_cast<std::size_t>(y) * o.width + x] = r;
      }
    }

    SyntheticScene scene{LinearImage(o.width, o.height), light};
    const double exposure = rng.uniform(0.6, 1.0) / peak;
    for (int y = 0; y < o.height; ++y) {
      for (int x = 0; x < o.width; ++x) {
        const Rgb& r = refl[static_cast<std::size_t>(y) * o.width + x];
        auto channel = [&](double refl_c, double light_c) {
          return std::max(1e-6, exposure * refl_c * light_c * (1.0 + o.noise * rng.normal()));
        };
        const double cr = channel(r.r, light.r);
        const double cg = channel(r.g, light.g);
        const double cb = channel(r.b, light.b);
        scene.image.set(x, y, {cr, cg, cb});
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace ffcc
