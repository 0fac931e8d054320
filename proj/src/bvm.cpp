#include "ffcc/bvm.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <vector>

namespace ffcc {

namespace {

struct Marginals {
  std::vector<double> pi;  // sum over j
  std::vector<double> pj;  // sum over i
};

Marginals marginals(const Grid& p) {
  const int n = p.n();
  Marginals m{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = p(i, j);
      m.pi[i] += v;
      m.pj[j] += v;
    }
  }
  return m;
}

struct Resultant {
  double x = 0.0;
  double y = 0.0;
};

Resultant resultant(const std::vector<double>& marginal) {
  const int n = static_cast<int>(marginal.size());
  Resultant r;
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    r.x += marginal[i] * std::cos(theta);
    r.y += marginal[i] * std::sin(theta);
  }
  if (std::hypot(r.x, r.y) < kMinResultant) {
    throw DegenerateConcentration("PDF has zero resultant; circular mean is undefined");
  }
  return r;
}

double circular_index(const Resultant& r, int n) {
  double idx = std::fmod(n / (2.0 * std::numbers::pi) * std::atan2(r.y, r.x), n);
  if (idx < 0) idx += n;
  return idx >= n ? idx - n : idx;
}

// Unwrapped coordinate of every bin relative to a mean at `mean_bin`.
std::vector<double> unwrapped(int n, double mean_bin) {
  const long long shift = static_cast<long long>(std::floor(mean_bin));
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    long long k = (i - shift + n / 2) % n;
    if (k < 0) k += n;
    out[i] = static_cast<double>(k);
  }
  return out;
}

struct Moments {
  std::vector<double> ibar, jbar;
  double ei = 0.0, ej = 0.0;
  double sii = 0.0, sjj = 0.0, sij = 0.0;
};

Moments moments(const Grid& p, const Marginals& m, const HistogramGeometry& geom, const Chroma& mu) {
  const int n = p.n();
  Moments mo;
  mo.ibar = unwrapped(n, (mu.u - geom.u_lo) / geom.bin_size);
  mo.jbar = unwrapped(n, (mu.v - geom.v_lo) / geom.bin_size);
  for (int i = 0; i < n; ++i) {
    mo.ei += m.pi[i] * mo.ibar[i];
    mo.sii += m.pi[i] * mo.ibar[i] * mo.ibar[i];
    mo.ej += m.pj[i] * mo.jbar[i];
    mo.sjj += m.pj[i] * mo.jbar[i] * mo.jbar[i];
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += p(i, j) * mo.jbar[j];
    mo.sij += mo.ibar[i] * row;
  }
  return mo;
}

Eigen::Matrix2d covariance_from(const Moments& mo, double h) {
  Eigen::Matrix2d s;
  s(0, 0) = kCovarianceEpsilon + mo.sii - mo.ei * mo.ei;
  s(1, 1) = kCovarianceEpsilon + mo.sjj - mo.ej * mo.ej;
  s(0, 1) = s(1, 0) = mo.sij - mo.ei * mo.ej;
  return h * h * s;
}

Chroma mean_from(const Resultant& ri, const Resultant& rj, const HistogramGeometry& geom) {
  return {geom.u_lo + geom.bin_size * circular_index(ri, geom.n),
          geom.v_lo + geom.bin_size * circular_index(rj, geom.n)};
}

void check_pdf(const Grid& p, const HistogramGeometry& geom) {
  geom.validate();
  if (p.n() != geom.n) throw Error("PDF size does not match histogram geometry");
}

}  // namespace

Chroma fit_mean(const Grid& p, const HistogramGeometry& geom) {
  check_pdf(p, geom);
  const Marginals m = marginals(p);
  return mean_from(resultant(m.pi), resultant(m.pj), geom);
}

Eigen::Matrix2d fit_covariance(const Grid& p, const HistogramGeometry& geom, const Chroma& mu) {
  check_pdf(p, geom);
  const Marginals m = marginals(p);
  return covariance_from(moments(p, m, geom, mu), geom.bin_size);
}

BvmPosterior fit_bvm(const Grid& p, const HistogramGeometry& geom) {
  check_pdf(p, geom);
  const Marginals m = marginals(p);
  BvmPosterior post;
  post.mu = mean_from(resultant(m.pi), resultant(m.pj), geom);
  post.sigma = covariance_from(moments(p, m, geom, post.mu), geom.bin_size);
  return post;
}

NllGradient nll_gradient(const BvmPosterior& post, const Chroma& target) {
  const double det = post.sigma.determinant();
  if (!(det > 0.0) || !std::isfinite(det)) throw Error("nll_loss: covariance is not positive-definite");
  const Eigen::Matrix2d inv = post.sigma.inverse();
  const Eigen::Vector2d d(target.u - post.mu.u, target.v - post.mu.v);
  const Eigen::Vector2d inv_d = inv * d;
  NllGradient g;
  g.loss = std::log(det) + d.dot(inv_d);
  g.d_mu = -2.0 * inv_d;
  g.d_sigma = inv - inv_d * inv_d.transpose();
  return g;
}

double nll_loss(const BvmPosterior& post, const Chroma& target) {
  return nll_gradient(post, target).loss;
}

BvmLoss loss_backward(const Grid& p, const HistogramGeometry& geom, const Chroma& target,
                      const DealiasFn& dealias) {
  check_pdf(p, geom);
  const int n = p.n();
  const double h = geom.bin_size;
  const Marginals m = marginals(p);
  const Resultant ri = resultant(m.pi);
  const Resultant rj = resultant(m.pj);

  const Chroma aliased = mean_from(ri, rj, geom);
  const Moments mo = moments(p, m, geom, aliased);

  BvmLoss out;
  out.posterior.mu = dealias ? dealias(aliased) : aliased;
  out.posterior.sigma = covariance_from(mo, h);

  const NllGradient g = nll_gradient(out.posterior, target);
  out.loss = g.loss;

  // d mu / d P(i, j) depends on i only (u) or j only (v).
  const double mu_scale = n * h / (2.0 * std::numbers::pi);
  const double ri2 = ri.x * ri.x + ri.y * ri.y;
  const double rj2 = rj.x * rj.x + rj.y * rj.y;
  std::vector<double> dmu_u(n), dmu_v(n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    dmu_u[k] = mu_scale * (ri.x * s - ri.y * c) / ri2;
    dmu_v[k] = mu_scale * (rj.x * s - rj.y * c) / rj2;
  }

  const double h2 = h * h;
  const double g_uu = g.d_sigma(0, 0);
  const double g_vv = g.d_sigma(1, 1);
  const double g_uv = g.d_sigma(0, 1) + g.d_sigma(1, 0);
  std::vector<double> row_term(n), col_term(n);
  for (int k = 0; k < n; ++k) {
    const double ib = mo.ibar[k];
    const double jb = mo.jbar[k];
    row_term[k] = g.d_mu(0) * dmu_u[k] + g_uu * h2 * ib * (ib - 2.0 * mo.ei);
    col_term[k] = g.d_mu(1) * dmu_v[k] + g_vv * h2 * jb * (jb - 2.0 * mo.ej);
  }

  out.d_p = Grid(n);
  for (int i = 0; i < n; ++i) {
    const double ib = mo.ibar[i];
    for (int j = 0; j < n; ++j) {
      const double jb = mo.jbar[j];
      const double cross = h2 * (ib * jb - ib * mo.ej - jb * mo.ei);
      out.d_p(i, j) = row_term[i] + col_term[j] + g_uv * cross;
    }
  }
  return out;
}

}  // namespace ffcc
