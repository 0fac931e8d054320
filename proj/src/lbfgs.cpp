#include "ffcc/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "ffcc/types.hpp"

namespace ffcc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g.
std::vector<double> search_direction(const std::deque<Pair>& memory, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    const Pair& p = memory[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  const Pair& last = memory.back();
  const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const Pair& p = memory[k];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * p.s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& options) {
  if (options.max_iters < 0 || options.history < 1) throw Error("lbfgs: invalid options");
  const std::size_t dim = x0.size();

  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> g(dim);
  double f = objective(result.x, g);
  if (!std::isfinite(f)) throw Error("lbfgs: objective is not finite at the starting point");
  result.loss = f;
  result.trace.push_back({0, f, std::sqrt(dot(g, g))});
  if (max_abs(g) <= options.grad_tol) {
    result.converged = true;
    return result;
  }

  std::deque<Pair> memory;
  std::vector<double> x_new(dim), g_new(dim);
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    std::vector<double> d;
    double t = 1.0;
    if (memory.empty()) {
      d.assign(g.begin(), g.end());
      for (double& v : d) v = -v;
      double l1 = 0.0;
      for (double v : g) l1 += std::abs(v);
      t = std::min(1.0, 1.0 / l1);
    } else {
      d = search_direction(memory, g);
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Not a descent direction: fall back to steepest descent.
      memory.clear();
      d.assign(g.begin(), g.end());
      for (double& v : d) v = -v;
      slope = dot(g, d);
      double l1 = 0.0;
      for (double v : g) l1 += std::abs(v);
      t = std::min(1.0, 1.0 / l1);
    }

    double f_new = 0.0;
    bool accepted = false;
    for (int step = 0; step < options.max_line_search_steps; ++step) {
      for (std::size_t i = 0; i < dim; ++i) x_new[i] = result.x[i] + t * d[i];
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + options.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= options.backtrack;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    Pair p{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    for (std::size_t i = 0; i < dim; ++i) {
      p.s[i] = x_new[i] - result.x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const bool stalled = max_abs(p.s) == 0.0;
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y)) && sy > 0.0) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }

    result.x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    result.loss = f;
    result.iterations = iter;
    result.trace.push_back({iter, f, std::sqrt(dot(g, g))});
    if (max_abs(g) <= options.grad_tol) {
      result.converged = true;
      break;
    }
    if (stalled) break;
  }
  return result;
}

}  // namespace ffcc
