#pragma once
// Gauss-Legendre quadrature with panel composition.
//
// The replica moment integrals are expectations over a complex Gaussian of
// functions that are piecewise smooth in polar coordinates: the projection
// onto a constellation is smooth inside each angular sector / radial band
// and kinked or discontinuous exactly at sector boundaries and clip radii.
// A panel scheme whose panel edges are placed at those known breakpoints,
// with the Gaussian weight applied explicitly, converges spectrally; a
// tensor Hermite rule over (Re z, Im z) does not, because the kinks cut
// through the grid.  (Convergence is enforced by the order-doubling tests.)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "lse_lab/special.hpp"

namespace lse_lab {

struct QuadNodes {
  std::vector<double> x;  // abscissae
  std::vector<double> w;  // weights
  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre polynomial; cached per order (read-only after first build).
inline const QuadNodes& gauss_legendre(int n) {
  static std::map<int, QuadNodes> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[i] = -x;
    q.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.w[i] = w;
    q.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(q)).first->second;
}

// Composite rule: [lo, hi] split into panels of width <= max_width, with
// `splits` (interior breakpoints, unsorted OK) forced to be panel edges.
inline QuadNodes paneled_interval(double lo, double hi, double max_width, int nodes_per_panel,
                                  std::vector<double> splits = {}) {
  if (!(hi > lo)) return {};
  splits.push_back(lo);
  splits.push_back(hi);
  std::sort(splits.begin(), splits.end());
  std::vector<double> edges;
  for (double s : splits) {
    if (s < lo - 1e-15 || s > hi + 1e-15) continue;
    if (edges.empty() || s - edges.back() > 1e-13) edges.push_back(s);
  }
  const QuadNodes& base = gauss_legendre(nodes_per_panel);
  QuadNodes out;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    const int sub = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double h = (b - a) / sub;
    for (int s = 0; s < sub; ++s) {
      const double pa = a + s * h;
      for (std::size_t k = 0; k < base.size(); ++k) {
        out.x.push_back(pa + 0.5 * h * (base.x[k] + 1.0));
        out.w.push_back(0.5 * h * base.w[k]);
      }
    }
  }
  return out;
}

// Radial grid for E over |z| with the weight r*exp(-r^2) applied into the
// weights; integrates f(r) against 2 r e^{-r^2} dr on [0, rmax] exactly for
// smooth-between-splits f.   E_{z~CN(0,1)}[g(|z|)] = \int_0^inf g(r) 2r e^{-r^2} dr.
inline QuadNodes radial_gaussian_grid(double rmax, double max_width, int nodes_per_panel,
                                      std::vector<double> splits = {}) {
  QuadNodes g = paneled_interval(0.0, rmax, max_width, nodes_per_panel, std::move(splits));
  for (std::size_t i = 0; i < g.size(); ++i)
    g.w[i] *= 2.0 * g.x[i] * std::exp(-g.x[i] * g.x[i]);
  return g;
}

// Line grid for E over a real standard-normal-like axis with explicit weight
// exp(-t^2)/sqrt(pi): integrates f against the measure of t where
// z = t (variance 1/2 per real axis of a unit complex Gaussian).
inline QuadNodes line_gaussian_grid(double tmax, double max_width, int nodes_per_panel,
                                    std::vector<double> splits = {}) {
  QuadNodes g = paneled_interval(-tmax, tmax, max_width, nodes_per_panel, std::move(splits));
  for (std::size_t i = 0; i < g.size(); ++i)
    g.w[i] *= std::exp(-g.x[i] * g.x[i]) / kSqrtPi;
  return g;
}

}  // namespace lse_lab
