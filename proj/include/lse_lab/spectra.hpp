#pragma once
// R-transform providers for the channel Gramian eigenvalue distribution.
//
// Replica fixed points consume R(-w) and R'(-w) for w >= 0 (w plays the
// role of a susceptibility, always nonnegative), plus the partial integral
// \int_a^b R(-w) dw for the zero-temperature entropy and the free-energy
// stationarity condition.
//
// Two providers:
//   * MarchenkoPasturIid — iid channel entries, R(w) = alpha^{-1}/(1-w)
//     in closed form.
//   * PathLossNumeric — per-user path-loss factors with density
//     f_d(z) = 2/(nu (kappa^2-1)) z^{-2/nu - 1} on [kappa^{-nu}, 1]
//     (normalized so the closest user has unit loss; support follows from
//     that normalization).  R(-w) is recovered by inverting the Stieltjes
//     transform: solve P(s) = w for s < 0, then R(-w) = s + 1/w.

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lse_lab/quadrature.hpp"

namespace lse_lab {

// ---------------------------------------------------------------- iid case

// R-transform of the Gramian for iid channel entries: alpha^{-1} / (1 - w).
// Defined for w < 1 (pole at w = 1); replica use is always w = -chi <= 0.
inline double mp_r_transform(double w, double alpha) {
  if (!(w < 1.0)) throw std::domain_error("mp_r_transform: requires w < 1 (pole at w = 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("mp_r_transform: alpha must be > 0");
  return 1.0 / (alpha * (1.0 - w));
}

inline double mp_r_transform_derivative(double w, double alpha) {
  if (!(w < 1.0)) throw std::domain_error("mp_r_transform_derivative: requires w < 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("mp_r_transform_derivative: alpha must be > 0");
  const double d = 1.0 - w;
  return 1.0 / (alpha * d * d);
}

// ------------------------------------------------------------ provider API

// Abstract spectrum: everything the replica solvers need.
class SpectrumModel {
 public:
  virtual ~SpectrumModel() = default;
  virtual double alpha() const = 0;
  // R(-w) and R'(-w) for w >= 0.
  virtual double r_neg(double w) const = 0;
  virtual double r_neg_derivative(double w) const = 0;
  // \int_a^b R(-w) dw for 0 <= a <= b.
  virtual double r_neg_integral(double a, double b) const = 0;
  virtual bool analytic() const = 0;
  virtual std::string name() const = 0;
};

class MarchenkoPasturIid final : public SpectrumModel {
 public:
  explicit MarchenkoPasturIid(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("MarchenkoPasturIid: alpha must be > 0");
  }
  double alpha() const override { return alpha_; }
  double r_neg(double w) const override { return mp_r_transform(-w, alpha_); }
  double r_neg_derivative(double w) const override {
    return mp_r_transform_derivative(-w, alpha_);
  }
  double r_neg_integral(double a, double b) const override {
    return (std::log1p(b) - std::log1p(a)) / alpha_;
  }
  bool analytic() const override { return true; }
  std::string name() const override { return "mp-iid"; }

 private:
  double alpha_;
};

// ----------------------------------------------------- path-loss spectrum

struct PathLossParams {
  double alpha = 2.0;   // antenna-to-user ratio
  double nu = 2.0;      // path-loss exponent (> 0)
  double kappa = 2.0;   // distance ratio r_max / r_min (> 1); 1 = degenerate
  int density_nodes = 256;
};

// Quadrature for E_z[g(z)] under the path-loss density via the CDF
// substitution z(F) = (kappa^2 - (kappa^2-1) F)^{-nu/2}, F ~ U[0,1]; the
// substitution degenerates cleanly to the unit point mass at kappa = 1.
inline QuadNodes pathloss_density_nodes(double nu, double kappa, int n) {
  if (!(nu > 0.0)) throw std::invalid_argument("path loss: nu must be > 0");
  if (!(kappa >= 1.0)) throw std::invalid_argument("path loss: kappa must be >= 1");
  const QuadNodes& base = gauss_legendre(n);
  QuadNodes out;
  out.x.resize(base.size());
  out.w.resize(base.size());
  const double k2 = kappa * kappa;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double F = 0.5 * (base.x[i] + 1.0);
    out.x[i] = std::pow(k2 - (k2 - 1.0) * F, -0.5 * nu);
    out.w[i] = 0.5 * base.w[i];
  }
  return out;
}

struct StieltjesResult {
  double G = 0.0;        // companion-Gramian Stieltjes value E[1/(lam - s)]
  double residual = 0.0; // |1/G + s - alpha E[z/(alpha + z G)]|
  int iterations = 0;
};

// Companion (K-side) Stieltjes transform of the Gramian at s < 0, from the
// fixed point  1/G + s = alpha * E_z[ z / (alpha + z G) ]  solved by damped
// iteration to residual < 1e-10 relative to the equation scale max(1, |s|)
// (the 1/G + s subtraction itself carries |s| * eps of rounding).
inline StieltjesResult pathloss_stieltjes(double s, const PathLossParams& pl,
                                          const QuadNodes& density) {
  if (!(s < 0.0)) throw std::domain_error("pathloss_stieltjes: requires s < 0");
  auto mean_term = [&](double G) {
    double acc = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i)
      acc += density.w[i] * density.x[i] / (pl.alpha + density.x[i] * G);
    return pl.alpha * acc;
  };
  double G = -1.0 / s;
  StieltjesResult res;
  const int max_iter = 200000;
  for (int it = 0; it < max_iter; ++it) {
    const double Gn = 1.0 / (mean_term(G) - s);
    res.iterations = it + 1;
    if (std::abs(Gn - G) < 1e-15 * std::max(1.0, std::abs(Gn))) {
      G = Gn;
      break;
    }
    G = 0.5 * (G + Gn);
  }
  res.G = G;
  res.residual = std::abs(1.0 / G + s - mean_term(G));
  if (res.residual > 1e-10 * std::max(1.0, std::abs(s))) {
    std::ostringstream os;
    os << "pathloss_stieltjes: fixed point did not reach residual 1e-10 (got " << res.residual
       << " at s = " << s << ")";
    throw std::runtime_error(os.str());
  }
  return res;
}

// R(-w) for the path-loss Gramian by Stieltjes inversion.  The full-size
// (N-side) transform is P(s) = -(1-1/alpha)/s + G(s)/alpha; for s < 0 it is
// positive and strictly increasing toward the support edge, so bisection on
// s in (-1e6, -1e-9) with automatic bracket expansion is robust.
inline double pathloss_r_neg(double w, const PathLossParams& pl, const QuadNodes& density) {
  if (!(w >= 0.0)) throw std::domain_error("pathloss_r_neg: requires w >= 0");
  double mean_z = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) mean_z += density.w[i] * density.x[i];
  if (w < 1e-12) return mean_z / pl.alpha;  // R(0) = first moment of the spectrum

  auto P = [&](double s) {
    const double G = pathloss_stieltjes(s, pl, density).G;
    return -(1.0 - 1.0 / pl.alpha) / s + G / pl.alpha;
  };
  double lo = -1e6, hi = -1e-9;  // P(lo) ~ 0 < w; P(hi) large > w
  double plo = P(lo) - w, phi = P(hi) - w;
  int expand = 0;
  while (plo > 0.0 && expand++ < 6) { lo *= 1e3; plo = P(lo) - w; }
  while (phi < 0.0 && expand++ < 12) { hi *= 1e-3; phi = P(hi) - w; }
  if (!(plo < 0.0 && phi > 0.0))
    throw std::runtime_error("pathloss_r_neg: bisection bracket failure on s in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (P(mid) - w > 0.0) hi = mid; else lo = mid;
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(lo))) break;
  }
  const double s = 0.5 * (lo + hi);
  return s + 1.0 / w;
}

// Monotone cubic (Fritsch-Carlson) interpolant used for the R(-w) cache.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2) throw std::invalid_argument("MonotoneCubic: need >= 2 points");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) { m_[i] = m_[i + 1] = 0.0; continue; }
      const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double t = 3.0 / std::sqrt(s);
        m_[i] = t * a * d[i];
        m_[i + 1] = t * b * d[i];
      }
    }
  }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front() + m_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + m_.back() * (x - x_.back());
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
    const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
  }

  double derivative(double x) const {
    if (x <= x_.front()) return m_.front();
    if (x >= x_.back()) return m_.back();
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
    const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (3 * t2 - 4 * t + 1) * h * m_[i] +
            (-6 * t2 + 6 * t) * y_[i + 1] + (3 * t2 - 2 * t) * h * m_[i + 1]) / h;
  }

 private:
  std::vector<double> x_, y_, m_;
};

// Numeric spectrum with a log-spaced R(-w) cache (direct solves remain
// available through the standalone functions above for tests).
class PathLossNumeric final : public SpectrumModel {
 public:
  explicit PathLossNumeric(PathLossParams pl, double w_max = 400.0, int grid_points = 160)
      : pl_(pl), density_(pathloss_density_nodes(pl.nu, pl.kappa, pl.density_nodes)) {
    if (!(pl.kappa >= 1.0)) throw std::invalid_argument("PathLossNumeric: kappa must be >= 1");
    // Grid: w = 0 plus log-spaced points; interpolate y(w) = R(-w) in
    // u = log1p(w) coordinates (monotone in both axes).
    std::vector<double> us, ys;
    us.push_back(0.0);
    ys.push_back(pathloss_r_neg(0.0, pl_, density_));
    const double u_lo = std::log1p(1e-3), u_hi = std::log1p(w_max);
    for (int i = 0; i < grid_points; ++i) {
      const double u = u_lo + (u_hi - u_lo) * i / (grid_points - 1.0);
      us.push_back(u);
      ys.push_back(pathloss_r_neg(std::expm1(u), pl_, density_));
    }
    cache_ = MonotoneCubic(std::move(us), std::move(ys));
    w_max_ = w_max;
  }

  double alpha() const override { return pl_.alpha; }
  double r_neg(double w) const override {
    check_domain(w);
    return cache_(std::log1p(w));
  }
  double r_neg_derivative(double w) const override {
    // R'(-w) = -d/dw R(-w); chain rule through u = log1p(w).
    check_domain(w);
    return -cache_.derivative(std::log1p(w)) / (1.0 + w);
  }
  double r_neg_integral(double a, double b) const override {
    if (!(b >= a && a >= 0.0)) throw std::domain_error("r_neg_integral: need 0 <= a <= b");
    if (b == a) return 0.0;
    // Adaptive refinement: halve the panel width until two successive
    // composite-rule evaluations agree to 1e-10.
    double width = 0.25 * (b - a + 1.0);
    double prev = 0.0;
    for (int level = 0; level < 12; ++level, width *= 0.5) {
      QuadNodes g = paneled_interval(a, b, width, 24);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g.w[i] * r_neg(g.x[i]);
      if (level > 0 && std::abs(acc - prev) < 1e-10) return acc;
      prev = acc;
    }
    return prev;
  }
  bool analytic() const override { return false; }
  std::string name() const override { return "path-loss"; }

  // Direct (non-cached) solves for verification.
  double r_neg_direct(double w) const { return pathloss_r_neg(w, pl_, density_); }
  StieltjesResult stieltjes(double s) const { return pathloss_stieltjes(s, pl_, density_); }
  const PathLossParams& params() const { return pl_; }

 private:
  void check_domain(double w) const {
    if (!(w >= 0.0 && w <= w_max_))
      throw std::domain_error("PathLossNumeric: w outside cached range [0, " +
                              std::to_string(w_max_) + "]");
  }
  PathLossParams pl_;
  QuadNodes density_;
  MonotoneCubic cache_;
  double w_max_ = 0.0;
};

// Zero-temperature consistency diagnostic: H0(zeta) = zeta R(-zeta) -
// \int_0^zeta R(-w) dw.  Zero when the variational ansatz is exact,
// strictly negative otherwise (R(-w) is decreasing).
inline double zero_temperature_entropy(double zeta, const SpectrumModel& spec) {
  if (!(zeta >= 0.0)) throw std::domain_error("zero_temperature_entropy: zeta must be >= 0");
  return zeta * spec.r_neg(zeta) - spec.r_neg_integral(0.0, zeta);
}

}  // namespace lse_lab
