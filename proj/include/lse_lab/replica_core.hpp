#pragma once
// Symmetric saddle-point solver for the large-system distortion of
// regularized least-squares precoding over a constrained alphabet.
//
// The fixed point couples two scalars (q, chi) through a scalar denoiser:
//   e  = R(-chi) + lambda
//   f  = sqrt( gamma sigma_u^2 R(-chi) + (q - chi gamma sigma_u^2) R'(-chi) )
//   x^(z) = argmin_{x in X} | z - (e/f) x |          (z ~ CN(0,1))
//   chi = E[ Re x^(z) conj(z) ] / f,   q = E[ |x^(z)|^2 ]
// and the predicted distortion is
//   D = gamma sigma_u^2 + alpha * d/dchi [ (q - chi gamma sigma_u^2) chi R(-chi) ]
// with q held fixed in the derivative.
//
// The Gaussian averages are evaluated in polar coordinates with panel
// boundaries forced at the discontinuities of the denoiser (the clip radius
// of the disk set, the angular sector edges of the phase grid), Gauss-
// Legendre nodes per panel, and the Gaussian weight applied explicitly.
// This keeps the composite rule spectrally accurate even though the
// integrand is only piecewise smooth, which a plain tensor Hermite rule is
// not able to do at any practical order (the projection kinks sit off the
// Hermite nodes and limit it to ~1e-3).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lse_lab/constellation.hpp"
#include "lse_lab/quadrature.hpp"
#include "lse_lab/special.hpp"
#include "lse_lab/spectra.hpp"

namespace lse_lab {

struct RsConfig {
  double gamma = 1.0;      // receive gain (>= 0)
  double sigma_u2 = 1.0;   // data-symbol variance (> 0)
  double lambda = 0.0;     // quadratic penalty weight (>= 0)
  std::shared_ptr<const SpectrumModel> spectrum;
  int quad_order = 80;     // quadrature nodes per axis
  double damping = 0.5;    // Picard damping in (0, 1]
  double tol = 1e-9;
  int max_iter = 10000;
  std::vector<std::pair<double, double>> init_list = {{0.1, 0.1}, {1.0, 1.0}, {1.0, 10.0}};

  double gsu() const { return gamma * sigma_u2; }
  double alpha() const { return spectrum->alpha(); }
  void validate() const {
    if (!spectrum) throw std::invalid_argument("RsConfig: spectrum must be set");
    if (!(gamma >= 0.0)) throw std::invalid_argument("RsConfig: gamma must be >= 0");
    if (!(sigma_u2 > 0.0)) throw std::invalid_argument("RsConfig: sigma_u2 must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("RsConfig: lambda must be >= 0");
    if (quad_order < 8) throw std::invalid_argument("RsConfig: quad_order must be >= 8");
    if (!(tol > 0.0)) throw std::invalid_argument("RsConfig: tol must be > 0");
    if (!(damping > 0.0 && damping <= 1.0))
      throw std::invalid_argument("RsConfig: damping must be in (0, 1]");
    if (init_list.empty()) throw std::invalid_argument("RsConfig: init_list must be non-empty");
  }
};

inline std::shared_ptr<const SpectrumModel> mp_spectrum(double alpha) {
  return std::make_shared<MarchenkoPasturIid>(alpha);
}

struct RsSolution {
  double q = 0.0;
  double chi = 0.0;
  double f = 0.0;
  double e = 0.0;
  double D_rs = 0.0;
  double residual = 0.0;
  double entropy0 = 0.0;
  // Peak-power (disk) auxiliary scalars: c is the denoiser scale f/e, h the
  // first absolute output moment; NaN for solutions of other sets.
  double c = std::numeric_limits<double>::quiet_NaN();
  double h = std::numeric_limits<double>::quiet_NaN();
};

// Thrown when the symmetric branch has no finite solution (the phase-grid /
// constant-envelope susceptibility diverges at a finite load alpha*).
class DivergedRsError : public std::runtime_error {
 public:
  DivergedRsError(const std::string& msg, double alpha_star)
      : std::runtime_error(msg), alpha_star(alpha_star) {}
  double alpha_star;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------- scalar denoiser

struct ScalarMoments {
  double m1 = 0.0;  // E[ Re x^(c z) conj(z) ]
  double m2 = 0.0;  // E[ |x^(c z)|^2 ]
};

// Gaussian output moments of the constrained scalar denoiser at scale c.
// Polar product rule; panels are split at the denoiser's discontinuities.
inline ScalarMoments denoiser_moments(const Constellation& con, double c, int quad_order) {
  ScalarMoments out;
  if (!(c > 0.0)) {
    // Zero input scale: the disk / full-complex output is identically zero;
    // constant-modulus outputs keep |x| fixed but decorrelate from z.
    if (con.kind() == SetKind::Circle || con.kind() == SetKind::Mpsk) out.m2 = con.power();
    return out;
  }
  const int per_panel = std::min(16, quad_order);
  const int panels = std::max(1, quad_order / per_panel);
  const double rmax = 8.5;
  QuadNodes radial = radial_gaussian_grid(rmax, rmax / panels, per_panel,
                                          con.radial_breakpoints(c));
  QuadNodes angular = paneled_interval(0.0, 2.0 * kPi, 2.0 * kPi / panels, per_panel,
                                       con.angular_breakpoints());
  const double inv2pi = 1.0 / (2.0 * kPi);
  for (std::size_t a = 0; a < angular.size(); ++a) {
    const cplx dir = std::polar(1.0, angular.x[a]);
    const double wa = angular.w[a] * inv2pi;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double r = radial.x[i];
      const cplx xhat = con.project(c * r * dir);
      s1 += radial.w[i] * (xhat.real() * dir.real() + xhat.imag() * dir.imag()) * r;
      s2 += radial.w[i] * std::norm(xhat);
    }
    out.m1 += wa * s1;
    out.m2 += wa * s2;
  }
  return out;
}

// ------------------------------------------------------------- distortion

// D = gamma sigma_u^2 + alpha * d/dchi [ (q - chi gamma sigma_u^2) chi R(-chi) ],
// q held fixed.  Analytic derivative for the closed-form spectrum, central
// finite difference (h = 1e-6 max(1, chi)) otherwise.
inline double rs_distortion(double q, double chi, const RsConfig& cfg) {
  cfg.validate();
  if (!(chi >= 0.0)) throw std::domain_error("rs_distortion: chi must be >= 0");
  const SpectrumModel& S = *cfg.spectrum;
  const double gsu = cfg.gsu();
  if (S.analytic()) {
    const double r = S.r_neg(chi), rp = S.r_neg_derivative(chi);
    return gsu + S.alpha() * (-gsu * chi * r + (q - chi * gsu) * (r - chi * rp));
  }
  auto g = [&](double w) { return (q - w * gsu) * w * S.r_neg(w); };
  const double h = 1e-6 * std::max(1.0, chi);
  const double d = (chi >= h) ? (g(chi + h) - g(chi - h)) / (2.0 * h)
                              : (g(chi + h) - g(chi)) / h;
  return gsu + S.alpha() * d;
}

inline double zero_temperature_entropy(double zeta, const RsConfig& cfg) {
  cfg.validate();
  return zero_temperature_entropy(zeta, *cfg.spectrum);
}

// ------------------------------------------------- closed-form chi values

// Susceptibility of the M-point phase grid (q = p): finite only below the
// load threshold alpha* = 4 pi (p + gamma sigma_u^2) / (p M^2 sin^2(pi/M)).
inline double rs_chi_mpsk(int M, double p, double gamma_sigma_u2, double alpha) {
  if (M < 2) throw std::invalid_argument("rs_chi_mpsk: M must be >= 2");
  if (!(p > 0.0) || !(alpha > 0.0) || !(gamma_sigma_u2 >= 0.0))
    throw std::invalid_argument("rs_chi_mpsk: invalid parameters");
  const double q = p;
  const double ms = M * std::sin(kPi / M);
  const double A = (2.0 / ms) * std::sqrt(kPi * (q + gamma_sigma_u2) / (q * alpha));
  if (!(A > 1.0)) {
    const double alpha_star = 4.0 * kPi * (q + gamma_sigma_u2) / (q * ms * ms);
    std::ostringstream os;
    os << "RS branch divergent, alpha* = " << alpha_star;
    throw DivergedRsError(os.str(), alpha_star);
  }
  return 1.0 / (A - 1.0);
}

// Constant-envelope (M -> infinity) limit of the phase grid.
inline double rs_chi_constant_envelope(double p, double gamma_sigma_u2, double alpha) {
  if (!(p > 0.0) || !(alpha > 0.0) || !(gamma_sigma_u2 >= 0.0))
    throw std::invalid_argument("rs_chi_constant_envelope: invalid parameters");
  const double q = p;
  const double A = 2.0 * std::sqrt((q + gamma_sigma_u2) / (kPi * q * alpha));
  if (!(A > 1.0)) {
    const double alpha_star = 4.0 * (q + gamma_sigma_u2) / (kPi * q);
    std::ostringstream os;
    os << "RS branch divergent, alpha* = " << alpha_star;
    throw DivergedRsError(os.str(), alpha_star);
  }
  return 1.0 / (A - 1.0);
}

// --------------------------------------------------------- generic solver

namespace detail {

struct RsIterState {
  double q = 0.0, chi = 0.0, f = 0.0, e = 0.0, residual = 0.0;
  bool converged = false;
  std::string note;
};

// Damped Picard iteration from one starting point; omega is halved when the
// residual grows or the f^2 expression leaves its domain.
inline RsIterState rs_iterate(const Constellation& con, const RsConfig& cfg, double q0,
                              double chi0) {
  const SpectrumModel& S = *cfg.spectrum;
  const double gsu = cfg.gsu();
  const double lam = con.lambda_active() ? cfg.lambda : 0.0;
  const double kChiCap = 1e9;
  RsIterState st;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const double omega0 = cfg.damping * std::pow(0.5, attempt);
    double omega = omega0;
    double q = q0, chi = chi0;
    double prev_res = std::numeric_limits<double>::infinity();
    bool domain_fault = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      const double r = S.r_neg(chi);
      const double rp = S.r_neg_derivative(chi);
      const double e = r + lam;
      const double f2 = gsu * r + (q - chi * gsu) * rp;
      if (!(f2 > 0.0) || !std::isfinite(f2)) {
        st.note = "f^2 = " + std::to_string(f2) + " outside domain at (q=" +
                  std::to_string(q) + ", chi=" + std::to_string(chi) + ")";
        domain_fault = true;
        break;
      }
      const double f = std::sqrt(f2);
      const ScalarMoments mm = denoiser_moments(con, f / e, cfg.quad_order);
      const double q_new = mm.m2;
      const double chi_new = mm.m1 / f;
      const double res = std::abs(q_new - q) + std::abs(chi_new - chi);
      st.q = q;
      st.chi = chi;
      st.f = f;
      st.e = e;
      st.residual = res;
      // Iterate somewhat past the requested tolerance so the returned point
      // is a fixed point to well under tol even after quadrature refinement.
      if (res < std::min(cfg.tol, 1e-11) || (res < cfg.tol && it + 1 == cfg.max_iter)) {
        st.converged = true;
        return st;
      }
      if (res > prev_res) omega = std::max(0.05, 0.5 * omega);
      prev_res = res;
      q = std::max(0.0, q + omega * (q_new - q));
      chi = std::max(0.0, chi + omega * (chi_new - chi));
      if (chi > kChiCap) {
        st.note = "chi exceeded " + std::to_string(kChiCap) + " (divergent branch)";
        return st;
      }
    }
    if (!domain_fault) return st;  // ran out of iterations (residual recorded)
  }
  return st;
}

}  // namespace detail

inline RsSolution finalize_rs(const Constellation& con, const RsConfig& cfg, double q,
                              double chi, double residual) {
  const SpectrumModel& S = *cfg.spectrum;
  const double lam = con.lambda_active() ? cfg.lambda : 0.0;
  RsSolution sol;
  sol.q = q;
  sol.chi = chi;
  sol.e = S.r_neg(chi) + lam;
  const double f2 = cfg.gsu() * S.r_neg(chi) + (q - chi * cfg.gsu()) * S.r_neg_derivative(chi);
  sol.f = std::sqrt(std::max(0.0, f2));
  sol.D_rs = rs_distortion(q, chi, cfg);
  sol.residual = residual;
  sol.entropy0 = zero_temperature_entropy(chi, *cfg.spectrum);
  return sol;
}

// Multi-start damped Picard solve of the (q, chi) fixed point; among the
// converged runs, returns the solution with the smallest predicted
// distortion (ties: smaller chi).
inline RsSolution solve_rs_generic(const Constellation& con, const RsConfig& cfg) {
  cfg.validate();
  std::vector<RsSolution> winners;
  std::ostringstream trace;
  bool any_diverged = false;
  for (std::size_t i = 0; i < cfg.init_list.size(); ++i) {
    const auto [q0, chi0] = cfg.init_list[i];
    detail::RsIterState st = detail::rs_iterate(con, cfg, q0, chi0);
    trace << "  init " << i << " (q0=" << q0 << ", chi0=" << chi0
          << "): residual=" << st.residual;
    if (!st.note.empty()) trace << " [" << st.note << "]";
    trace << (st.converged ? " converged" : " FAILED") << "\n";
    if (st.note.find("divergent") != std::string::npos) any_diverged = true;
    if (st.converged) winners.push_back(finalize_rs(con, cfg, st.q, st.chi, st.residual));
  }
  if (winners.empty()) {
    if (any_diverged && con.kind() == SetKind::Mpsk && cfg.spectrum->analytic()) {
      // Report the closed-form divergence threshold for the phase grid.
      rs_chi_mpsk(con.M(), con.power(), cfg.gsu(), cfg.alpha());  // throws DivergedRsError
    }
    if (any_diverged && con.kind() == SetKind::Circle && cfg.spectrum->analytic()) {
      rs_chi_constant_envelope(con.power(), cfg.gsu(), cfg.alpha());
    }
    throw ConvergenceError("solve_rs_generic: no initialization converged\n" + trace.str());
  }
  const RsSolution* best = &winners.front();
  for (const RsSolution& w : winners) {
    const double tie = 1e-10 * std::max(1.0, std::abs(best->D_rs));
    if (w.D_rs < best->D_rs - tie || (std::abs(w.D_rs - best->D_rs) <= tie && w.chi < best->chi))
      best = &w;
  }
  return *best;
}

// ------------------------------------------------------ peak-power solver

// Closed-form specialization for the disk set under the iid spectrum: the
// Gaussian averages reduce to erfc / exp expressions in the scale
// c = sqrt(alpha (q + gamma sigma_u^2)) / (alpha lambda (1 + chi) + 1):
//   h  = c (1 - e^{-P/c^2}) + sqrt(P pi) Q(sqrt(2P)/c)
//   q  = c^2 (1 - e^{-P/c^2})
//   chi = h (1 + chi) sqrt(alpha / (q + gamma sigma_u^2))
// where Q is the Gaussian tail.  D = (q + gamma sigma_u^2)/(1+chi)^2.
inline RsSolution solve_rs_peak(double P, const RsConfig& cfg) {
  cfg.validate();
  if (!(P > 0.0)) throw std::invalid_argument("solve_rs_peak: P must be > 0");
  if (!cfg.spectrum->analytic())
    throw std::invalid_argument("solve_rs_peak: requires the closed-form iid spectrum");
  const double alpha = cfg.alpha();
  const double gsu = cfg.gsu();
  auto cs = [&](double q, double chi) {
    return std::sqrt(alpha * (q + gsu)) / (alpha * cfg.lambda * (1.0 + chi) + 1.0);
  };
  auto moments = [&](double c) {  // {h, q}
    if (!(c > 0.0)) return std::pair<double, double>(0.0, 0.0);
    const double t = P / (c * c);
    const double omexp = one_minus_exp_neg(t);
    const double h = c * omexp + std::sqrt(P * kPi) * gauss_tail(std::sqrt(2.0 * P) / c);
    return std::pair<double, double>(h, c * c * omexp);
  };

  std::ostringstream trace;
  std::vector<RsSolution> winners;
  // The closed-form map costs a handful of flops per sweep, but near the
  // marginal load where the zero-penalty susceptibility turns divergent its
  // contraction rate approaches 1, so the sweep budget is raised well above
  // the generic solver's default.
  const int sweep_cap = std::max(cfg.max_iter, 400000);
  for (std::size_t i = 0; i < cfg.init_list.size(); ++i) {
    auto [q, chi] = cfg.init_list[i];
    const double omega = cfg.damping;
    double res = std::numeric_limits<double>::infinity();
    double c = 0.0, h = 0.0;
    bool converged = false;
    for (int it = 0; it < sweep_cap; ++it) {
      c = cs(q, chi);
      auto [h_, q_new] = moments(c);
      h = h_;
      const double chi_new = h * (1.0 + chi) * std::sqrt(alpha / (q + gsu));
      // Relative step residual: chi grows like 1/(alpha lambda) as the
      // penalty vanishes, where an absolute criterion sits below the
      // floating-point noise floor.
      res = std::abs(q_new - q) / std::max(1.0, std::abs(q)) +
            std::abs(chi_new - chi) / std::max(1.0, std::abs(chi));
      if (res < std::min(cfg.tol, 1e-12)) {
        converged = true;
        break;
      }
      q = std::max(0.0, q + omega * (q_new - q));
      chi = std::max(0.0, chi + omega * (chi_new - chi));
    }
    trace << "  init " << i << ": residual=" << res << (converged ? " converged" : " FAILED")
          << "\n";
    if (converged) {
      RsSolution sol = finalize_rs(Constellation::disk(P), cfg, q, chi, res);
      sol.c = c;
      sol.h = h;
      winners.push_back(sol);
    }
  }
  if (winners.empty())
    throw ConvergenceError("solve_rs_peak: no initialization converged\n" + trace.str());
  const RsSolution* best = &winners.front();
  for (const RsSolution& w : winners) {
    const double tie = 1e-10 * std::max(1.0, std::abs(best->D_rs));
    if (w.D_rs < best->D_rs - tie || (std::abs(w.D_rs - best->D_rs) <= tie && w.chi < best->chi))
      best = &w;
  }
  return *best;
}

// Convenience: full solution for a phase-grid or constant-envelope set from
// the closed-form susceptibility (q = p).
inline RsSolution rs_solution_mpsk(int M, double p, const RsConfig& cfg) {
  cfg.validate();
  const double chi = rs_chi_mpsk(M, p, cfg.gsu(), cfg.alpha());
  return finalize_rs(Constellation::mpsk(M, p), cfg, p, chi, 0.0);
}

inline RsSolution rs_solution_constant_envelope(double p, const RsConfig& cfg) {
  cfg.validate();
  const double chi = rs_chi_constant_envelope(p, cfg.gsu(), cfg.alpha());
  return finalize_rs(Constellation::circle(p), cfg, p, chi, 0.0);
}

}  // namespace lse_lab
