#pragma once
// One-step broken-symmetry saddle point for discrete and constant-modulus
// alphabets.  Four order parameters (q1, p1, chi1, mu1), with
// eta1 = chi1 + mu1 p1 and conjugates
//   e1   = R(-chi1) + lambda
//   f1^2 = gamma sigma_u^2 R(-eta1) + (q1 - gamma sigma_u^2 eta1) R'(-eta1)
//   g1^2 = [R(-chi1) - R(-eta1)] / mu1.
// The tilted single-symbol measure is
//   Y(y, z) = exp( -mu1 min_{x in X} [ e1 |x|^2 - 2 Re x*(f1 z + g1 y) ] ),
// y, z ~ CN(0,1).  Three moment equations close (q1, p1, chi1) at fixed mu1
// (damped Picard), and mu1 itself is pinned by the scalar stationarity
// condition ("fourth equation")
//   int_{chi1}^{eta1} R(-w) dw  =  E_z log int Y dy
//     + (mu1 q1 + 2 eta1 - 2 mu1 gamma sigma_u^2 eta1) R(-eta1)
//     - 2 chi1 R(-chi1) - 2 mu1 eta1 (q1 - gamma sigma_u^2 eta1) R'(-eta1)
//     + lambda mu1 (p1 + q1)
// solved by bracketed secant over a geometric mu1 scan.
//
// Inner Gaussian integrals:
//  * two-point alphabet: the y-integrals are Gaussian tails (erfc) in closed
//    form, leaving a single real z-axis (imaginary parts decouple);
//  * M-point phase grid: wedge decomposition around each grid direction with
//    a closed-form erf cross-section, leaving smooth 1-D integrals per wedge
//    (validated against the two-point closed form at M=2);
//  * circle: polar decomposition with scaled Bessel I0/I1 cross-sections.
// All exponentials are evaluated under a per-sample log shift; panels whose
// exponent bound is below e^-45 of the shift are skipped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lse_lab/constellation.hpp"
#include "lse_lab/quadrature.hpp"
#include "lse_lab/replica_core.hpp"
#include "lse_lab/special.hpp"
#include "lse_lab/spectra.hpp"

namespace lse_lab {

struct RsbSolution {
  double q1 = 0.0, p1 = 0.0, chi1 = 0.0, mu1 = 0.0, eta1 = 0.0;
  double e1 = 0.0, f1 = 0.0, g1 = 0.0;
  double D_rsb = 0.0;
  double entropy0 = 0.0;           // H0 at zeta = chi1
  double residual = 0.0;           // moment-equation residual of the inner solve
  double fourth_residual = 0.0;    // stationarity residual at the returned mu1
  double fourth_alt = 0.0;         // alternative grouping of the same sum (diagnostic)
  int scan_points = 0;
  int secant_steps = 0;
};

class RsbBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RsbDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Predicted distortion of a valid broken-symmetry point.
inline double rsb_distortion(const RsbSolution& sol, const RsConfig& cfg) {
  cfg.validate();
  if (!(sol.mu1 > 0.0))
    throw std::invalid_argument("rsb_distortion: mu1 must be > 0 (use the symmetric path)");
  const SpectrumModel& S = *cfg.spectrum;
  const double gsu = cfg.gsu(), alpha = S.alpha();
  const double eta1 = sol.chi1 + sol.mu1 * sol.p1;
  const double r_c = S.r_neg(sol.chi1), r_e = S.r_neg(eta1), rp_e = S.r_neg_derivative(eta1);
  return gsu - (alpha * sol.chi1 / sol.mu1) * r_c +
         alpha * (sol.q1 + eta1 / sol.mu1 - 2.0 * gsu * eta1) * r_e -
         alpha * eta1 * (sol.q1 - gsu * eta1) * rp_e;
}

namespace detail_rsb {

struct RsbMoments {
  double Mz = 0.0;  // E[ Re z* x^ ] under the tilted measure
  double My = 0.0;  // E[ Re y* x^ ]
  double El = 0.0;  // E_z log int Y dy
};

class InnerEngine {
 public:
  virtual ~InnerEngine() = default;
  virtual RsbMoments moments(double f1, double g1, double mu1, double e1) const = 0;
};

// --------------------------- two-point alphabet (real-axis specialization)

// x^ = sqrt(p) sign(...); the y-integral over each half-line is a Gaussian
// tail.  With a = 2 mu1 sqrt(p), b = a g1 / 2, ys = -f1 z / g1:
//   S propto e^{a f1 z} erfc(ys - b) + e^{-a f1 z} erfc(-ys - b)
// and the sign moment / y moment follow from the same two branches.
class TwoPointEngine final : public InnerEngine {
 public:
  TwoPointEngine(double p, int ro)
      : p_(p), grid_(line_gaussian_grid(8.5, 32.0 / ro, std::min(16, ro))) {}

  RsbMoments moments(double f1, double g1, double mu1, double e1) const override {
    const double a = 2.0 * mu1 * std::sqrt(p_);
    const double b = 0.5 * a * g1;
    const double r = std::sqrt(p_);
    RsbMoments out;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double z = grid_.x[i], w = grid_.w[i];
      const double ys = -f1 * z / g1;
      const double lu = a * f1 * z + log_erfc(ys - b);
      const double ll = -a * f1 * z + log_erfc(-ys - b);
      const double m = std::max(lu, ll);
      const double eu = std::exp(lu - m), el = std::exp(ll - m);
      const double S = eu + el;
      const double gup = std::exp(-(ys - b) * (ys - b) - m + a * f1 * z) * kInvSqrtPi;
      const double glo = std::exp(-(ys + b) * (ys + b) - m - a * f1 * z) * kInvSqrtPi;
      const double logS = b * b - 0.6931471805599453094 + m + std::log(S);
      out.Mz += w * r * z * (eu - el) / S;
      out.My += w * r * (gup + glo + b * S) / S;
      out.El += w * (-mu1 * e1 * p_ + logS);
    }
    return out;
  }

 private:
  double p_;
  QuadNodes grid_;
};

// ------------------------------------- M-point phase grid (wedge engine)

// For v = f1 z + g1 y write t = y + c, c = f1 z / g1 (so v = g1 t).  The
// tilt selects x^ = sqrt(p) e^{j th_s} on the wedge |arg(t e^{-j th_s})| <
// pi/M; rotating tau = t e^{-j th_s} and splitting tau = u + j w gives a
// closed-form erf cross-section in w and smooth 1-D integrals in u > 0.
// Outer z-plane reduced to arg z in [0, pi/M] by the dihedral symmetry.
class WedgeEngine final : public InnerEngine {
 public:
  WedgeEngine(int M, double p, int ro) : M_(M), p_(p), wu_(32.0 / ro) {
    const double beta = kPi / M;
    const QuadNodes& ang = gauss_legendre(std::max(6, ro / 4));
    QuadNodes rad = paneled_interval(0.0, 8.5, wu_, 12);
    for (std::size_t i = 0; i < rad.size(); ++i)
      rad.w[i] *= rad.x[i] * std::exp(-rad.x[i] * rad.x[i]);
    for (std::size_t a = 0; a < ang.size(); ++a) {
      const double psi = 0.5 * beta * (ang.x[a] + 1.0);
      const double wpsi = 0.5 * beta * ang.w[a];
      for (std::size_t i = 0; i < rad.size(); ++i) {
        z_.push_back(std::polar(rad.x[i], psi));
        wz_.push_back((2.0 * M / kPi) * wpsi * rad.w[i]);
      }
    }
    for (int s = 0; s < M; ++s) phase_.push_back(Constellation::unit_phase(s, M));
    tanb_ = (M > 2) ? std::tan(beta) : 0.0;
  }

  RsbMoments moments(double f1, double g1, double mu1, double e1) const override {
    const double a = 2.0 * mu1 * std::sqrt(p_);
    const double b = 0.5 * a * g1;
    const double r = std::sqrt(p_);
    const QuadNodes& gl = gauss_legendre(12);
    RsbMoments out;
    std::vector<double> mass(M_), m1u(M_), csr(M_), csi(M_);
    for (std::size_t iz = 0; iz < z_.size(); ++iz) {
      const cplx c = f1 * z_[iz] / g1;
      double shift = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < M_; ++s) {
        const cplx cs = c * std::conj(phase_[s]);
        csr[s] = cs.real();
        csi[s] = cs.imag();
        shift = std::max(shift, b * b + 2.0 * b * std::max(csr[s], 0.0));
      }
      for (int s = 0; s < M_; ++s) {
        double ms = 0.0, m1s = 0.0;
        const double ustar = csr[s] + b;
        const double peak = b * b + 2.0 * b * csr[s];
        const double umax = std::max(csr[s], 0.0) + b + 8.5;
        const int npan = std::max(1, static_cast<int>(std::ceil(umax / wu_)));
        const double h = umax / npan;
        for (int j = 0; j < npan; ++j) {
          const double pa = j * h, pb = pa + h;
          const double d = (ustar < pa) ? pa - ustar : (ustar > pb ? ustar - pb : 0.0);
          if (peak - d * d - shift < -45.0) continue;
          for (std::size_t k = 0; k < gl.size(); ++k) {
            const double u = pa + 0.5 * h * (gl.x[k] + 1.0);
            const double ww = 0.5 * h * gl.w[k];
            const double ex = std::exp(2.0 * b * u - (u - csr[s]) * (u - csr[s]) - shift) * ww;
            double inner0;
            if (M_ == 2) {
              inner0 = kSqrtPi;
            } else {
              inner0 = 0.5 * kSqrtPi *
                       (std::erf(u * tanb_ - csi[s]) - std::erf(-u * tanb_ - csi[s]));
            }
            ms += ex * inner0;
            m1s += ex * inner0 * u;
          }
        }
        mass[s] = ms / kPi;
        m1u[s] = m1s / kPi;
      }
      double tot = 0.0, my_num = 0.0;
      cplx xav(0.0, 0.0);
      for (int s = 0; s < M_; ++s) {
        tot += mass[s];
        my_num += m1u[s] - csr[s] * mass[s];
        xav += phase_[s] * mass[s];
      }
      xav *= r / tot;
      const cplx zc = z_[iz];
      out.Mz += wz_[iz] * (zc.real() * xav.real() + zc.imag() * xav.imag());
      out.My += wz_[iz] * r * my_num / tot;
      out.El += wz_[iz] * (-mu1 * e1 * p_ + shift + std::log(tot));
    }
    return out;
  }

 private:
  int M_;
  double p_;
  double wu_;
  double tanb_;
  std::vector<cplx> z_, phase_;
  std::vector<double> wz_;
};

// ------------------------------------------ constant-modulus circle engine

// x^ = sqrt(P) v/|v|; polar decomposition of t = y + c gives Bessel
// cross-sections:  mass ~ int du 2u e^{-(u-(cr+b))^2} i0e(2 u cr), the
// direction moment the same with i1e, the |t| moment with an extra u.
// Rotation symmetry reduces the outer z average to a 1-D radial grid.
class CircleEngine final : public InnerEngine {
 public:
  CircleEngine(double P, int ro)
      : P_(P), wu_(32.0 / ro), grid_(radial_gaussian_grid(8.5, 32.0 / ro, 12)) {}

  RsbMoments moments(double f1, double g1, double mu1, double e1) const override {
    const double a = 2.0 * mu1 * std::sqrt(P_);
    const double b = 0.5 * a * g1;
    const double r = std::sqrt(P_);
    const QuadNodes& gl = gauss_legendre(12);
    RsbMoments out;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double rho = grid_.x[i], w = grid_.w[i];
      const double cr = f1 * rho / g1;
      const double ustar = cr + b;
      const double shift = b * b + 2.0 * b * cr;  // exponent peak; expo = -(u - ustar)^2
      const double umax = ustar + 8.5;
      const int npan = std::max(1, static_cast<int>(std::ceil(umax / wu_)));
      const double h = umax / npan;
      double m0 = 0.0, mI1 = 0.0, m1u = 0.0;
      for (int j = 0; j < npan; ++j) {
        const double pa = j * h, pb = pa + h;
        const double d = (ustar < pa) ? pa - ustar : (ustar > pb ? ustar - pb : 0.0);
        if (-d * d < -45.0) continue;
        for (std::size_t k = 0; k < gl.size(); ++k) {
          const double u = pa + 0.5 * h * (gl.x[k] + 1.0);
          const double ex = std::exp(-(u - ustar) * (u - ustar)) * 0.5 * h * gl.w[k] * 2.0 * u;
          const double arg = 2.0 * u * cr;
          const double i0 = bessel_i0_scaled(arg);
          m0 += ex * i0;
          mI1 += ex * bessel_i1_scaled(arg);
          m1u += ex * u * i0;
        }
      }
      out.Mz += w * rho * r * mI1 / m0;
      out.My += w * r * (m1u - cr * mI1) / m0;
      out.El += w * (-mu1 * e1 * P_ + shift + std::log(m0));
    }
    return out;
  }

 private:
  double P_;
  double wu_;
  QuadNodes grid_;
};

inline std::unique_ptr<InnerEngine> make_engine(const Constellation& con, int ro) {
  switch (con.kind()) {
    case SetKind::Mpsk:
      if (con.M() == 2) return std::make_unique<TwoPointEngine>(con.power(), ro);
      return std::make_unique<WedgeEngine>(con.M(), con.power(), ro);
    case SetKind::Circle:
      return std::make_unique<CircleEngine>(con.power(), ro);
    default:
      throw std::invalid_argument(
          "solve_rsb1: only constant-modulus sets (phase grid / circle) are supported");
  }
}

// Inner damped Picard on (q1, chi1) at fixed mu1, then the stationarity
// residual of the fourth equation at the converged point.
struct InnerResult {
  double chi1 = 0.0, q1 = 0.0, p1 = 0.0, eta1 = 0.0;
  double e1 = 0.0, f1 = 0.0, g1 = 0.0;
  double FA = 0.0, FP = 0.0, D = 0.0;
  double resid = std::numeric_limits<double>::infinity();
  int iters = 0;
  bool ok = false;
  std::string note;
};

inline InnerResult picard_fixed_mu(const InnerEngine& eng, const SpectrumModel& S, double p,
                                   double gsu, double mu1, double chi0, double q0, double tol,
                                   int itmax, double om) {
  InnerResult st;
  const double alpha = S.alpha();
  double chi1 = chi0, q1 = q0;
  for (int it = 0; it < itmax; ++it) {
    st.iters = it + 1;
    q1 = std::min(std::max(q1, 1e-14), p - 1e-14);
    const double p1 = p - q1;
    const double eta1 = chi1 + mu1 * p1;
    const double r_c = S.r_neg(chi1), r_e = S.r_neg(eta1), rp_e = S.r_neg_derivative(eta1);
    const double e1 = r_c;
    const double f1sq = gsu * r_e + (q1 - gsu * eta1) * rp_e;
    const double g1sq = (r_c - r_e) / mu1;
    if (!(f1sq > 0.0) || !(g1sq > 0.0)) {
      std::ostringstream os;
      os << "conjugate-parameter domain fault at mu1=" << mu1 << ": f1^2=" << f1sq
         << ", g1^2=" << g1sq << " (chi1=" << chi1 << ", q1=" << q1 << ")";
      st.note = os.str();
      return st;
    }
    const double f1 = std::sqrt(f1sq), g1 = std::sqrt(g1sq);
    const RsbMoments mm = eng.moments(f1, g1, mu1, e1);
    const double eta_n = mm.Mz / f1;
    double q1_n = (mm.My / g1 - mm.Mz / f1) / mu1;
    q1_n = std::min(std::max(q1_n, 1e-14), p - 1e-14);
    const double chi_n = eta_n - mu1 * (p - q1_n);
    st.resid = std::abs(chi_n - chi1) + std::abs(q1_n - q1);
    if (st.resid < tol) break;
    chi1 = std::max((1.0 - om) * chi1 + om * chi_n, 1e-9);
    q1 = (1.0 - om) * q1 + om * q1_n;
  }
  // Final consistent evaluation + fourth-equation residual.
  q1 = std::min(std::max(q1, 1e-14), p - 1e-14);
  const double p1 = p - q1;
  const double eta1 = chi1 + mu1 * p1;
  const double r_c = S.r_neg(chi1), r_e = S.r_neg(eta1), rp_e = S.r_neg_derivative(eta1);
  const double f1sq = gsu * r_e + (q1 - gsu * eta1) * rp_e;
  const double g1sq = (r_c - r_e) / mu1;
  if (!(f1sq > 0.0) || !(g1sq > 0.0)) {
    st.note = "conjugate-parameter domain fault at final point";
    return st;
  }
  st.chi1 = chi1;
  st.q1 = q1;
  st.p1 = p1;
  st.eta1 = eta1;
  st.e1 = r_c;
  st.f1 = std::sqrt(f1sq);
  st.g1 = std::sqrt(g1sq);
  const RsbMoments mm = eng.moments(st.f1, st.g1, mu1, st.e1);
  const double lhs = S.r_neg_integral(chi1, eta1);
  const double base = mu1 * q1 + 2.0 * eta1 - 2.0 * mu1 * gsu * eta1;
  const double common =
      mm.El - 2.0 * chi1 * r_c - 2.0 * mu1 * eta1 * (q1 - gsu * eta1) * rp_e;
  st.FA = lhs - (common + base * r_e);
  st.FP = lhs - (common + (base - 2.0 * chi1 * mu1 * gsu) * r_e);
  st.D = gsu - (alpha * chi1 / mu1) * r_c +
         alpha * (q1 + eta1 / mu1 - 2.0 * gsu * eta1) * r_e -
         alpha * eta1 * (q1 - gsu * eta1) * rp_e;
  st.ok = true;
  return st;
}

}  // namespace detail_rsb

// Broken-symmetry point at a caller-chosen mu1 (no stationarity root-find);
// exposes the inner fixed point and its fourth-equation residual.  Used for
// the mu1 -> 0 degeneration check and for scan diagnostics.
inline RsbSolution rsb_at_fixed_mu(const Constellation& con, const RsConfig& cfg, double mu1,
                                   int rsb_quad_order, double chi_seed, double q_seed) {
  cfg.validate();
  if (!(mu1 > 0.0)) throw std::invalid_argument("rsb_at_fixed_mu: mu1 must be > 0");
  if (rsb_quad_order < 8) throw std::invalid_argument("rsb_quad_order must be >= 8");
  auto eng = detail_rsb::make_engine(con, rsb_quad_order);
  const double tol = std::max(1e-13, 0.01 * cfg.tol);
  detail_rsb::InnerResult r =
      detail_rsb::picard_fixed_mu(*eng, *cfg.spectrum, con.power(), cfg.gsu(), mu1, chi_seed,
                                  q_seed, tol, 2 * cfg.max_iter, cfg.damping);
  if (!r.ok) throw RsbDomainError("rsb_at_fixed_mu: " + r.note);
  RsbSolution sol;
  sol.q1 = r.q1;
  sol.p1 = r.p1;
  sol.chi1 = r.chi1;
  sol.mu1 = mu1;
  sol.eta1 = r.eta1;
  sol.e1 = r.e1;
  sol.f1 = r.f1;
  sol.g1 = r.g1;
  sol.D_rsb = r.D;
  sol.entropy0 = zero_temperature_entropy(r.chi1, *cfg.spectrum);
  sol.residual = r.resid;
  sol.fourth_residual = r.FA;
  sol.fourth_alt = r.FP;
  return sol;
}

// Full solve: geometric mu1 scan with continuation seeding until the
// stationarity residual changes sign (requiring a healthy p1 > 1e-7 on both
// ends), then bracketed secant (Illinois) on mu1 to relative width 1e-8.
inline RsbSolution solve_rsb1(const Constellation& con, const RsConfig& cfg,
                              int rsb_quad_order = 32) {
  cfg.validate();
  if (rsb_quad_order < 8) throw std::invalid_argument("rsb_quad_order must be >= 8");
  if (con.kind() != SetKind::Mpsk && con.kind() != SetKind::Circle)
    throw std::invalid_argument(
        "solve_rsb1: only constant-modulus sets (phase grid / circle) are supported");
  const SpectrumModel& S = *cfg.spectrum;
  const double p = con.power(), gsu = cfg.gsu(), alpha = S.alpha();
  auto eng = detail_rsb::make_engine(con, rsb_quad_order);
  const double tol = std::max(1e-13, 0.01 * cfg.tol);
  const int itmax = 2 * cfg.max_iter;

  // Seed near the symmetric solution when it exists.
  double chi0 = 2.0, q0 = 0.85 * p;
  try {
    const double chi_rs = (con.kind() == SetKind::Mpsk)
                              ? rs_chi_mpsk(con.M(), p, gsu, alpha)
                              : rs_chi_constant_envelope(p, gsu, alpha);
    chi0 = 0.8 * chi_rs;
  } catch (const DivergedRsError&) {
    // above the symmetric-branch threshold: generic seed
  }

  // Load-adaptive scan range: the stationarity root grows roughly
  // geometrically in the effective load (phase-grid load scaling
  // alpha M^2 sin^2(pi/M)/4; circle is the M -> infinity limit).
  const double load_scale =
      (con.kind() == SetKind::Mpsk)
          ? 0.25 * con.M() * con.M() * std::pow(std::sin(kPi / con.M()), 2)
          : 0.25 * kPi * kPi;
  const double alpha_eff = alpha * load_scale;
  const double mu_lo = 0.05;
  const double mu_hi = std::max(120.0, 80.0 * std::pow(2.0, alpha_eff - 5.0));
  const int npts = std::max(25, static_cast<int>(std::ceil(3.5 * std::log2(mu_hi / mu_lo))));

  std::ostringstream profile;
  profile << "mu1 scan (" << con.name() << ", alpha=" << alpha << "):\n";
  detail_rsb::InnerResult lo_row, hi_row, prev;
  double lo_mu = 0.0, hi_mu = 0.0, prev_mu = 0.0;
  bool have_bracket = false, have_prev = false;
  int scanned = 0;
  for (int i = 0; i < npts && !have_bracket; ++i) {
    const double mu = mu_lo * std::pow(mu_hi / mu_lo, i / (npts - 1.0));
    detail_rsb::InnerResult r = detail_rsb::picard_fixed_mu(*eng, S, p, gsu, mu, chi0, q0, tol,
                                                            itmax, cfg.damping);
    ++scanned;
    if (!r.ok) {
      profile << "  mu1=" << mu << "  " << r.note << "\n";
      continue;
    }
    profile << "  mu1=" << mu << "  chi1=" << r.chi1 << "  q1=" << r.q1 << "  p1=" << r.p1
            << "  resid=" << r.resid << "  stationarity=" << r.FA << "\n";
    if (r.p1 > 1e-8) {
      chi0 = r.chi1;
      q0 = r.q1;
    }
    if (have_prev && prev.FA * r.FA < 0.0 && prev.p1 > 1e-7 && r.p1 > 1e-7) {
      lo_row = prev;
      hi_row = r;
      lo_mu = prev_mu;
      hi_mu = mu;
      have_bracket = true;
    }
    prev = r;
    prev_mu = mu;
    have_prev = true;
  }
  if (!have_bracket)
    throw RsbBracketError(
        "solve_rsb1: no sign change of the stationarity residual on the mu1 scan "
        "(the broken-symmetry branch may not exist at these parameters)\n" +
        profile.str());

  double lo = lo_mu, hi = hi_mu;
  double flo = lo_row.FA, fhi = hi_row.FA;
  chi0 = lo_row.chi1;
  q0 = lo_row.q1;
  detail_rsb::InnerResult best = (std::abs(flo) < std::abs(fhi)) ? lo_row : hi_row;
  double best_mu = (std::abs(flo) < std::abs(fhi)) ? lo : hi;
  int steps = 0;
  for (; steps < 200; ++steps) {
    if (hi - lo < 1e-8 * std::max(1.0, hi)) break;
    double mid = lo + (hi - lo) * (-flo) / (fhi - flo);  // secant within the bracket
    const double margin = 0.05 * (hi - lo);
    mid = std::min(std::max(mid, lo + margin), hi - margin);
    detail_rsb::InnerResult r = detail_rsb::picard_fixed_mu(*eng, S, p, gsu, mid, chi0, q0, tol,
                                                            itmax, cfg.damping);
    if (!r.ok) throw RsbDomainError("solve_rsb1: " + r.note);
    chi0 = r.chi1;
    q0 = r.q1;
    if (std::abs(r.FA) < std::abs(best.FA)) {
      best = r;
      best_mu = mid;
    }
    if (r.FA * flo > 0.0) {
      lo = mid;
      flo = r.FA;
      fhi *= 0.5;  // Illinois weighting keeps the secant from stalling at one end
    } else {
      hi = mid;
      fhi = r.FA;
      flo *= 0.5;
    }
  }

  RsbSolution sol;
  sol.q1 = best.q1;
  sol.p1 = best.p1;
  sol.chi1 = best.chi1;
  sol.mu1 = best_mu;
  sol.eta1 = best.eta1;
  sol.e1 = best.e1;
  sol.f1 = best.f1;
  sol.g1 = best.g1;
  sol.entropy0 = zero_temperature_entropy(best.chi1, S);
  sol.residual = best.resid;
  sol.fourth_residual = best.FA;
  sol.fourth_alt = best.FP;
  sol.scan_points = scanned;
  sol.secant_steps = steps;
  sol.D_rsb = rsb_distortion(sol, cfg);
  return sol;
}

}  // namespace lse_lab
