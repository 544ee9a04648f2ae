#pragma once
// Experiment harness tying the large-system predictions to finite-size
// simulation: Monte Carlo distortion of the concrete precoders, tuning of the
// penalty weight and gain, the achievable-rate lower bound, the
// union-bound distortion floor for phase grids, the multicarrier Gramian
// spectrum comparison, and the power-decay exponent fit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lse_lab/constellation.hpp"
#include "lse_lab/precoders.hpp"
#include "lse_lab/replica_core.hpp"
#include "lse_lab/replica_rsb.hpp"
#include "lse_lab/rng.hpp"

namespace lse_lab {

// Numerical failure of an experiment (as opposed to invalid usage, which
// raises std::invalid_argument).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------- RS dispatcher

// Best available RS solver for a constellation: closed forms where the iid
// spectrum admits them, the generic damped fixed-point solver otherwise.
inline RsSolution rs_dispatch(const Constellation& con, const RsConfig& cfg) {
  cfg.validate();
  if (cfg.spectrum->analytic()) {
    switch (con.kind()) {
      case SetKind::FullComplex: {
        const double alpha = cfg.alpha();
        const double lam = cfg.lambda;
        double chi;
        if (lam > 0.0) {
          const double a = lam * alpha;
          const double b = lam * alpha + 1.0 - alpha;
          const double c = -alpha;
          chi = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
        } else {
          if (alpha >= 1.0)
            throw std::invalid_argument(
                "full-complex RS point needs lambda > 0 when alpha >= 1 "
                "(the zero-forcing limit sends chi to infinity)");
          chi = alpha / (1.0 - alpha);
        }
        const double denom = alpha * (1.0 + chi) * (1.0 + chi) - chi * chi;
        const double q = chi * chi * cfg.gsu() / denom;
        return finalize_rs(con, cfg, q, chi, 0.0);
      }
      case SetKind::Disk:
        return solve_rs_peak(con.power(), cfg);
      case SetKind::Circle:
        return rs_solution_constant_envelope(con.power(), cfg);
      case SetKind::Mpsk:
        return rs_solution_mpsk(con.M(), con.power(), cfg);
    }
  }
  return solve_rs_generic(con, cfg);
}

// ------------------------------------------------------------- achievable rate

// Rate lower bound log2(gamma sigma_u^2 / (sigma_n^2 + D)) in bits per
// channel use (multiply by ln 2 for nats).  The bound may be negative;
// clamping is a reporting-layer choice.
inline double rate_lower_bound(double gamma, double sigma_u2, double sigma_n2,
                               double D) {
  const double gsu = gamma * sigma_u2;
  if (!(gsu > 0.0))
    throw std::invalid_argument("rate_lower_bound: gamma * sigma_u2 must be > 0");
  if (!(sigma_n2 + D > 0.0))
    throw std::invalid_argument("rate_lower_bound: sigma_n2 + D must be > 0");
  return std::log2(gsu / (sigma_n2 + D));
}

// --------------------------------------------------------------- Monte Carlo

enum class SolverKind { Rzf, ProjectedGradient, CoordinateDescent, NullPrecoder };

inline std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::Rzf: return "rzf";
    case SolverKind::ProjectedGradient: return "pg";
    case SolverKind::CoordinateDescent: return "cd";
    case SolverKind::NullPrecoder: return "null";
  }
  return "?";
}

inline SolverKind solver_from_name(const std::string& s) {
  if (s == "rzf") return SolverKind::Rzf;
  if (s == "pg") return SolverKind::ProjectedGradient;
  if (s == "cd") return SolverKind::CoordinateDescent;
  if (s == "null") return SolverKind::NullPrecoder;
  throw std::invalid_argument("unknown solver '" + s + "' (rzf|pg|cd|null)");
}

// Default solver for a constellation: the closed form where it exists, the
// convex projected-gradient method on the disk, coordinate descent otherwise.
inline SolverKind default_solver(const Constellation& con) {
  switch (con.kind()) {
    case SetKind::FullComplex: return SolverKind::Rzf;
    case SetKind::Disk: return SolverKind::ProjectedGradient;
    default: return SolverKind::CoordinateDescent;
  }
}

struct McConfig {
  int K = 100;
  double alpha = 2.0;       // N = round(alpha K)
  int trials = 50;
  std::uint64_t seed = 1;   // trial t draws from stream seed + t
  Constellation constellation = Constellation::full_complex();
  double gamma = 1.0;
  double lambda = 0.0;
  double sigma_u2 = 1.0;
  double sigma_n2 = 1.0;    // carried for rate reporting; the precoders do not use it
  SolverKind solver = SolverKind::Rzf;
  int restarts = 10;        // coordinate-descent restarts
  double pg_tol = 1e-10;
  int pg_max_iter = 5000;
  int threads = 1;          // worker threads; 0 = auto (hardware concurrency)

  int N() const {
    return static_cast<int>(std::llround(alpha * static_cast<double>(K)));
  }
  void validate() const {
    if (K < 1) throw std::invalid_argument("McConfig: K must be >= 1");
    if (trials < 1) throw std::invalid_argument("McConfig: trials must be >= 1");
    if (N() < 1) throw std::invalid_argument("McConfig: round(alpha K) must be >= 1");
    if (!(gamma >= 0.0) || !(lambda >= 0.0) || !(sigma_u2 > 0.0))
      throw std::invalid_argument("McConfig: need gamma >= 0, lambda >= 0, sigma_u2 > 0");
    if (restarts < 1) throw std::invalid_argument("McConfig: restarts must be >= 1");
    if (solver == SolverKind::Rzf &&
        constellation.kind() != SetKind::FullComplex)
      throw std::invalid_argument(
          "McConfig: the closed-form solver applies to the full-complex set only");
    if (solver == SolverKind::ProjectedGradient &&
        constellation.kind() != SetKind::Disk)
      throw std::invalid_argument(
          "McConfig: the projected-gradient solver applies to the disk set only");
  }
};

struct McResult {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  int trials_used = 0;
  int trials_excluded = 0;
};

namespace detail_mc {

// Channel draw shared by every experiment: entries iid circular Gaussian
// with variance 1/N, drawn row-major from the keyed stream.
inline cmat draw_channel(int K, int N, std::uint64_t key) {
  GaussianStream gs(key);
  cmat H(K, N);
  const double var = 1.0 / static_cast<double>(N);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < N; ++j) H(i, j) = gs.cnormal(var);
  return H;
}

// Channel plus data vector from one stream (H first, then u), so a trial is
// a pure function of its key.
inline std::pair<cmat, cvec> draw_instance(int K, int N, double sigma_u2,
                                           std::uint64_t key) {
  GaussianStream gs(key);
  cmat H(K, N);
  const double var = 1.0 / static_cast<double>(N);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < N; ++j) H(i, j) = gs.cnormal(var);
  cvec u(K);
  for (int i = 0; i < K; ++i) u(i) = gs.cnormal(sigma_u2);
  return {std::move(H), std::move(u)};
}

inline int resolve_threads(int requested, int jobs) {
  int t = requested;
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return std::min(t, jobs);
}

struct TrialOutcome {
  double distortion = 0.0;
  bool ok = false;
  std::string error;
};

inline TrialOutcome run_trial(const McConfig& cfg, std::uint64_t t) {
  TrialOutcome out;
  const std::uint64_t key = cfg.seed + t;
  auto [H, u] = draw_instance(cfg.K, cfg.N(), cfg.sigma_u2, key);
  if (cfg.solver == SolverKind::NullPrecoder) {
    const cvec v = cvec::Zero(cfg.N());
    out.distortion = empirical_distortion(H, u, v, cfg.gamma);
    out.ok = true;
    return out;
  }
  PrecodingInstance inst;
  inst.H = std::move(H);
  inst.u = std::move(u);
  inst.gamma = cfg.gamma;
  inst.lambda = cfg.lambda;
  inst.constellation = cfg.constellation;
  try {
    PrecodeResult r;
    switch (cfg.solver) {
      case SolverKind::Rzf:
        r = rzf_precode(inst);
        break;
      case SolverKind::ProjectedGradient:
        r = precode_projected_gradient(inst, 0.0, cfg.pg_tol, cfg.pg_max_iter);
        break;
      default:
        r = precode_coordinate_descent(inst, cfg.restarts, key);
        break;
    }
    if (!r.converged) {
      out.error = "precoder failed to converge";
      return out;
    }
    out.distortion = empirical_distortion(inst.H, inst.u, r.v, cfg.gamma);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace detail_mc

// Average empirical distortion over `trials` independent (H, u) draws keyed
// seed + t.  Unconverged or failed trials are excluded and counted; more than
// 10% exclusions is an experiment failure.  Aggregation runs over the
// trial-indexed results, so the outcome is identical for any thread count.
inline McResult monte_carlo_distortion(const McConfig& cfg) {
  cfg.validate();
  std::vector<detail_mc::TrialOutcome> outcomes(
      static_cast<std::size_t>(cfg.trials));
  const int nthreads = detail_mc::resolve_threads(cfg.threads, cfg.trials);
  if (nthreads <= 1) {
    for (int t = 0; t < cfg.trials; ++t)
      outcomes[static_cast<std::size_t>(t)] =
          detail_mc::run_trial(cfg, static_cast<std::uint64_t>(t));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int t = w; t < cfg.trials; t += nthreads)
            outcomes[static_cast<std::size_t>(t)] =
                detail_mc::run_trial(cfg, static_cast<std::uint64_t>(t));
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  McResult res;
  std::string first_error;
  std::vector<double> vals;
  vals.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.ok) {
      vals.push_back(o.distortion);
    } else {
      ++res.trials_excluded;
      if (first_error.empty()) first_error = o.error;
    }
  }
  res.trials_used = static_cast<int>(vals.size());
  if (res.trials_excluded * 10 > cfg.trials) {
    std::ostringstream msg;
    msg << "monte_carlo_distortion: " << res.trials_excluded << " of "
        << cfg.trials << " trials excluded (over the 10% budget)";
    if (!first_error.empty()) msg << "; first failure: " << first_error;
    throw ExperimentError(msg.str());
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double m2 = 0.0;
  for (double v : vals) m2 += (v - mean) * (v - mean);
  res.mean = mean;
  res.stderr_of_mean =
      vals.size() > 1
          ? std::sqrt(m2 / (static_cast<double>(vals.size()) - 1.0)) /
                std::sqrt(static_cast<double>(vals.size()))
          : 0.0;
  return res;
}

// ------------------------------------------------------------------- tuning

// Closed-form tuning of the regularized linear precoder at per-user power q:
// the rate bound has a unique interior maximum in chi, attained at
// chi_opt = (s + sqrt(s^2 + 4 alpha)) / 2 with s = (alpha - 1) q / sigma_n^2 - 1;
// the penalty weight and gain follow from the fixed-point identities.
struct RzfTuning {
  double s = 0.0;
  double chi_opt = 0.0;
  double lambda_opt = 0.0;
  double gamma = 0.0;       // gain implied by power q at chi_opt
  double rate_bound = 0.0;  // bits per channel use
  double distortion = 0.0;  // predicted distortion at the tuned point
};

inline RzfTuning tune_rzf(double alpha, double q, double sigma_n2,
                          double sigma_u2 = 1.0) {
  if (!(alpha > 0.0) || !(q > 0.0) || !(sigma_n2 > 0.0) || !(sigma_u2 > 0.0))
    throw std::invalid_argument(
        "tune_rzf: need alpha > 0, q > 0, sigma_n2 > 0, sigma_u2 > 0");
  RzfTuning out;
  out.s = (alpha - 1.0) * q / sigma_n2 - 1.0;
  out.chi_opt = 0.5 * (out.s + std::sqrt(out.s * out.s + 4.0 * alpha));
  const double chi = out.chi_opt;
  out.lambda_opt = 1.0 / chi - (1.0 / alpha) / (1.0 + chi);
  out.gamma =
      (q / sigma_u2) * (alpha * (1.0 + chi) * (1.0 + chi) / (chi * chi) - 1.0);
  out.distortion = alpha * q / (chi * chi);
  out.rate_bound =
      rate_lower_bound(out.gamma, sigma_u2, sigma_n2, out.distortion);
  return out;
}

struct TuneOptions {
  double sigma_u2 = 1.0;
  double gamma_lo = 1e-4;
  double gamma_hi = 100.0;
  double lambda_lo = 1e-8;  // bracket for the power root-find (disk / full set)
  double lambda_hi = 1e4;
  double q_tol = 1e-8;      // tolerance of the q(lambda) = q_target root-find
  int quad_order = 80;      // reserved for non-closed-form spectra
};

struct TuneResult {
  double lambda = 0.0;
  double gamma = 0.0;
  double rate_bound = 0.0;
  double chi = 0.0;        // diagnostics at the tuned point
  double q = 0.0;
  double distortion = 0.0;
};

namespace detail_tune {

struct Eval {
  bool feasible = false;
  double rate = -std::numeric_limits<double>::infinity();
  double lambda = 0.0, chi = 0.0, q = 0.0, D = 0.0;
};

// Evaluate the tuned rate at a candidate gain g: constant-modulus sets have
// q pinned to the symbol power and lambda = 0; for the disk and the
// unconstrained set, lambda is root-found so the fixed point delivers the
// target power.
inline Eval eval_at_gamma(const Constellation& con, double alpha,
                          double q_target, double sigma_n2, double g,
                          const TuneOptions& opt) {
  Eval ev;
  const double gsu = g * opt.sigma_u2;
  switch (con.kind()) {
    case SetKind::Circle: {
      double chi;
      try {
        chi = rs_chi_constant_envelope(con.power(), gsu, alpha);
      } catch (const DivergedRsError&) {
        return ev;
      }
      ev.feasible = true;
      ev.lambda = 0.0;
      ev.chi = chi;
      ev.q = con.power();
      ev.D = (ev.q + gsu) / ((1.0 + chi) * (1.0 + chi));
      ev.rate = rate_lower_bound(g, opt.sigma_u2, sigma_n2, ev.D);
      return ev;
    }
    case SetKind::Mpsk: {
      double chi;
      try {
        chi = rs_chi_mpsk(con.M(), con.power(), gsu, alpha);
      } catch (const DivergedRsError&) {
        return ev;
      }
      ev.feasible = true;
      ev.lambda = 0.0;
      ev.chi = chi;
      ev.q = con.power();
      ev.D = (ev.q + gsu) / ((1.0 + chi) * (1.0 + chi));
      ev.rate = rate_lower_bound(g, opt.sigma_u2, sigma_n2, ev.D);
      return ev;
    }
    case SetKind::FullComplex: {
      // q = chi^2 gsu / (alpha (1+chi)^2 - chi^2) inverts in closed form.
      const double root = std::sqrt((gsu + q_target) / (alpha * q_target));
      if (!(root > 1.0)) return ev;  // target power unreachable at this gain
      const double chi = 1.0 / (root - 1.0);
      double lam = 1.0 / chi - (1.0 / alpha) / (1.0 + chi);
      if (lam < -1e-12) return ev;  // would need a negative penalty
      lam = std::max(lam, 0.0);
      ev.feasible = true;
      ev.lambda = lam;
      ev.chi = chi;
      ev.q = q_target;
      ev.D = (q_target + gsu) / ((1.0 + chi) * (1.0 + chi));
      ev.rate = rate_lower_bound(g, opt.sigma_u2, sigma_n2, ev.D);
      return ev;
    }
    case SetKind::Disk: {
      RsConfig cfg;
      cfg.gamma = g;
      cfg.sigma_u2 = opt.sigma_u2;
      cfg.spectrum = mp_spectrum(alpha);
      cfg.tol = 1e-12;
      auto q_of = [&](double lam) {
        cfg.lambda = lam;
        return solve_rs_peak(con.power(), cfg);
      };
      double lo = opt.lambda_lo, hi = opt.lambda_hi;
      RsSolution slo = q_of(lo), shi = q_of(hi);
      if (!(shi.q <= q_target && q_target <= slo.q)) return ev;  // q decreasing in lambda
      for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const RsSolution sm = q_of(mid);
        if (sm.q > q_target) lo = mid;
        else hi = mid;
        if (std::abs(sm.q - q_target) <= opt.q_tol || hi / lo < 1.0 + 1e-13)
          break;
      }
      const double lam = std::sqrt(lo * hi);
      const RsSolution sol = q_of(lam);
      ev.feasible = true;
      ev.lambda = lam;
      ev.chi = sol.chi;
      ev.q = sol.q;
      ev.D = sol.D_rs;
      ev.rate = rate_lower_bound(g, opt.sigma_u2, sigma_n2, ev.D);
      return ev;
    }
  }
  return ev;
}

}  // namespace detail_tune

// Pick (lambda, gamma) for a constellation: lambda is root-found so the RS
// power matches q_target (skipped for constant-modulus sets, whose power is
// pinned), and gamma maximizes the rate lower bound by golden-section search
// over [gamma_lo, gamma_hi].
inline TuneResult tune_constellation(const Constellation& con, double alpha,
                                     double q_target, double sigma_n2,
                                     const TuneOptions& opt = {}) {
  if (!(alpha > 0.0) || !(sigma_n2 > 0.0))
    throw std::invalid_argument("tune_constellation: need alpha > 0, sigma_n2 > 0");
  if (con.lambda_active() && !(q_target > 0.0))
    throw std::invalid_argument("tune_constellation: need q_target > 0");
  auto f = [&](double g) {
    return detail_tune::eval_at_gamma(con, alpha, q_target, sigma_n2, g, opt);
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = opt.gamma_lo, b = opt.gamma_hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = f(c1).rate, f2 = f(c2).rate;
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = f(c2).rate;
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = f(c1).rate;
    }
    if (b - a < 1e-10 * std::max(1.0, b)) break;
  }
  const double g = 0.5 * (a + b);
  const detail_tune::Eval ev = f(g);
  if (!ev.feasible) {
    std::ostringstream msg;
    msg << "tune_constellation: no feasible operating point over gamma in ["
        << opt.gamma_lo << ", " << opt.gamma_hi << "]";
    if (con.kind() == SetKind::Disk || con.kind() == SetKind::FullComplex) {
      // Report the attainable power range at the largest gain probed.
      const detail_tune::Eval probe_hi =
          detail_tune::eval_at_gamma(con, alpha, q_target, sigma_n2,
                                     opt.gamma_hi, opt);
      msg << "; q_target = " << q_target;
      if (con.kind() == SetKind::Disk) {
        RsConfig cfg;
        cfg.gamma = opt.gamma_hi;
        cfg.sigma_u2 = opt.sigma_u2;
        cfg.spectrum = mp_spectrum(alpha);
        cfg.lambda = opt.lambda_lo;
        const RsSolution qlo = solve_rs_peak(con.power(), cfg);
        cfg.lambda = opt.lambda_hi;
        const RsSolution qhi = solve_rs_peak(con.power(), cfg);
        msg << ", attainable q(lambda) in [" << qhi.q << ", " << qlo.q
            << "] at gamma = " << opt.gamma_hi;
      }
      (void)probe_hi;
    }
    throw ExperimentError(msg.str());
  }
  TuneResult out;
  out.lambda = ev.lambda;
  out.gamma = g;
  out.rate_bound = ev.rate;
  out.chi = ev.chi;
  out.q = ev.q;
  out.distortion = ev.D;
  return out;
}

// -------------------------------------------------------------- union bound

// Probabilistic distortion floor for the M-point phase grid: the largest
// epsilon in (0, 2) with  epsilon/2 - ln(epsilon) = alpha ln M - ln 2 + 1
// (natural logarithms; unit gain and symbol variance).  Distortion below the
// floor has vanishing probability in the large-system limit.
struct UnionBoundResult {
  double epsilon_star = 0.0;
  double alpha = 0.0;
  int M = 0;
};

inline UnionBoundResult union_bound_epsilon(double alpha, int M) {
  if (!(alpha > 0.0)) throw std::invalid_argument("union_bound_epsilon: alpha > 0");
  if (M < 2) throw std::invalid_argument("union_bound_epsilon: M >= 2");
  const double rhs = alpha * std::log(static_cast<double>(M)) - std::log(2.0) + 1.0;
  auto fn = [&](double e) { return 0.5 * e - std::log(e) - rhs; };
  // The left side decreases from +inf to 1 - ln 2 on (0, 2]; rhs always
  // exceeds 1 - ln 2, so a root exists.  Start the bracket low enough that
  // fn(lo) > 0 even when the root is exponentially small.
  double lo = std::min(1e-12, std::max(std::exp(-rhs - 1.0), 1e-300));
  double hi = 2.0;
  if (fn(hi) > 0.0) return {2.0, alpha, M};  // defensive boundary case
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return {0.5 * (lo + hi), alpha, M};
}

// --------------------------------------------------- multicarrier spectrum

// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      const double x = a[i];
      while (i < a.size() && a[i] == x) ++i;
    } else if (b[j] < a[i]) {
      const double x = b[j];
      while (j < b.size() && b[j] == x) ++j;
    } else {
      const double x = a[i];
      while (i < a.size() && a[i] == x) ++i;
      while (j < b.size() && b[j] == x) ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

inline std::vector<double> gramian_eigenvalues(const cmat& H) {
  const cmat G = H.adjoint() * H;
  Eigen::SelfAdjointEigenSolver<cmat> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ExperimentError("gramian_eigenvalues: eigensolver failed");
  std::vector<double> out(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    out[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
  std::sort(out.begin(), out.end());
  return out;
}

struct OfdmResult {
  double ks_distance = 0.0;
  double unitarity_error = 0.0;          // max |(F F^H - I)_{ab}| of the DFT factor
  std::vector<double> pooled;            // Gramian spectrum across all subcarriers
  std::vector<double> single_draw;       // one independent iid Gramian spectrum
};

namespace detail_ofdm {

inline cmat dft_matrix(int L) {
  cmat F(L, L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) {
      const double th = -2.0 * kPi * static_cast<double>(a) *
                        static_cast<double>(b) / static_cast<double>(L);
      F(a, b) = scale * cplx(std::cos(th), std::sin(th));
    }
  return F;
}

}  // namespace detail_ofdm

// Compare the Gramian spectrum of the block channel (per-subcarrier blocks
// H_j combined with the block-diagonal DFT unitary) against a single iid
// Gramian.  Conjugating by a unitary preserves eigenvalues, so the block
// Gramian spectrum is exactly the pooled union of the per-subcarrier
// spectra; the pooled path computes it through L small eigensolves (see
// ofdm_dense_gramian_eigs for the literal dense construction).
inline OfdmResult ofdm_equivalence(int L, int N, int K, std::uint64_t seed) {
  if (L < 1 || N < 1 || K < 1)
    throw std::invalid_argument("ofdm_equivalence: L, N, K must be >= 1");
  const double work = static_cast<double>(L) * N * K;
  if (work > 5e7)
    throw ExperimentError("ofdm_equivalence: L*N*K beyond the size cap");
  OfdmResult out;
  const cmat F = detail_ofdm::dft_matrix(L);
  out.unitarity_error =
      (F * F.adjoint() - cmat::Identity(L, L)).cwiseAbs().maxCoeff();
  if (out.unitarity_error > 1e-12)
    throw ExperimentError("ofdm_equivalence: DFT factor failed the unitarity check");
  out.pooled.reserve(static_cast<std::size_t>(L) * static_cast<std::size_t>(N));
  for (int j = 0; j < L; ++j) {
    const cmat Hj = detail_mc::draw_channel(K, N, seed + static_cast<std::uint64_t>(j));
    const std::vector<double> ev = gramian_eigenvalues(Hj);
    out.pooled.insert(out.pooled.end(), ev.begin(), ev.end());
  }
  const cmat Hs =
      detail_mc::draw_channel(K, N, seed + static_cast<std::uint64_t>(L));
  out.single_draw = gramian_eigenvalues(Hs);
  std::sort(out.pooled.begin(), out.pooled.end());
  out.ks_distance = ks_distance(out.pooled, out.single_draw);
  return out;
}

// Literal dense construction of the block channel times the adjoint of the
// block-diagonal DFT unitary, followed by a full (NL x NL) Gramian
// eigensolve.  Guarded by a memory cap on the largest matrix involved.
inline std::vector<double> ofdm_dense_gramian_eigs(
    int L, int N, int K, std::uint64_t seed,
    std::size_t max_entries = std::size_t{1} << 22) {
  if (L < 1 || N < 1 || K < 1)
    throw std::invalid_argument("ofdm_dense_gramian_eigs: L, N, K must be >= 1");
  const std::size_t rows = static_cast<std::size_t>(K) * static_cast<std::size_t>(L);
  const std::size_t cols = static_cast<std::size_t>(N) * static_cast<std::size_t>(L);
  const std::size_t need = std::max(rows * cols, cols * cols);
  if (need > max_entries) {
    std::ostringstream msg;
    msg << "ofdm_dense_gramian_eigs: needs " << need
        << " complex entries, above the cap of " << max_entries;
    throw ExperimentError(msg.str());
  }
  const cmat F = detail_ofdm::dft_matrix(L);
  // Block-diagonal unitary: DFT across subcarrier blocks, identity within.
  cmat W = cmat::Zero(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(cols));
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b)
      W.block(static_cast<Eigen::Index>(a) * N, static_cast<Eigen::Index>(b) * N,
              N, N) = F(a, b) * cmat::Identity(N, N);
  const double uerr =
      (W * W.adjoint() -
       cmat::Identity(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(cols)))
          .cwiseAbs()
          .maxCoeff();
  if (uerr > 1e-12)
    throw ExperimentError("ofdm_dense_gramian_eigs: unitary check failed");
  cmat Ht = cmat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (int j = 0; j < L; ++j)
    Ht.block(static_cast<Eigen::Index>(j) * K, static_cast<Eigen::Index>(j) * N, K, N) =
        detail_mc::draw_channel(K, N, seed + static_cast<std::uint64_t>(j));
  const cmat A = Ht * W.adjoint();
  return gramian_eigenvalues(A);
}

// ------------------------------------------------------------- power decay

struct PowerDecayPoint {
  double alpha = 0.0;
  double q = 0.0;        // per-antenna average power hitting the target
  double lambda = 0.0;   // penalty weight delivering that power
  double distortion = 0.0;
};

struct PowerDecayResult {
  double kappa = 0.0;    // least-squares slope of log q vs log alpha
  std::vector<PowerDecayPoint> points;
};

// For each load alpha, find the average power q at which the peak-power
// (disk) RS prediction hits D_target, then fit the decay exponent kappa over
// the largest half-decade of alpha.
inline PowerDecayResult power_decay_fit(double D_target,
                                        std::vector<double> alphas, double P,
                                        double gamma = 1.0,
                                        double sigma_u2 = 1.0) {
  if (!(P > 0.0)) throw std::invalid_argument("power_decay_fit: P > 0");
  if (!(D_target > 0.0) || !(D_target < gamma * sigma_u2))
    throw std::invalid_argument(
        "power_decay_fit: need 0 < D_target < gamma * sigma_u2");
  if (alphas.size() < 2)
    throw std::invalid_argument("power_decay_fit: need at least two alpha values");
  for (double a : alphas)
    if (!(a > 0.0))
      throw std::invalid_argument("power_decay_fit: alpha values must be > 0");
  std::sort(alphas.begin(), alphas.end());

  PowerDecayResult out;
  std::ostringstream infeasible;
  int n_bad = 0;
  for (double a : alphas) {
    RsConfig cfg;
    cfg.gamma = gamma;
    cfg.sigma_u2 = sigma_u2;
    cfg.spectrum = mp_spectrum(a);
    cfg.tol = 1e-12;
    auto at = [&](double lam) {
      cfg.lambda = lam;
      return solve_rs_peak(P, cfg);
    };
    double lo = 1e-9, hi = 1e5;
    const RsSolution slo = at(lo), shi = at(hi);
    if (!(slo.D_rs <= D_target && D_target <= shi.D_rs)) {
      ++n_bad;
      infeasible << "  alpha = " << a << ": attainable distortion in ["
                 << slo.D_rs << ", " << shi.D_rs << "]\n";
      continue;
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (at(mid).D_rs < D_target) lo = mid;
      else hi = mid;
    }
    const double lam = std::sqrt(lo * hi);
    const RsSolution sol = at(lam);
    out.points.push_back({a, sol.q, lam, sol.D_rs});
  }
  if (n_bad > 0)
    throw ExperimentError("power_decay_fit: target distortion " +
                          std::to_string(D_target) +
                          " unattainable at:\n" + infeasible.str());

  // Slope over the largest half-decade of alpha (at least two points).
  const double cut =
      std::log(out.points.back().alpha) - 0.5 * std::log(10.0);
  std::vector<double> xs, ys;
  for (const auto& p : out.points) {
    if (std::log(p.alpha) >= cut - 1e-12) {
      xs.push_back(std::log(p.alpha));
      ys.push_back(std::log(p.q));
    }
  }
  if (xs.size() < 2) {
    xs.clear();
    ys.clear();
    const std::size_t n = out.points.size();
    for (std::size_t k = n - 2; k < n; ++k) {
      xs.push_back(std::log(out.points[k].alpha));
      ys.push_back(std::log(out.points[k].q));
    }
  }
  double xb = 0.0, yb = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xb += xs[k];
    yb += ys[k];
  }
  xb /= static_cast<double>(xs.size());
  yb /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - xb) * (ys[k] - yb);
    sxx += (xs[k] - xb) * (xs[k] - xb);
  }
  out.kappa = sxy / sxx;
  return out;
}

// -------------------------------------------------------------- sweep rows

struct SweepConfig {
  Constellation constellation = Constellation::full_complex();
  std::vector<double> alphas;
  double gamma = 1.0;
  double lambda = 0.0;
  double sigma_u2 = 1.0;
  double sigma_n2 = 1.0;
  int quad_order = 80;
  bool with_rsb = false;
  int rsb_quad_order = 32;
  bool with_mc = false;
  McConfig mc;  // K / trials / seed / solver / restarts template; the row
                // fills alpha, constellation and the scalar parameters
};

struct SweepRow {
  double alpha = 0.0;
  std::string set_name;
  int M = 0;
  double power = 0.0;  // P (disk / circle), p (phase grid), q (unconstrained)
  double gamma = 1.0, lambda = 0.0, sigma_u2 = 1.0, sigma_n2 = 1.0;

  bool rs_valid = false;
  double alpha_star = std::numeric_limits<double>::quiet_NaN();
  double chi = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double D_rs = std::numeric_limits<double>::quiet_NaN();
  double entropy0_rs = std::numeric_limits<double>::quiet_NaN();

  bool has_rsb = false;
  double mu1 = std::numeric_limits<double>::quiet_NaN();
  double D_rsb = std::numeric_limits<double>::quiet_NaN();
  double entropy0_rsb = std::numeric_limits<double>::quiet_NaN();

  bool has_mc = false;
  int K = 0;
  int trials = 0;
  double D_mc_mean = std::numeric_limits<double>::quiet_NaN();
  double D_mc_stderr = std::numeric_limits<double>::quiet_NaN();

  double rate_bound = std::numeric_limits<double>::quiet_NaN();
  double union_eps = std::numeric_limits<double>::quiet_NaN();
};

// One sweep row: RS prediction (with the divergence threshold recorded as a
// branch-validity flag instead of a negative distortion), optional one-step
// RSB refinement, optional Monte Carlo, the rate bound evaluated at the
// measured distortion when available, and the union-bound floor on phase
// grids at unit effective gain.
inline SweepRow compute_sweep_row(const SweepConfig& sc, double alpha) {
  const Constellation& con = sc.constellation;
  SweepRow row;
  row.alpha = alpha;
  row.set_name = con.name();
  row.M = con.kind() == SetKind::Mpsk ? con.M() : 0;
  row.gamma = sc.gamma;
  row.lambda = sc.lambda;
  row.sigma_u2 = sc.sigma_u2;
  row.sigma_n2 = sc.sigma_n2;

  RsConfig cfg;
  cfg.gamma = sc.gamma;
  cfg.sigma_u2 = sc.sigma_u2;
  cfg.lambda = sc.lambda;
  cfg.quad_order = sc.quad_order;
  cfg.spectrum = mp_spectrum(alpha);

  try {
    const RsSolution rs = rs_dispatch(con, cfg);
    row.rs_valid = true;
    row.chi = rs.chi;
    row.q = rs.q;
    row.D_rs = rs.D_rs;
    row.entropy0_rs = rs.entropy0;
  } catch (const DivergedRsError& e) {
    row.rs_valid = false;
    row.alpha_star = e.alpha_star;
  }
  row.power = con.kind() == SetKind::FullComplex
                  ? (row.rs_valid ? row.q : std::numeric_limits<double>::quiet_NaN())
                  : con.power();

  if (sc.with_rsb &&
      (con.kind() == SetKind::Mpsk || con.kind() == SetKind::Circle)) {
    try {
      const RsbSolution rsb = solve_rsb1(con, cfg, sc.rsb_quad_order);
      row.has_rsb = true;
      row.mu1 = rsb.mu1;
      row.D_rsb = rsb.D_rsb;
      row.entropy0_rsb = rsb.entropy0;
    } catch (const std::exception&) {
      row.has_rsb = false;  // no breaking root found: leave the columns empty
    }
  }

  if (sc.with_mc) {
    McConfig mc = sc.mc;
    mc.alpha = alpha;
    mc.constellation = con;
    mc.gamma = sc.gamma;
    mc.lambda = sc.lambda;
    mc.sigma_u2 = sc.sigma_u2;
    mc.sigma_n2 = sc.sigma_n2;
    const McResult res = monte_carlo_distortion(mc);
    row.has_mc = true;
    row.K = mc.K;
    row.trials = res.trials_used;
    row.D_mc_mean = res.mean;
    row.D_mc_stderr = res.stderr_of_mean;
  }

  const double D_for_rate =
      row.has_mc ? row.D_mc_mean : (row.rs_valid ? row.D_rs : std::numeric_limits<double>::quiet_NaN());
  if (std::isfinite(D_for_rate) && sc.gamma * sc.sigma_u2 > 0.0 &&
      sc.sigma_n2 + D_for_rate > 0.0)
    row.rate_bound =
        rate_lower_bound(sc.gamma, sc.sigma_u2, sc.sigma_n2, D_for_rate);

  if (con.kind() == SetKind::Mpsk &&
      std::abs(sc.gamma * sc.sigma_u2 - 1.0) < 1e-12)
    row.union_eps = union_bound_epsilon(alpha, con.M()).epsilon_star;

  return row;
}

}  // namespace lse_lab
