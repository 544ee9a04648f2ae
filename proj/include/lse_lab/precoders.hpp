#pragma once
// Finite-size LSE precoders: given a concrete channel H, data vector u, gain
// gamma and penalty weight lambda, compute a feasible v in X^N (approximately)
// minimizing ||H v - sqrt(gamma) u||^2 + lambda ||v||^2 and report the attained
// objective.  Solvers:
//   * rzf_precode            - closed form for the unconstrained set,
//   * precode_projected_gradient - convex peak-power (disk) set,
//   * precode_coordinate_descent - cyclic per-coordinate minimization with
//                                  random restarts (any set; the workhorse for
//                                  circle and M-PSK outputs),
//   * exhaustive_oracle      - ground-truth enumeration for small M-PSK
//                              instances.
// empirical_distortion measures ||H v - sqrt(gamma) u||^2 / K for one instance.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lse_lab/constellation.hpp"
#include "lse_lab/rng.hpp"

namespace lse_lab {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

// One precoding problem: H is K x N, u has length K.  For constant-modulus
// sets (circle, M-PSK) the penalty term lambda ||v||^2 is a constant shift
// and does not influence the minimizer.
struct PrecodingInstance {
  cmat H;
  cvec u;
  double gamma = 1.0;
  double lambda = 0.0;
  Constellation constellation = Constellation::full_complex();

  Eigen::Index K() const { return H.rows(); }
  Eigen::Index N() const { return H.cols(); }

  void validate() const {
    if (H.rows() < 1 || H.cols() < 1)
      throw std::invalid_argument("precoding: H must be at least 1 x 1");
    if (u.size() != H.rows())
      throw std::invalid_argument("precoding: u length must equal rows of H");
    if (!(gamma >= 0.0))
      throw std::invalid_argument("precoding: gamma must be >= 0");
    if (!(lambda >= 0.0))
      throw std::invalid_argument("precoding: lambda must be >= 0");
  }
};

struct PrecodeResult {
  cvec v;                  // feasible point, every coordinate in X exactly
  double objective = 0.0;  // ||H v - sqrt(gamma) u||^2 + lambda ||v||^2
  long iterations = 0;     // solver-specific unit (steps / sweeps / candidates)
  int restarts_used = 0;
  bool converged = true;
};

// ||H v - sqrt(gamma) u||^2 + lambda ||v||^2, evaluated directly.
inline double precode_objective(const cmat& H, const cvec& u, const cvec& v,
                                double gamma, double lambda) {
  const cvec r = H * v - std::sqrt(gamma) * u;
  return r.squaredNorm() + lambda * v.squaredNorm();
}

// Per-instance distortion ||H v - sqrt(gamma) u||^2 / K.
inline double empirical_distortion(const cmat& H, const cvec& u, const cvec& v,
                                   double gamma) {
  const cvec r = H * v - std::sqrt(gamma) * u;
  return r.squaredNorm() / static_cast<double>(H.rows());
}

// Largest squared singular value of H by power iteration on H^H H.  The
// Rayleigh quotient converges monotonically from below; the returned value is
// inflated by a hair so 1/L gradient steps stay on the safe side of the true
// curvature bound.
inline double spectral_norm_squared(const cmat& H, double tol = 1e-8,
                                    int max_iter = 20000) {
  const Eigen::Index N = H.cols();
  GaussianStream gs(0x5eedf00dcafe1234ull);
  cvec x(N);
  for (Eigen::Index i = 0; i < N; ++i) x(i) = gs.cnormal();
  double nx = x.norm();
  if (nx == 0.0) {
    x.setOnes();
    nx = x.norm();
  }
  x /= nx;
  double ray = (H * x).squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    cvec y = H.adjoint() * (H * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;  // H x in the null space: H^H H x = 0
    x = y / ny;
    const double ray_next = (H * x).squaredNorm();
    if (std::abs(ray_next - ray) <= tol * std::max(1.0, ray_next)) {
      ray = ray_next;
      break;
    }
    ray = ray_next;
  }
  return ray * (1.0 + 10.0 * tol);
}

// Closed-form precoder for the unconstrained set:
//   v = sqrt(gamma) H^H (H H^H + lambda I)^{-1} u
// computed through a K x K Hermitian solve (never an explicit inverse).
inline PrecodeResult rzf_precode(const PrecodingInstance& inst) {
  inst.validate();
  if (inst.constellation.kind() != SetKind::FullComplex)
    throw std::invalid_argument(
        "rzf_precode: requires the unconstrained (full-complex) set");
  const Eigen::Index K = inst.K();
  cmat A = inst.H * inst.H.adjoint();
  A.diagonal().array() += inst.lambda;
  Eigen::LDLT<cmat> ldlt(A);
  // A is Hermitian positive semidefinite; a vanishing pivot means H H^H is
  // rank deficient and the unregularized solve is ill-posed even when the
  // right-hand side happens to be consistent.
  const Eigen::VectorXd piv = ldlt.vectorD().real();
  const double pmax = piv.size() ? piv.cwiseAbs().maxCoeff() : 0.0;
  const double pmin = piv.size() ? piv.cwiseAbs().minCoeff() : 0.0;
  cvec y = ldlt.solve(inst.u);
  const double resid = (A * y - inst.u).norm();
  if (ldlt.info() != Eigen::Success || pmin <= 1e-12 * pmax ||
      !(resid <= 1e-8 * std::max(1.0, inst.u.norm())) || !y.allFinite()) {
    std::ostringstream msg;
    msg << "rzf_precode: the " << K << " x " << K
        << " system is singular (residual " << resid
        << "); a positive penalty weight lambda > 0 regularizes it";
    throw std::runtime_error(msg.str());
  }
  PrecodeResult out;
  out.v = std::sqrt(inst.gamma) * (inst.H.adjoint() * y);
  out.objective =
      precode_objective(inst.H, inst.u, out.v, inst.gamma, inst.lambda);
  out.iterations = 1;
  out.restarts_used = 0;
  out.converged = true;
  return out;
}

// Projected gradient for the convex peak-power (disk) set.  Steps of size
// step (default 1/L with L = 2 (lambda + sigma_max(H)^2), the gradient
// Lipschitz constant) followed by per-coordinate magnitude clipping; the
// objective is monotonically non-increasing.  Terminates when the relative
// objective change drops below tol; hitting max_iter flags the result
// unconverged.
inline PrecodeResult precode_projected_gradient(const PrecodingInstance& inst,
                                                double step = 0.0,
                                                double tol = 1e-10,
                                                int max_iter = 5000) {
  inst.validate();
  const Constellation& con = inst.constellation;
  if (con.kind() != SetKind::Disk)
    throw std::invalid_argument(
        "precode_projected_gradient: requires the peak-power (disk) set");
  const Eigen::Index N = inst.N();
  const cvec su = std::sqrt(inst.gamma) * inst.u;

  PrecodeResult out;
  out.v = cvec::Zero(N);  // the disk always contains 0
  out.restarts_used = 0;
  if (step <= 0.0) {
    const double L = 2.0 * (inst.lambda + spectral_norm_squared(inst.H));
    if (!(L > 0.0)) {
      // H = 0 and lambda = 0: the objective is constant, every point optimal.
      out.objective = su.squaredNorm();
      out.iterations = 0;
      out.converged = true;
      return out;
    }
    step = 1.0 / L;
  }

  double prev = precode_objective(inst.H, inst.u, out.v, inst.gamma, inst.lambda);
  out.converged = false;
  long it = 0;
  for (; it < max_iter; ++it) {
    const cvec r = inst.H * out.v - su;
    cvec g = 2.0 * (inst.H.adjoint() * r);
    if (inst.lambda != 0.0) g += 2.0 * inst.lambda * out.v;
    cvec w = out.v - step * g;
    for (Eigen::Index i = 0; i < N; ++i) w(i) = con.project(w(i));
    out.v = std::move(w);
    const double cur =
        precode_objective(inst.H, inst.u, out.v, inst.gamma, inst.lambda);
    if (std::abs(prev - cur) <= tol * std::max(1.0, std::abs(prev))) {
      prev = cur;
      out.converged = true;
      ++it;
      break;
    }
    prev = cur;
  }
  out.iterations = it;
  out.objective = prev;
  return out;
}

namespace detail_precode {

// Draw one point uniformly from the set (Gaussian for the unbounded set,
// where any starting distribution serves the convex solver equally).
inline cplx random_point(const Constellation& con, GaussianStream& gs) {
  switch (con.kind()) {
    case SetKind::FullComplex:
      return gs.cnormal(1.0);
    case SetKind::Disk: {
      const double r = std::sqrt(con.power() * gs.uniform_pos());
      const double th = 2.0 * kPi * gs.uniform_pos();
      return {r * std::cos(th), r * std::sin(th)};
    }
    case SetKind::Circle: {
      const double th = 2.0 * kPi * gs.uniform_pos();
      const double r = std::sqrt(con.power());
      return {r * std::cos(th), r * std::sin(th)};
    }
    case SetKind::Mpsk: {
      const int m = static_cast<int>(
          gs.uniform_index(static_cast<std::uint64_t>(con.M())));
      return std::sqrt(con.power()) * Constellation::unit_phase(m, con.M());
    }
  }
  return {0.0, 0.0};
}

struct CdRun {
  cvec v;
  double objective = 0.0;
  long sweeps = 0;
  bool converged = false;
};

// One coordinate-descent run from initial point v0: cyclically replace each
// coordinate with the projected solution of its scalar subproblem,
//   xhat = h_i^H r / (||h_i||^2 + lambda),  r = sqrt(gamma) u - H v + h_i v_i,
// in a fixed sweep order.  Discrete sets stop on the first sweep with no
// coordinate change; continuous sets stop when the objective change falls
// below 1e-10 (relative to max(1, objective)).  All-zero columns are skipped.
inline CdRun coordinate_descent_run(const PrecodingInstance& inst, cvec v0,
                                    int max_sweeps = 5000) {
  const Constellation& con = inst.constellation;
  const Eigen::Index N = inst.N();
  const cvec su = std::sqrt(inst.gamma) * inst.u;
  const double lam = inst.lambda;
  const bool discrete = con.discrete();

  Eigen::VectorXd hn2(N);
  for (Eigen::Index i = 0; i < N; ++i) hn2(i) = inst.H.col(i).squaredNorm();

  CdRun run;
  run.v = std::move(v0);
  cvec w = su - inst.H * run.v;
  double prev = w.squaredNorm() + lam * run.v.squaredNorm();
  for (int s = 0; s < max_sweeps; ++s) {
    bool changed = false;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (hn2(i) == 0.0) continue;  // degenerate column: coordinate skipped
      const cvec h = inst.H.col(i);
      const cplx old = run.v(i);
      const cvec r = w + h * old;
      const cplx xhat = h.dot(r) / (hn2(i) + lam);
      const cplx x = con.project(xhat, old);
      if (x != old) {
        changed = true;
        w = r - h * x;
        run.v(i) = x;
      }
    }
    ++run.sweeps;
    if (discrete) {
      if (!changed) {
        run.converged = true;
        break;
      }
    } else {
      const double cur = w.squaredNorm() + lam * run.v.squaredNorm();
      if (std::abs(prev - cur) <= 1e-10 * std::max(1.0, std::abs(prev))) {
        run.converged = true;
        break;
      }
      prev = cur;
    }
  }
  // Refresh the residual from scratch so the reported objective carries no
  // accumulated rank-one update drift.
  run.objective =
      precode_objective(inst.H, inst.u, run.v, inst.gamma, inst.lambda);
  return run;
}

}  // namespace detail_precode

// Cyclic coordinate descent with `restarts` independent initial points drawn
// uniformly from X^N (Gaussian for the unbounded set); the best final
// objective wins, earlier restarts win ties.  Runs are a pure function of
// (instance, seed).
inline PrecodeResult precode_coordinate_descent(const PrecodingInstance& inst,
                                                int restarts = 10,
                                                std::uint64_t seed = 1,
                                                int max_sweeps = 5000) {
  inst.validate();
  if (restarts < 1)
    throw std::invalid_argument("precode_coordinate_descent: restarts >= 1");
  const Eigen::Index N = inst.N();

  // Restart streams are keyed by successive outputs of a generator hashed
  // away from the raw seed, so they never collide with channel draws keyed
  // seed + trial.
  SplitMix64 keygen(seed ^ 0xD1B54A32D192ED03ull);

  PrecodeResult best;
  bool have = false;
  for (int rep = 0; rep < restarts; ++rep) {
    GaussianStream gs(keygen.next_u64());
    cvec v0(N);
    for (Eigen::Index i = 0; i < N; ++i)
      v0(i) = detail_precode::random_point(inst.constellation, gs);
    detail_precode::CdRun run =
        detail_precode::coordinate_descent_run(inst, std::move(v0), max_sweeps);
    if (!have || run.objective < best.objective) {
      have = true;
      best.v = std::move(run.v);
      best.objective = run.objective;
      best.iterations = run.sweeps;
      best.converged = run.converged;
    }
  }
  best.restarts_used = restarts;
  return best;
}

// Ground-truth global minimizer for M-PSK instances by full enumeration of
// the M^N candidate grids, with the tie-break fixed to the lowest
// lexicographic index (coordinate 0 most significant).  Refuses instances
// with more than 2^22 candidates.
inline PrecodeResult exhaustive_oracle(const PrecodingInstance& inst) {
  inst.validate();
  const Constellation& con = inst.constellation;
  if (con.kind() != SetKind::Mpsk)
    throw std::invalid_argument("exhaustive_oracle: requires an M-PSK set");
  const Eigen::Index N = inst.N();
  const int M = con.M();
  const double log2_count = static_cast<double>(N) * std::log2(double(M));
  if (log2_count > 22.0) {
    std::ostringstream msg;
    msg << "exhaustive_oracle: enumeration needs " << std::pow(double(M), double(N))
        << " candidates (" << M << "^" << N << "), above the 2^22 limit";
    throw std::invalid_argument(msg.str());
  }
  std::uint64_t total = 1;
  for (Eigen::Index i = 0; i < N; ++i) total *= static_cast<std::uint64_t>(M);

  const std::vector<cplx> pts = con.points();
  const cvec su = std::sqrt(inst.gamma) * inst.u;
  const double const_pen =
      inst.lambda * con.power() * static_cast<double>(N);  // lambda ||v||^2

  std::vector<int> digits(static_cast<std::size_t>(N), 0);
  cvec v(N);
  for (Eigen::Index i = 0; i < N; ++i) v(i) = pts[0];
  cvec w = su - inst.H * v;

  double best_cost = w.squaredNorm();
  std::vector<int> best_digits = digits;

  const std::uint64_t refresh = 4096;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    // Odometer increment, least-significant digit last (index is
    // lexicographic with coordinate 0 most significant).
    Eigen::Index i = N - 1;
    while (digits[static_cast<std::size_t>(i)] == M - 1) {
      digits[static_cast<std::size_t>(i)] = 0;
      w += inst.H.col(i) * (v(i) - pts[0]);
      v(i) = pts[0];
      --i;
    }
    int& d = digits[static_cast<std::size_t>(i)];
    ++d;
    w += inst.H.col(i) * (v(i) - pts[static_cast<std::size_t>(d)]);
    v(i) = pts[static_cast<std::size_t>(d)];
    if (idx % refresh == 0) w = su - inst.H * v;  // cap update drift
    const double cost = w.squaredNorm();
    if (cost < best_cost) {  // strict: ties keep the lower index
      best_cost = cost;
      best_digits = digits;
    }
  }

  PrecodeResult out;
  out.v.resize(N);
  for (Eigen::Index i = 0; i < N; ++i)
    out.v(i) = pts[static_cast<std::size_t>(best_digits[static_cast<std::size_t>(i)])];
  out.objective = (inst.H * out.v - su).squaredNorm() + const_pen;
  out.iterations = static_cast<long>(total);
  out.restarts_used = 0;
  out.converged = true;
  return out;
}

}  // namespace lse_lab
