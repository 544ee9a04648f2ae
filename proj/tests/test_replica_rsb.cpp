// One-step broken-symmetry refinement for constant-modulus sets.
//
// Frozen oracles come from an independent prototype that solved the same
// moment system with tensor Gauss-Hermite quadrature and a scan+secant
// search on the breaking parameter; values are pinned at the precision the
// two implementations were observed to share.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lse_lab/replica_rsb.hpp"

using namespace lse_lab;

namespace {
RsConfig iid_config(double alpha) {
  RsConfig cfg;
  cfg.spectrum = mp_spectrum(alpha);
  return cfg;
}
}  // namespace

TEST_CASE("two-point grid, alpha=2: frozen broken-symmetry point") {
  const RsbSolution s = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(2.0));
  CHECK(s.mu1 == Catch::Approx(5.90394).margin(2e-4));
  CHECK(s.chi1 == Catch::Approx(0.090754).margin(2e-5));
  CHECK(s.q1 == Catch::Approx(0.781915).margin(2e-5));
  CHECK(s.D_rsb == Catch::Approx(0.39909611989).margin(2e-6));
  CHECK(s.entropy0 == Catch::Approx(-0.00183308755).margin(2e-6));
  // Structural identities of the returned point.
  CHECK(s.q1 + s.p1 == Catch::Approx(1.0).margin(1e-10));
  CHECK(s.eta1 == Catch::Approx(s.chi1 + s.mu1 * s.p1).margin(1e-9));
  CHECK(std::abs(s.fourth_residual) < 1e-7);
  CHECK(s.residual < 1e-9);
  CHECK(s.scan_points > 0);
}

TEST_CASE("two-point grid, alpha=1 and 4: frozen table rows") {
  const RsbSolution a1 = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(1.0));
  CHECK(a1.mu1 == Catch::Approx(3.08093).margin(2e-4));
  CHECK(a1.q1 == Catch::Approx(0.800736).margin(2e-5));
  CHECK(a1.D_rsb == Catch::Approx(0.736111).margin(2e-5));
  const RsbSolution a4 = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(4.0));
  CHECK(a4.mu1 == Catch::Approx(15.26414).margin(5e-4));
  CHECK(a4.chi1 == Catch::Approx(0.050559).margin(2e-5));
  CHECK(a4.q1 == Catch::Approx(0.712035).margin(2e-5));
  CHECK(a4.D_rsb == Catch::Approx(0.108053).margin(2e-5));
}

TEST_CASE("broken-symmetry branch exists beyond the symmetric divergence") {
  // At alpha = 7 > 2 pi the symmetric branch is divergent, yet the
  // broken-symmetry point exists and predicts a small positive distortion.
  const RsbSolution s = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(7.0));
  CHECK(s.mu1 == Catch::Approx(99.165).margin(0.05));
  CHECK(s.D_rsb == Catch::Approx(0.010339).margin(2e-5));
  CHECK(s.D_rsb > 0.0);
  // Near-zero entropy: the refinement repairs the symmetric branch's
  // increasingly negative zero-temperature entropy.
  CHECK(std::abs(s.entropy0) < 1e-6);
}

TEST_CASE("refinement only increases predicted distortion (ordering)") {
  for (double alpha : {1.0, 2.0, 4.0}) {
    const RsConfig cfg = iid_config(alpha);
    const RsSolution rs = rs_solution_mpsk(2, 1.0, cfg);
    const RsbSolution rsb = solve_rsb1(Constellation::mpsk(2, 1.0), cfg);
    CHECK(rsb.D_rsb > rs.D_rs);
    // and moves the entropy diagnostic toward zero
    CHECK(rsb.entropy0 > rs.entropy0);
    CHECK(rsb.entropy0 <= 1e-9);
  }
}

TEST_CASE("vanishing breaking parameter collapses to the symmetric point") {
  const RsConfig cfg = iid_config(2.0);
  const RsbSolution t = rsb_at_fixed_mu(Constellation::mpsk(2, 1.0), cfg, 1e-3, 32, 1.2, 0.6);
  const double chi_rs = rs_chi_mpsk(2, 1.0, 1.0, 2.0);
  const double D_rs = 2.0 / ((1.0 + chi_rs) * (1.0 + chi_rs));
  CHECK(t.D_rsb == Catch::Approx(D_rs).margin(1e-4));
  // eta1 = chi1 + mu1 p1 and chi1 both collapse onto the symmetric
  // susceptibility.  q1 does NOT tend to the power: its limit is the
  // second moment of the conditional mean under the untilted measure (a
  // proper fraction of the power), so only strict bounds apply to it.
  CHECK(t.eta1 == Catch::Approx(chi_rs).margin(2e-3));
  CHECK(t.chi1 == Catch::Approx(chi_rs).margin(1e-3));
  CHECK(t.q1 > 0.0);
  CHECK(t.q1 < 1.0);
  CHECK(t.p1 == Catch::Approx(1.0 - t.q1).margin(1e-9));
}

TEST_CASE("four-point grid at load alpha equals two-point grid at 2 alpha") {
  // The four-point grid factorizes into two orthogonal two-point grids, so
  // its predictions at load alpha coincide with the two-point predictions at
  // load 2 alpha.  Check the inner fixed point at one shared mu1.
  const RsbSolution b = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(3.0));
  const RsbSolution q =
      rsb_at_fixed_mu(Constellation::mpsk(4, 1.0), iid_config(1.5), b.mu1, 32, b.chi1, b.q1);
  CHECK(q.q1 == Catch::Approx(b.q1).epsilon(1e-6));
  CHECK(q.chi1 == Catch::Approx(b.chi1).epsilon(5e-6));
  CHECK(q.D_rsb == Catch::Approx(b.D_rsb).epsilon(1e-6));
  // The stationarity residual also vanishes at the transported point, i.e.
  // b.mu1 is the four-point solution too.
  CHECK(std::abs(q.fourth_residual) < 1e-6);
}

TEST_CASE("circle set, alpha=1.5: frozen broken-symmetry point") {
  const RsbSolution s = solve_rsb1(Constellation::circle(1.0), iid_config(1.5));
  CHECK(s.mu1 == Catch::Approx(15.96794744).margin(2e-3));
  CHECK(s.chi1 == Catch::Approx(2.28508413).margin(2e-4));
  CHECK(s.q1 == Catch::Approx(0.93536543).margin(2e-5));
  CHECK(s.p1 == Catch::Approx(0.06463457).margin(2e-5));
  CHECK(s.D_rsb == Catch::Approx(0.10839764).margin(2e-5));
  CHECK(s.entropy0 == Catch::Approx(-0.32919898).margin(2e-4));
  // On the circle the refinement's correction to the symmetric value is
  // small but strictly positive.
  const RsSolution rs = rs_solution_constant_envelope(1.0, iid_config(1.5));
  CHECK(s.D_rsb > rs.D_rs);
  CHECK(s.D_rsb - rs.D_rs == Catch::Approx(0.00028052).margin(5e-5));
}

TEST_CASE("quadrature-order bump does not move the two-point solution") {
  const RsbSolution a = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(2.0), 32);
  const RsbSolution b = solve_rsb1(Constellation::mpsk(2, 1.0), iid_config(2.0), 48);
  CHECK(a.D_rsb == Catch::Approx(b.D_rsb).epsilon(1e-3));
  CHECK(a.mu1 == Catch::Approx(b.mu1).epsilon(1e-2));
}

TEST_CASE("argument validation") {
  const RsConfig cfg = iid_config(2.0);
  CHECK_THROWS_AS(solve_rsb1(Constellation::full_complex(), cfg), std::invalid_argument);
  CHECK_THROWS_AS(solve_rsb1(Constellation::disk(1.0), cfg), std::invalid_argument);
  CHECK_THROWS_AS(solve_rsb1(Constellation::mpsk(2, 1.0), cfg, 4), std::invalid_argument);
  CHECK_THROWS_AS(rsb_at_fixed_mu(Constellation::mpsk(2, 1.0), cfg, 0.0, 32, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(rsb_at_fixed_mu(Constellation::mpsk(2, 1.0), cfg, -1.0, 32, 1.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("distortion helper matches the solution field") {
  const RsConfig cfg = iid_config(2.0);
  const RsbSolution s = solve_rsb1(Constellation::mpsk(2, 1.0), cfg);
  CHECK(rsb_distortion(s, cfg) == Catch::Approx(s.D_rsb).epsilon(1e-12));
}
