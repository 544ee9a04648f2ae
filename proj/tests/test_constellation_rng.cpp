// Signal-set geometry (projections, discrete grids) and the deterministic
// counter-based random streams.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "lse_lab/constellation.hpp"
#include "lse_lab/rng.hpp"

using namespace lse_lab;
using cplx = std::complex<double>;

TEST_CASE("constellation construction and naming") {
  CHECK(Constellation::full_complex().name() == "full-complex");
  CHECK(Constellation::disk(2.0).name() == "disk");
  CHECK(Constellation::circle(1.0).name() == "circle");
  CHECK(Constellation::mpsk(8, 1.0).name() == "mpsk8");
  CHECK(Constellation::mpsk(2, 3.0).power() == 3.0);
  CHECK(Constellation::mpsk(4, 1.0).M() == 4);
  CHECK_THROWS_AS(Constellation::disk(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Constellation::circle(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Constellation::mpsk(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Constellation::mpsk(4, -1.0), std::invalid_argument);
}

TEST_CASE("disk projection: clip to the radius, fix interior points") {
  Constellation disk = Constellation::disk(4.0);  // radius 2
  CHECK(disk.project(cplx(0.5, -0.5)) == cplx(0.5, -0.5));
  const cplx far(30.0, 40.0);  // |.| = 50 -> scaled to radius 2
  const cplx proj = disk.project(far);
  CHECK(std::abs(proj) == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(std::arg(proj) == Catch::Approx(std::arg(far)).epsilon(1e-15));
  // Idempotence on a ring of test points.
  for (int k = 0; k < 12; ++k) {
    const cplx v = std::polar(3.7, 2.0 * kPi * k / 12.0 - kPi);
    const cplx p = disk.project(v);
    CHECK(std::abs(disk.project(p) - p) <= 1e-15);
    CHECK(std::abs(p) <= 2.0 + 1e-15);
  }
}

TEST_CASE("circle projection lands exactly on the envelope") {
  Constellation circ = Constellation::circle(2.0);  // radius sqrt(2)
  for (const cplx v : {cplx(0.1, 0.0), cplx(5.0, -3.0), cplx(-0.3, 0.4)}) {
    const cplx p = circ.project(v);
    CHECK(std::abs(p) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::arg(p) == Catch::Approx(std::arg(v)).margin(1e-14));
  }
}

TEST_CASE("phase-grid points have the declared power and are distinct") {
  for (int M : {2, 3, 4, 8, 16}) {
    Constellation psk = Constellation::mpsk(M, 2.0);
    auto pts = psk.points();
    REQUIRE(pts.size() == static_cast<std::size_t>(M));
    std::set<std::pair<double, double>> distinct;
    for (const cplx& p : pts) {
      CHECK(std::norm(p) == Catch::Approx(2.0).epsilon(1e-14));
      distinct.insert({p.real(), p.imag()});
    }
    CHECK(distinct.size() == pts.size());
  }
  // The two-point grid is exactly {+r, -r} on the real axis (cardinal
  // directions snap to exact values).
  auto bpsk = Constellation::mpsk(2, 1.0).points();
  CHECK(bpsk[0] == cplx(1.0, 0.0));
  CHECK(bpsk[1] == cplx(-1.0, 0.0));
  auto qpsk = Constellation::mpsk(4, 1.0).points();
  CHECK(qpsk[1] == cplx(0.0, 1.0));
  CHECK(qpsk[3] == cplx(0.0, -1.0));
}

TEST_CASE("phase-grid projection is the nearest grid point, bit-exact") {
  Constellation psk = Constellation::mpsk(8, 1.0);
  auto pts = psk.points();
  GaussianStream gs(42);
  for (int t = 0; t < 500; ++t) {
    const cplx v = gs.cnormal(2.0);
    const cplx p = psk.project(v);
    // membership is bit-exact
    bool member = false;
    for (const cplx& g : pts) member = member || (g == p);
    CHECK(member);
    // and no grid point is strictly closer
    for (const cplx& g : pts) CHECK(std::abs(v - p) <= std::abs(v - g) + 1e-13);
  }
  // Sector-boundary wrap: a point on the negative real axis for M=4 maps to
  // one of the two adjacent grid points, never off-grid.
  Constellation q4 = Constellation::mpsk(4, 1.0);
  const cplx boundary(-2.0, 0.0);
  const cplx pb = q4.project(boundary);
  bool member = false;
  for (const cplx& g : q4.points()) member = member || (g == pb);
  CHECK(member);
}

TEST_CASE("projection shrinks distance to any feasible point (obtuse angle)") {
  // For convex sets (disk): ||v - proj(v)||^2 + ||proj(v) - y||^2 <= ||v - y||^2
  // for every feasible y; spot-check with random pairs.
  Constellation disk = Constellation::disk(1.0);
  GaussianStream gs(7);
  for (int t = 0; t < 200; ++t) {
    const cplx v = gs.cnormal(4.0);
    cplx y = gs.cnormal(1.0);
    if (std::abs(y) > 1.0) y /= (std::abs(y) + 1e-12);
    const cplx p = disk.project(v);
    CHECK(std::norm(v - p) + std::norm(p - y) <= std::norm(v - y) + 1e-12);
  }
}

TEST_CASE("set classification flags") {
  // lambda_active: the quadratic penalty changes the minimizer only on sets
  // where the feasible norm varies (unconstrained, disk).
  CHECK(Constellation::full_complex().lambda_active());
  CHECK(Constellation::disk(1.0).lambda_active());
  CHECK_FALSE(Constellation::circle(1.0).lambda_active());
  CHECK_FALSE(Constellation::mpsk(4, 1.0).lambda_active());
  CHECK(Constellation::mpsk(4, 1.0).discrete());
  CHECK_FALSE(Constellation::circle(1.0).discrete());
  CHECK_THROWS_AS(Constellation::circle(1.0).points(), std::invalid_argument);
}

TEST_CASE("SplitMix64 is a pure function of its key") {
  SplitMix64 a(123), b(123), c(124);
  bool same = true, diff = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
    same = same && (x == y);
    diff = diff || (x != z);
  }
  CHECK(same);
  CHECK(diff);
  // Known first output for seed 0 (SplitMix64 reference vector).
  SplitMix64 zero(0);
  CHECK(zero.next_u64() == 0xE220A8397B1DCDAFull);
}

TEST_CASE("uniform_pos lies in (0, 1]") {
  SplitMix64 g(999);
  for (int i = 0; i < 10000; ++i) {
    const double u = g.uniform_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("GaussianStream moments") {
  GaussianStream g(2024);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.normal();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  CHECK(s1 / n == Catch::Approx(0.0).margin(0.01));
  CHECK(s2 / n == Catch::Approx(1.0).epsilon(0.02));
  CHECK(s4 / n == Catch::Approx(3.0).epsilon(0.05));
}

TEST_CASE("complex Gaussian has the requested variance, split over axes") {
  GaussianStream g(77);
  const int n = 100000;
  double e2 = 0.0, ere = 0.0, eim = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx z = g.cnormal(2.0);
    e2 += std::norm(z);
    ere += z.real() * z.real();
    eim += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  CHECK(e2 / n == Catch::Approx(2.0).epsilon(0.02));
  CHECK(ere / n == Catch::Approx(1.0).epsilon(0.03));
  CHECK(eim / n == Catch::Approx(1.0).epsilon(0.03));
  CHECK(cross / n == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("streams with distinct keys are independent in practice") {
  // Correlation between two keyed streams should be ~ N(0, 1/n).
  GaussianStream a(1), b(2);
  const int n = 100000;
  double corr = 0.0;
  for (int i = 0; i < n; ++i) corr += a.normal() * b.normal();
  CHECK(corr / n == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("stream determinism is bitwise") {
  GaussianStream a(555), b(555);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  GaussianStream c(556), d(556);
  for (int i = 0; i < 100; ++i) CHECK(c.cnormal(1.5) == d.cnormal(1.5));
}

TEST_CASE("uniform_index stays in range and covers all cells") {
  GaussianStream g(31337);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t k = g.uniform_index(7);
    REQUIRE(k < 7);
    ++hits[static_cast<int>(k)];
  }
  for (int h : hits) CHECK(h > 800);  // ~1000 expected per cell
}
