// Scalar special functions and the panel quadrature engine.
//
// Oracles: closed-form integrals, high-precision reference values for the
// scaled Bessel functions, and self-consistency identities (symmetry, weight
// sums, order doubling).

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "lse_lab/quadrature.hpp"
#include "lse_lab/special.hpp"

using namespace lse_lab;

TEST_CASE("pi constants are consistent") {
  CHECK(kPi == Catch::Approx(std::acos(-1.0)).epsilon(1e-15));
  CHECK(kSqrtPi * kSqrtPi == Catch::Approx(kPi).epsilon(1e-15));
  CHECK(kInvSqrtPi * kSqrtPi == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gauss_tail matches the complementary normal CDF") {
  // Q(x) = P(Z > x) for Z ~ N(0,1); reference values from the erfc series.
  CHECK(gauss_tail(0.0) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(gauss_tail(1.0) == Catch::Approx(0.15865525393145705).epsilon(1e-13));
  CHECK(gauss_tail(3.0) == Catch::Approx(1.3498980316300946e-3).epsilon(1e-12));
  for (double x : {-2.0, -0.5, 0.3, 1.7, 4.0})
    CHECK(gauss_tail(x) + gauss_tail(-x) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("erfcx and log_erfc agree with erfc where erfc is representable") {
  for (double x : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double direct = std::erfc(x);
    CHECK(erfcx_positive(x) * std::exp(-x * x) ==
          Catch::Approx(direct).epsilon(1e-12));
    CHECK(log_erfc(x) == Catch::Approx(std::log(direct)).margin(1e-12));
  }
  // Far tail where erfc underflows: the asymptotic expansion
  // log erfc(x) = -x^2 - log(x sqrt(pi)) + log(1 - 1/(2x^2) + O(x^-4)).
  const double x = 40.0;
  const double asym = -x * x - std::log(x * kSqrtPi) +
                      std::log1p(-0.5 / (x * x) + 0.75 / (x * x * x * x));
  CHECK(log_erfc(x) == Catch::Approx(asym).margin(1e-6));
}

TEST_CASE("log_add_exp is exact and overflow-safe") {
  CHECK(log_add_exp(0.0, 0.0) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_add_exp(1000.0, 1000.0) ==
        Catch::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_add_exp(-1.0, 3.0) ==
        Catch::Approx(std::log(std::exp(-1.0) + std::exp(3.0))).epsilon(1e-14));
  CHECK(log_add_exp(0.0, -1e9) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("one_minus_exp_neg is accurate near zero") {
  CHECK(one_minus_exp_neg(1e-12) == Catch::Approx(1e-12).epsilon(1e-9));
  CHECK(one_minus_exp_neg(1.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(one_minus_exp_neg(0.0) == 0.0);
}

TEST_CASE("scaled Bessel functions match high-precision references") {
  // e^{-x} I_0(x) and e^{-x} I_1(x); references computed from the ascending
  // series in extended precision.
  CHECK(bessel_i0_scaled(0.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_i1_scaled(0.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(bessel_i0_scaled(1.0) == Catch::Approx(0.46575960759364043).epsilon(1e-12));
  CHECK(bessel_i1_scaled(1.0) == Catch::Approx(0.20791041534970850).epsilon(1e-12));
  CHECK(bessel_i0_scaled(10.0) == Catch::Approx(0.12783333716342860).epsilon(1e-12));
  CHECK(bessel_i1_scaled(10.0) == Catch::Approx(0.12126268138445551).epsilon(1e-12));
  // Large argument: both tend to 1/sqrt(2 pi x) with I1/I0 -> 1.
  const double x = 500.0;
  const double lead = 1.0 / std::sqrt(2.0 * kPi * x);
  CHECK(bessel_i0_scaled(x) == Catch::Approx(lead).epsilon(1e-3));
  CHECK(bessel_i1_scaled(x) / bessel_i0_scaled(x) ==
        Catch::Approx(1.0).epsilon(1e-2));
  // Monotonicity of the ratio r(x) = I1/I0 (it is the mean resultant length).
  double prev = 0.0;
  for (double t = 0.25; t <= 40.0; t += 0.25) {
    const double r = bessel_i1_scaled(t) / bessel_i0_scaled(t);
    CHECK(r > prev);
    CHECK(r < 1.0);
    prev = r;
  }
}

TEST_CASE("gauss_legendre nodes are symmetric and integrate polynomials") {
  for (int n : {1, 2, 5, 16, 33, 80}) {
    const QuadNodes& q = gauss_legendre(n);
    REQUIRE(q.size() == static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      wsum += q.w[i];
      CHECK(q.w[i] > 0.0);
      // symmetry: x_i = -x_{n-1-i}, w_i = w_{n-1-i}
      CHECK(q.x[i] == Catch::Approx(-q.x[n - 1 - i]).margin(1e-14));
      CHECK(q.w[i] == Catch::Approx(q.w[n - 1 - i]).margin(1e-14));
    }
    CHECK(wsum == Catch::Approx(2.0).epsilon(1e-13));
  }
  // Degree-exactness: an n-point rule integrates x^(2n-1) exactly.
  const QuadNodes& q3 = gauss_legendre(3);
  double s4 = 0.0, s5 = 0.0;
  for (std::size_t i = 0; i < q3.size(); ++i) {
    s4 += q3.w[i] * std::pow(q3.x[i], 4);
    s5 += q3.w[i] * std::pow(q3.x[i], 5);
  }
  CHECK(s4 == Catch::Approx(2.0 / 5.0).epsilon(1e-14));
  CHECK(s5 == Catch::Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("paneled_interval integrates a smooth function and honors splits") {
  // int_0^5 e^{-x} dx = 1 - e^{-5}
  QuadNodes g = paneled_interval(0.0, 5.0, 0.5, 12);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::exp(-g.x[i]);
  CHECK(s == Catch::Approx(1.0 - std::exp(-5.0)).epsilon(1e-13));

  // A kinked integrand |x - 1| over [0, 2]: with the kink forced as a panel
  // edge the rule is exact; integral = 1.
  QuadNodes k = paneled_interval(0.0, 2.0, 10.0, 8, {1.0});
  double sk = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    sk += k.w[i] * std::abs(k.x[i] - 1.0);
  CHECK(sk == Catch::Approx(1.0).epsilon(1e-14));
  // No node may sit exactly on the kink.
  for (std::size_t i = 0; i < k.size(); ++i) CHECK(k.x[i] != 1.0);

  // Degenerate interval returns empty nodes.
  CHECK(paneled_interval(1.0, 1.0, 0.1, 8).size() == 0);
  // Splits outside the interval are ignored.
  QuadNodes ig = paneled_interval(0.0, 1.0, 10.0, 8, {-3.0, 7.0});
  CHECK(ig.size() == 8);
}

TEST_CASE("radial_gaussian_grid integrates against 2 r exp(-r^2) dr") {
  // E[g(|z|)] for z ~ CN(0,1):  E[1] = 1, E[|z|^2] = 1, E[|z|] = sqrt(pi)/2.
  QuadNodes g = radial_gaussian_grid(8.0, 0.25, 12);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m0 += g.w[i];
    m1 += g.w[i] * g.x[i];
    m2 += g.w[i] * g.x[i] * g.x[i];
  }
  CHECK(m0 == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m1 == Catch::Approx(kSqrtPi / 2.0).epsilon(1e-12));
  CHECK(m2 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line_gaussian_grid integrates against exp(-t^2)/sqrt(pi) dt") {
  // For t with density e^{-t^2}/sqrt(pi): E[1]=1, E[t^2]=1/2, E[t^4]=3/4.
  QuadNodes g = line_gaussian_grid(8.0, 0.25, 12);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m0 += g.w[i];
    m2 += g.w[i] * g.x[i] * g.x[i];
    m4 += g.w[i] * std::pow(g.x[i], 4);
  }
  CHECK(m0 == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(m4 == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("panel refinement converges (order doubling)") {
  // Doubling nodes per panel must not move a converged integral.
  auto integral = [](int npp) {
    QuadNodes g = radial_gaussian_grid(8.0, 0.5, npp, {1.0});
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      s += g.w[i] * std::min(g.x[i], 1.0);  // kinked at the split r=1
    return s;
  };
  CHECK(integral(12) == Catch::Approx(integral(24)).epsilon(1e-12));
}
