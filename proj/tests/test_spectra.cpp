// Spectrum models: the closed-form iid R-transform, the numeric path-loss
// R-transform, and the zero-temperature entropy functional.
//
// Path-loss oracles were frozen from an independent adaptive-quadrature +
// scalar-root-finding computation of the Stieltjes transform before this
// implementation existed.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lse_lab/replica_core.hpp"
#include "lse_lab/spectra.hpp"

using namespace lse_lab;

TEST_CASE("iid R-transform closed form") {
  // R(-w) = 1 / (alpha (1 + w)).
  for (double alpha : {0.5, 1.0, 2.0, 5.0})
    for (double w : {0.0, 0.1, 1.0, 4.0})
      CHECK(mp_r_transform(-w, alpha) ==
            Catch::Approx(1.0 / (alpha * (1.0 + w))).epsilon(1e-15));
  // Derivative matches a central finite difference.
  const double alpha = 2.0, w = 0.7, h = 1e-6;
  const double fd =
      (mp_r_transform(-(w + h), alpha) - mp_r_transform(-(w - h), alpha)) /
      (2.0 * h);
  CHECK(-mp_r_transform_derivative(-w, alpha) == Catch::Approx(fd).epsilon(1e-8));
  CHECK(mp_r_transform_derivative(-w, alpha) ==
        Catch::Approx(1.0 / (alpha * (1.0 + w) * (1.0 + w))).epsilon(1e-14));
}

TEST_CASE("iid spectrum model wraps the closed form") {
  auto spec = mp_spectrum(2.0);
  CHECK(spec->alpha() == 2.0);
  CHECK(spec->r_neg(0.3) == Catch::Approx(mp_r_transform(-0.3, 2.0)).epsilon(1e-15));
  CHECK(spec->r_neg_derivative(0.3) ==
        Catch::Approx(mp_r_transform_derivative(-0.3, 2.0)).epsilon(1e-15));
}

TEST_CASE("zero-temperature entropy of the iid spectrum") {
  auto spec = mp_spectrum(2.0);
  // H0(zeta) = [zeta/(1+zeta) - ln(1+zeta)] / alpha, always <= 0, and 0 at 0.
  CHECK(zero_temperature_entropy(0.0, *spec) == Catch::Approx(0.0).margin(1e-14));
  for (double z : {0.1, 1.0, 1.2946, 10.0, 100.0}) {
    const double closed = (z / (1.0 + z) - std::log1p(z)) / 2.0;
    CHECK(zero_temperature_entropy(z, *spec) == Catch::Approx(closed).epsilon(1e-10));
    CHECK(zero_temperature_entropy(z, *spec) < 0.0);
  }
  CHECK(zero_temperature_entropy(1.294575719737, *spec) ==
        Catch::Approx(-0.13317918565).margin(2e-8));
}

TEST_CASE("path-loss Stieltjes transform against frozen oracles") {
  // Distance-attenuation profile: eigenvalue density of kappa * r^(-nu) with
  // r uniform on a disk annulus; parameters (alpha, nu, kappa) = (2, 2, 2).
  PathLossParams pl{2.0, 2.0, 2.0, 256};
  PathLossNumeric spec(pl);
  CHECK(spec.stieltjes(-1.0).G == Catch::Approx(0.720303582032).epsilon(1e-9));
  CHECK(spec.stieltjes(-0.3).G == Catch::Approx(1.594184389612).epsilon(1e-9));
  CHECK(spec.stieltjes(-5.0).G == Catch::Approx(0.183811294246).epsilon(1e-9));
}

TEST_CASE("path-loss R-transform against frozen oracles") {
  PathLossParams pl{2.0, 2.0, 2.0, 256};
  PathLossNumeric spec(pl);
  // Frozen values come from the direct per-point root-find; the cached
  // interpolant is compared to the direct path separately below.
  CHECK(spec.r_neg_direct(0.0) == Catch::Approx(0.2310490602).epsilon(1e-7));
  CHECK(spec.r_neg_direct(0.1) == Catch::Approx(0.2200548116).epsilon(1e-7));
  CHECK(spec.r_neg_direct(0.5) == Catch::Approx(0.1853198177).epsilon(1e-7));
  CHECK(spec.r_neg_direct(1.0) == Catch::Approx(0.1552453954).epsilon(1e-7));
  CHECK(spec.r_neg_direct(2.0) == Catch::Approx(0.1176650696).epsilon(1e-7));
  // Interpolation cache agrees with the direct per-point root-find.
  for (double w : {0.05, 0.77, 1.31, 3.9})
    CHECK(spec.r_neg(w) == Catch::Approx(spec.r_neg_direct(w)).margin(1e-6));
  // R(-w) is positive and strictly decreasing in w.
  double prev = spec.r_neg(0.0);
  for (double w = 0.25; w <= 10.0; w += 0.25) {
    const double r = spec.r_neg(w);
    CHECK(r > 0.0);
    CHECK(r < prev);
    prev = r;
  }
  // Derivative consistent with a finite difference of the cached curve.
  const double w0 = 1.0, h = 1e-4;
  const double fd = (spec.r_neg(w0 + h) - spec.r_neg(w0 - h)) / (2.0 * h);
  CHECK(-spec.r_neg_derivative(w0) == Catch::Approx(fd).margin(1e-5));
}

TEST_CASE("degenerate unit path loss reproduces the iid closed form") {
  // kappa = 1 concentrates the attenuation profile at gain 1, so the numeric
  // machinery must match the closed-form iid R-transform on w in [0, 10].
  PathLossNumeric deg(PathLossParams{2.0, 2.0, 1.0, 256});
  double maxerr = 0.0;
  for (double w = 0.0; w <= 10.0; w += 0.37)
    maxerr = std::max(maxerr, std::abs(deg.r_neg(w) - mp_r_transform(-w, 2.0)));
  CHECK(maxerr < 1e-6);
}

TEST_CASE("path-loss density nodes form a probability measure") {
  QuadNodes d = pathloss_density_nodes(2.0, 2.0, 256);
  double mass = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.w[i] >= 0.0);
    CHECK(d.x[i] > 0.0);
    mass += d.w[i];
    mean += d.w[i] * d.x[i];
  }
  CHECK(mass == Catch::Approx(1.0).epsilon(1e-12));
  // Mean eigenvalue equals R(0); for this profile the frozen value.
  PathLossNumeric spec(PathLossParams{2.0, 2.0, 2.0, 256});
  CHECK(mean / 2.0 == Catch::Approx(spec.r_neg(0.0)).epsilon(1e-9));
}
