// Scratch: circle + QPSK broken-symmetry solves vs prototype oracles.
#include <cstdio>
#include <ctime>
#include "lse_lab/replica_rsb.hpp"

using namespace lse_lab;

static double wall() { return static_cast<double>(clock()) / CLOCKS_PER_SEC; }

int main(int argc, char**) {
  RsConfig cfg;
  // circle alpha=1.5 and 2.0
  for (double alpha : {1.5, 2.0}) {
    cfg.spectrum = mp_spectrum(alpha);
    double t0 = wall();
    RsbSolution s = solve_rsb1(Constellation::circle(1.0), cfg);
    std::printf("circle a=%.1f: mu1=%.6f chi1=%.6f q1=%.8f p1=%.8f D=%.8f  (%.1fs)\n", alpha,
                s.mu1, s.chi1, s.q1, s.p1, s.D_rsb, wall() - t0);
  }
  std::printf("expect a=1.5: mu1=15.967947 chi1=2.285084 q1=0.93536543 p1=0.06463457 D=0.10839764\n");
  std::printf("expect a=2.0: mu1=42.092846 chi1=4.902520 q1=0.93046439 p1=0.06953561 D=0.02609662\n");

  if (argc > 1) {
    // QPSK alpha=2 (equals the two-point table at alpha=4): slow path
    cfg.spectrum = mp_spectrum(2.0);
    double t0 = wall();
    RsbSolution s = solve_rsb1(Constellation::mpsk(4, 1.0), cfg);
    std::printf("qpsk a=2: mu1=%.6f chi1=%.6f q1=%.8f D=%.8f scan=%d secant=%d (%.1fs)\n", s.mu1,
                s.chi1, s.q1, s.D_rsb, s.scan_points, s.secant_steps, wall() - t0);
    std::printf("expect:   mu1=15.264145 chi1=0.050559 q1=0.71203500 D=0.10805271\n");
    // mu1->0 degeneration for the two-point set at alpha=2
    cfg.spectrum = mp_spectrum(2.0);
    RsbSolution t = rsb_at_fixed_mu(Constellation::mpsk(2, 1.0), cfg, 1e-3, 32, 1.2, 0.6);
    const double chi_rs = rs_chi_mpsk(2, 1.0, 1.0, 2.0);
    const double D_rs = 2.0 / ((1.0 + chi_rs) * (1.0 + chi_rs));
    std::printf("mu->0: D_rsb=%.8f D_rs=%.8f diff=%.2e (want < 1e-4)\n", t.D_rsb, D_rs,
                std::abs(t.D_rsb - D_rs));
  }
  return 0;
}
