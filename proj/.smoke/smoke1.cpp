// Scratch smoke test for the replica headers (not part of the build).
#include <cstdio>
#include <cmath>
#include "lse_lab/replica_core.hpp"
#include "lse_lab/replica_rsb.hpp"

using namespace lse_lab;

int main() {
  // 1) iid closed-form fixed point (regularized zero-forcing oracle).
  RsConfig cfg;
  cfg.spectrum = mp_spectrum(2.0);
  cfg.lambda = 0.1;
  RsSolution fc = solve_rs_generic(Constellation::full_complex(), cfg);
  std::printf("FC: q=%.10f chi=%.10f D=%.10f resid=%.2e\n", fc.q, fc.chi, fc.D_rs, fc.residual);
  std::printf("    expect q=0.5690449676 chi=5.7416573868 D=0.0345224838\n");

  // 2) peak solver large-P degeneration.
  RsSolution pk = solve_rs_peak(1e6, cfg);
  std::printf("peak P=1e6: q=%.10f chi=%.10f (c=%.6f h=%.6f)\n", pk.q, pk.chi, pk.c, pk.h);

  // disk generic at P=1 (frozen oracle D=0.050694 at lambda=0.1):
  RsSolution dk = solve_rs_generic(Constellation::disk(1.0), cfg);
  RsSolution dkp = solve_rs_peak(1.0, cfg);
  std::printf("disk P=1: generic D=%.8f peak D=%.8f (oracle 0.050694) dq=%.2e dchi=%.2e\n",
              dk.D_rs, dkp.D_rs, std::abs(dk.q - dkp.q), std::abs(dk.chi - dkp.chi));

  // 3) two-point phase grid chi (closed form + generic quadrature).
  RsConfig cfg0;
  cfg0.spectrum = mp_spectrum(2.0);
  const double chi_b = rs_chi_mpsk(2, 1.0, 1.0, 2.0);
  RsSolution bp = solve_rs_generic(Constellation::mpsk(2, 1.0), cfg0);
  std::printf("bpsk: closed chi=%.12f generic chi=%.12f q=%.10f\n", chi_b, bp.chi, bp.q);
  std::printf("      expect 1.294575719737\n");
  const double chi_ce = rs_chi_constant_envelope(1.0, 1.0, 2.0);
  RsSolution ce = solve_rs_generic(Constellation::circle(1.0), cfg0);
  std::printf("circle: closed chi=%.12f generic chi=%.12f (expect 7.789425828382), D=%.10f "
              "(expect 0.0258886250)\n", chi_ce, ce.chi, ce.D_rs);

  // 4) divergence threshold.
  try {
    rs_chi_mpsk(2, 1.0, 1.0, 7.0);
    std::printf("ERROR: no divergence thrown\n");
  } catch (const DivergedRsError& ex) {
    std::printf("diverged ok: alpha*=%.6f msg=[%s]\n", ex.alpha_star, ex.what());
  }

  // 5) entropy closed form.
  std::printf("H0(1.2946, alpha=2)=%.6f (expect about -0.1332)\n",
              zero_temperature_entropy(1.2946, *cfg0.spectrum));

  // 6) path-loss spectrum oracle chain.
  PathLossParams pl{2.0, 2.0, 2.0, 256};
  PathLossNumeric pls(pl);
  std::printf("pathloss: G(-1)=%.12f (expect 0.720303582032)\n", pls.stieltjes(-1.0).G);
  std::printf("          R(0)=%.10f (expect 0.2310490602) R(1)=%.10f (expect 0.1552453954)\n",
              pls.r_neg(0.0), pls.r_neg(1.0));
  std::printf("          R(0.5)=%.10f (expect 0.1853198177) R(2)=%.10f (expect 0.1176650696)\n",
              pls.r_neg(0.5), pls.r_neg(2.0));
  std::printf("          direct R(1)=%.12f cache-direct diff=%.2e\n", pls.r_neg_direct(1.0),
              std::abs(pls.r_neg(1.0) - pls.r_neg_direct(1.0)));
  // degenerate kappa=1 equals the closed form
  PathLossNumeric deg(PathLossParams{2.0, 2.0, 1.0, 256});
  double maxerr = 0.0;
  for (double w = 0.0; w <= 10.0; w += 0.37) {
    const double err = std::abs(deg.r_neg(w) - mp_r_transform(-w, 2.0));
    maxerr = std::max(maxerr, err);
  }
  std::printf("          degenerate-vs-closed max err=%.2e (want < 1e-6)\n", maxerr);

  // 7) two-point broken-symmetry solve at alpha=2 (frozen oracle).
  RsbSolution rb = solve_rsb1(Constellation::mpsk(2, 1.0), cfg0);
  std::printf("rsb bpsk a=2: mu1=%.5f chi1=%.6f q1=%.6f D=%.8f\n", rb.mu1, rb.chi1, rb.q1,
              rb.D_rsb);
  std::printf("   expect    mu1=5.90394 chi1=0.090754 q1=0.781915 D=0.39909600\n");
  std::printf("   entropy0=%.6f fourth=%.2e scan=%d secant=%d\n", rb.entropy0,
              rb.fourth_residual, rb.scan_points, rb.secant_steps);
  return 0;
}
