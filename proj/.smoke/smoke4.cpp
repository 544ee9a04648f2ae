// Smoke checks for experiments.hpp against frozen prototype oracles.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lse_lab/experiments.hpp"

using namespace lse_lab;

static int fails = 0;
static void check(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "[ok]  " : "[FAIL]", what.c_str());
  if (!ok) ++fails;
}
static bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  // 1) tune_rzf closed forms.
  {
    const RzfTuning t1 = tune_rzf(1.0, 1.0, 1.0);
    check(near(t1.chi_opt, (std::sqrt(5.0) - 1.0) / 2.0, 1e-14), "tune_rzf alpha=1 chi=(sqrt5-1)/2");
    check(near(t1.lambda_opt, 1.0, 1e-12), "tune_rzf alpha=1 lambda=1 exactly");
    const RzfTuning t5 = tune_rzf(5.0, 1.0, 1.0);
    check(near(t5.chi_opt, (3.0 + std::sqrt(29.0)) / 2.0, 1e-12), "tune_rzf alpha=5 chi");
    check(near(t5.lambda_opt, 0.2, 1e-12), "tune_rzf alpha=5 lambda=0.2");
    check(near(t5.gamma, 6.669615, 5e-6), "tune_rzf alpha=5 gamma=6.669615");
    check(near(t5.rate_bound, 2.37645221, 1e-7), "tune_rzf alpha=5 rate=2.37645221");
  }

  // 2) tune_constellation on the unconstrained set reproduces tune_rzf.
  {
    const RzfTuning t5 = tune_rzf(5.0, 1.0, 1.0);
    const TuneResult r = tune_constellation(Constellation::full_complex(), 5.0, 1.0, 1.0);
    std::printf("      full tune: lambda=%.10f gamma=%.10f rate=%.10f\n", r.lambda, r.gamma, r.rate_bound);
    check(near(r.lambda, t5.lambda_opt, 1e-6), "tune full lambda matches closed form 1e-6");
    check(near(r.gamma, t5.gamma, 1e-6), "tune full gamma matches closed form 1e-6");
    check(near(r.rate_bound, t5.rate_bound, 1e-9), "tune full rate matches closed form");
  }

  // 3) union bound table.
  {
    check(near(union_bound_epsilon(2.0, 2).epsilon_star, 0.203657, 2e-6), "union eps(2,2)=0.203657");
    check(near(union_bound_epsilon(1.0, 2).epsilon_star, 0.4639219, 2e-6), "union eps(1,2)=0.4639219");
    check(near(union_bound_epsilon(3.0, 2).epsilon_star, 0.09651703, 1e-6), "union eps(3,2)");
    check(near(union_bound_epsilon(4.0, 2).epsilon_star, 0.04708026, 1e-6), "union eps(4,2)");
    check(near(union_bound_epsilon(2.0, 4).epsilon_star, 0.04708026, 1e-6), "union eps(2,4)=eps(4,2)");
    check(near(union_bound_epsilon(2.0, 8).epsilon_star, 0.011562890, 1e-7), "union eps(2,8)");
    check(near(union_bound_epsilon(0.5, 2).epsilon_star, 0.761240, 2e-6), "union eps(0.5,2)=0.761240");
    // adaptive low bracket for a huge rhs
    const double e_big = union_bound_epsilon(40.0, 2).epsilon_star;
    check(e_big > 0 && e_big < 1e-11, "union eps(40,2) tiny but positive");
  }

  // 4) rate bound basics.
  check(near(rate_lower_bound(1, 1, 1, 0), 0.0, 1e-15), "rate(1,1,1,0)=0");
  check(near(rate_lower_bound(4, 1, 1, 1), 1.0, 1e-15), "rate(4,1,1,1)=1");

  // 5) Monte Carlo, closed-form solver: alpha=2, lambda=0.1, K=100, 50 trials.
  {
    McConfig mc;
    mc.K = 100; mc.alpha = 2.0; mc.trials = 50; mc.seed = 1;
    mc.constellation = Constellation::full_complex();
    mc.gamma = 1.0; mc.lambda = 0.1; mc.solver = SolverKind::Rzf;
    const McResult r = monte_carlo_distortion(mc);
    std::printf("      mc rzf: mean=%.6f stderr=%.6f used=%d\n", r.mean, r.stderr_of_mean, r.trials_used);
    check(near(r.mean, 0.034493, 2e-5), "mc rzf mean pinned (own stream) 0.034493");
    check(near(r.mean, 0.0345224838, 3.0 * r.stderr_of_mean + 1e-9), "mc rzf within 3 sigma of RS");
    check(r.trials_used == 50 && r.trials_excluded == 0, "mc rzf no exclusions");

    McConfig mc4 = mc; mc4.threads = 4;
    const McResult r4 = monte_carlo_distortion(mc4);
    check(r4.mean == r.mean && r4.stderr_of_mean == r.stderr_of_mean, "mc thread-count invariant (bitwise)");
  }

  // 6) Null precoder: distortion -> gamma sigma_u^2.
  {
    McConfig mc;
    mc.K = 200; mc.alpha = 1.0; mc.trials = 40; mc.seed = 3;
    mc.gamma = 2.0; mc.sigma_u2 = 1.5; mc.solver = SolverKind::NullPrecoder;
    const McResult r = monte_carlo_distortion(mc);
    check(near(r.mean, 3.0, 0.15), "null precoder mean ~ gamma sigma_u2 = 3");
  }

  // 7) Exclusion budget: projected gradient strangled to 1 iteration.
  {
    McConfig mc;
    mc.K = 16; mc.alpha = 2.0; mc.trials = 10; mc.seed = 1;
    mc.constellation = Constellation::disk(1.0);
    mc.solver = SolverKind::ProjectedGradient;
    mc.pg_max_iter = 1; mc.pg_tol = 1e-16; mc.lambda = 0.1;
    bool threw = false;
    try { monte_carlo_distortion(mc); } catch (const ExperimentError&) { threw = true; }
    check(threw, "unconverged trials above 10% raise ExperimentError");
  }

  // 8) Disk MC (projected gradient) vs peak-power RS prediction 0.050694.
  {
    McConfig mc;
    mc.K = 32; mc.alpha = 2.0; mc.trials = 40; mc.seed = 1;
    mc.constellation = Constellation::disk(1.0);
    mc.gamma = 1.0; mc.lambda = 0.1; mc.solver = SolverKind::ProjectedGradient;
    const McResult r = monte_carlo_distortion(mc);
    std::printf("      mc disk: mean=%.6f stderr=%.6f\n", r.mean, r.stderr_of_mean);
    check(near(r.mean, 0.050694, 4.0 * r.stderr_of_mean + 2e-3), "mc disk near RS 0.050694");
  }

  // 9) OFDM: dense vs structured, KS sanity.
  {
    const OfdmResult o = ofdm_equivalence(4, 8, 8, 7);
    const std::vector<double> dense = ofdm_dense_gramian_eigs(4, 8, 8, 7);
    check(o.pooled.size() == dense.size(), "ofdm pooled size = dense size");
    double dmax = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i)
      dmax = std::max(dmax, std::abs(o.pooled[i] - dense[i]));
    std::printf("      ofdm dense-vs-structured max diff = %.3e\n", dmax);
    check(dmax < 1e-12, "ofdm dense equals pooled per-block spectra");
    check(o.unitarity_error < 1e-12, "DFT factor unitary to 1e-12");

    const OfdmResult big = ofdm_equivalence(64, 128, 128, 11);
    std::printf("      ofdm KS(L=64,K=N=128) = %.4f\n", big.ks_distance);
    check(big.ks_distance < 0.05, "ofdm KS < 0.05 at L=64");

    bool guarded = false;
    try { ofdm_dense_gramian_eigs(64, 128, 128, 1); } catch (const ExperimentError&) { guarded = true; }
    check(guarded, "dense path memory guard trips at L=64,N=128");
  }

  // 10) Power decay fit.
  {
    std::vector<double> al;
    for (int i = 0; i < 12; ++i) al.push_back(10.0 * std::pow(10.0, i / 11.0));
    const PowerDecayResult r = power_decay_fit(0.1, al, 1.0);
    std::printf("      power decay kappa[10,100] = %.4f\n", r.kappa);
    check(near(r.kappa, -1.0, 0.1), "kappa = -1 +- 0.1 on alpha in [10,100]");

    std::vector<double> al2;
    for (int i = 0; i < 8; ++i) al2.push_back(2.0 * std::pow(2.5, i / 7.0));
    const PowerDecayResult r2 = power_decay_fit(0.1, al2, 1.0);
    std::printf("      power decay kappa[2,5]  = %.4f\n", r2.kappa);
    check(r2.kappa < -1.0, "kappa < -1 on alpha in [2,5]");

    const PowerDecayResult r3 = power_decay_fit(0.1, al, 2.0);
    std::printf("      power decay kappa P=2   = %.4f\n", r3.kappa);
    check(std::abs(r3.kappa - r.kappa) < 0.05, "doubling P moves kappa < 0.05");

    bool threw = false;
    try { power_decay_fit(1e-9, {2.0, 3.0}, 1.0); } catch (const ExperimentError&) { threw = true; }
    check(threw, "unattainable target reports infeasibility");
  }

  // 11) rs_dispatch closed form vs generic solver (unconstrained set).
  {
    RsConfig cfg; cfg.gamma = 1.0; cfg.lambda = 0.1; cfg.spectrum = mp_spectrum(2.0);
    const RsSolution a = rs_dispatch(Constellation::full_complex(), cfg);
    const RsSolution b = solve_rs_generic(Constellation::full_complex(), cfg);
    check(near(a.chi, 2.0 + std::sqrt(14.0), 1e-12), "dispatch full chi = 2+sqrt(14)");
    check(near(a.q, 0.5690449676, 1e-9), "dispatch full q");
    check(near(a.D_rs, 0.0345224838, 1e-9), "dispatch full D");
    check(near(a.q, b.q, 1e-7) && near(a.chi, b.chi, 1e-6), "dispatch matches generic solver");
  }

  // 12) Sweep rows.
  {
    SweepConfig sc;
    sc.constellation = Constellation::full_complex();
    sc.gamma = 1.0; sc.lambda = 0.1;
    SweepRow row = compute_sweep_row(sc, 2.0);
    check(row.rs_valid && near(row.D_rs, 0.0345224838, 1e-9), "sweep full row D_rs");
    check(near(row.rate_bound, std::log2(1.0 / (1.0 + row.D_rs)), 1e-12), "sweep rate at D_rs");
    check(std::isnan(row.union_eps), "no union bound on the unconstrained set");

    SweepConfig sb;
    sb.constellation = Constellation::mpsk(2, 1.0);
    sb.with_rsb = true;
    SweepRow r7 = compute_sweep_row(sb, 7.0);
    std::printf("      bpsk alpha=7: rs_valid=%d alpha*=%.4f mu1=%.3f D_rsb=%.6f eps=%.6f\n",
                int(r7.rs_valid), r7.alpha_star, r7.mu1, r7.D_rsb, r7.union_eps);
    check(!r7.rs_valid, "bpsk alpha=7 flagged RS-divergent");
    check(near(r7.alpha_star, 2.0 * kPi, 1e-9), "alpha* = 2 pi");
    check(r7.has_rsb && near(r7.mu1, 99.165, 0.05), "bpsk alpha=7 rsb mu1 ~ 99.165");
    check(near(r7.D_rsb, 0.010339, 2e-5), "bpsk alpha=7 D_rsb ~ 0.010339");
    check(near(r7.union_eps, union_bound_epsilon(7.0, 2).epsilon_star, 1e-15), "union eps on the row");

    SweepConfig sm;
    sm.constellation = Constellation::mpsk(2, 1.0);
    sm.with_mc = true;
    sm.mc.K = 12; sm.mc.trials = 10; sm.mc.seed = 1;
    sm.mc.solver = SolverKind::CoordinateDescent; sm.mc.restarts = 10;
    SweepRow r2 = compute_sweep_row(sm, 2.0);
    std::printf("      bpsk alpha=2 mc: D=%.6f +- %.6f\n", r2.D_mc_mean, r2.D_mc_stderr);
    check(r2.has_mc && r2.trials == 10, "bpsk mc row ran 10 trials");
    check(r2.D_mc_mean > 0.3 && r2.D_mc_mean < 0.7, "bpsk mc mean in a sane band");
    check(near(r2.rate_bound, std::log2(1.0 / (1.0 + r2.D_mc_mean)), 1e-12), "rate at measured D");
  }

  // 13) Circle tuning runs and pins q to the symbol power.
  {
    const TuneResult r = tune_constellation(Constellation::circle(1.0), 2.0, 0.0, 1.0);
    std::printf("      circle tune alpha=2: gamma=%.6f rate=%.6f chi=%.4f\n", r.gamma, r.rate_bound, r.chi);
    check(r.lambda == 0.0 && r.q == 1.0, "circle tune: lambda=0, q=P");
    check(r.rate_bound > 0.0, "circle tune: positive rate");
  }

  // 14) Disk tuning hits the target power.
  {
    const TuneResult r = tune_constellation(Constellation::disk(2.0), 2.0, 0.5, 1.0);
    std::printf("      disk tune: lambda=%.6g gamma=%.6f q=%.8f rate=%.6f\n", r.lambda, r.gamma, r.q, r.rate_bound);
    check(near(r.q, 0.5, 1e-6), "disk tune q = q_target to 1e-6");
    check(r.lambda > 0.0, "disk tune lambda > 0");
  }

  // 15) KS distance basics.
  {
    check(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0, "KS identical samples = 0");
    check(ks_distance({1, 2}, {5, 6}) == 1.0, "KS disjoint samples = 1");
  }

  std::printf("%s (%d failures)\n", fails == 0 ? "ALL OK" : "FAILURES", fails);
  return fails == 0 ? 0 : 1;
}
