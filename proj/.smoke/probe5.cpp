#include <cstdio>
#include "lse_lab/experiments.hpp"
using namespace lse_lab;
int main() {
  for (int trials : {50, 200}) {
    McConfig mc;
    mc.K = 12; mc.alpha = 2.0; mc.trials = trials; mc.seed = 1;
    mc.constellation = Constellation::mpsk(2, 1.0);
    mc.solver = SolverKind::CoordinateDescent; mc.restarts = 10;
    const McResult r = monte_carlo_distortion(mc);
    std::printf("K=12 trials=%3d: D=%.6f +- %.6f (D_rsb=0.399096, D_rs=0.379861)\n",
                trials, r.mean, r.stderr_of_mean);
  }
  McConfig mc;
  mc.K = 50; mc.alpha = 2.0; mc.trials = 30; mc.seed = 1;
  mc.constellation = Constellation::mpsk(2, 1.0);
  mc.solver = SolverKind::CoordinateDescent; mc.restarts = 10;
  const McResult r = monte_carlo_distortion(mc);
  std::printf("K=50 trials=30 : D=%.6f +- %.6f\n", r.mean, r.stderr_of_mean);
  return 0;
}
