#include <cstdio>
#include "lse_lab/replica_core.hpp"
using namespace lse_lab;

int main() {
  // mimic solve_rs_peak inner loop with tracing
  for (double lam : {1e-9, 1e-8, 1e-5, 1e-2, 1.0, 1e5}) {
    for (double alpha : {2.0, 10.0, 100.0}) {
      RsConfig cfg; cfg.gamma = 1.0; cfg.lambda = lam; cfg.spectrum = mp_spectrum(alpha);
      cfg.tol = 1e-12;
      const double P = 1.0, gsu = 1.0;
      double q = 0.1, chi = 0.1, omega = 0.5, prev = 1e300;
      int it = 0; double res = 0;
      for (; it < 10000; ++it) {
        double c = std::sqrt(alpha*(q+gsu))/(alpha*lam*(1.0+chi)+1.0);
        double t = P/(c*c), omexp = one_minus_exp_neg(t);
        double h = c*omexp + std::sqrt(P*kPi)*gauss_tail(std::sqrt(2.0*P)/c);
        double qn = c*c*omexp;
        double cn = h*(1.0+chi)*std::sqrt(alpha/(q+gsu));
        res = std::abs(qn-q)/std::max(1.0,std::abs(q)) + std::abs(cn-chi)/std::max(1.0,std::abs(chi));
        if (res < 1e-12) break;
        if (res > prev) omega = std::max(0.05, 0.5*omega);
        prev = res;
        q = std::max(0.0, q + omega*(qn-q));
        chi = std::max(0.0, chi + omega*(cn-chi));
      }
      std::printf("lam=%.0e alpha=%5.1f: it=%5d res=%.3e q=%.6f chi=%.6e omega=%.3f D=%.3e\n",
                  lam, alpha, it, res, q, chi, omega, (q+gsu)/((1+chi)*(1+chi)));
    }
  }
  return 0;
}
