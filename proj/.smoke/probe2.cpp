#include <cstdio>
#include "lse_lab/replica_core.hpp"
using namespace lse_lab;

int main() {
  for (double gsu : {1e-4, 1e-2, 1.0, 10.0, 100.0}) {
    for (double lam : {1e-8, 1e-4, 1.0, 1e4}) {
      for (double P : {1.0, 2.0}) {
        const double alpha = 2.0;
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
        if (it >= 9999 || res >= 1e-12)
          std::printf("STUCK gsu=%.0e lam=%.0e P=%.0f: it=%d res=%.3e q=%.6e chi=%.6e omega=%.3f\n",
                      gsu, lam, P, it, res, q, chi, omega);
      }
    }
  }
  std::printf("done\n");
  return 0;
}
