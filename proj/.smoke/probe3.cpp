#include <cstdio>
#include <cmath>
#include "lse_lab/replica_core.hpp"
using namespace lse_lab;

int main() {
  for (int ia = 0; ia < 8; ++ia) {
    double alpha = 2.0 * std::pow(2.5, ia / 7.0);
    for (int il = 0; il < 29; ++il) {
      double lam = 1e-9 * std::pow(1e14 / 1e-9, 0.0) * std::pow(10.0, il * 0.5);
      if (lam > 1e5) break;
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
      if (res >= 1e-12)
        std::printf("STUCK alpha=%.4f lam=%.3e: it=%d res=%.3e q=%.6e chi=%.6e omega=%.3f\n",
                    alpha, lam, it, res, q, chi, omega);
    }
  }
  std::printf("done\n");
  return 0;
}
