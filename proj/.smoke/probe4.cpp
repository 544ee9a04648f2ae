#include <cstdio>
#include <cmath>
#include <vector>
#include "lse_lab/replica_core.hpp"
using namespace lse_lab;

static int worst_it = 0; static double worst_res = 0;
static void run(double alpha, double lam, double gsu, double P) {
  double q = 0.1, chi = 0.1;
  const double om = 0.5;
  int it = 0; double res = 0;
  for (; it < 200000; ++it) {
    double c = std::sqrt(alpha*(q+gsu))/(alpha*lam*(1.0+chi)+1.0);
    double t = P/(c*c), omexp = one_minus_exp_neg(t);
    double h = c*omexp + std::sqrt(P*kPi)*gauss_tail(std::sqrt(2.0*P)/c);
    double qn = c*c*omexp;
    double cn = h*(1.0+chi)*std::sqrt(alpha/(q+gsu));
    res = std::abs(qn-q)/std::max(1.0,std::abs(q)) + std::abs(cn-chi)/std::max(1.0,std::abs(chi));
    if (res < 1e-12) break;
    q = std::max(0.0, q + om*(qn-q));
    chi = std::max(0.0, chi + om*(cn-chi));
  }
  if (res >= 1e-12)
    std::printf("STUCK alpha=%.4f lam=%.3e gsu=%.3e P=%.1f: it=%d res=%.3e chi=%.3e\n",
                alpha, lam, gsu, P, it, res, chi);
  if (it > worst_it) { worst_it = it; worst_res = res; }
}

int main() {
  std::vector<double> alphas, lams, gsus;
  for (int i = 0; i <= 20; ++i) alphas.push_back(std::pow(10.0, -0.5 + 2.5 * i / 20.0)); // 0.316..100
  for (int i = 0; i <= 28; ++i) lams.push_back(std::pow(10.0, -9.0 + 0.5 * i));          // 1e-9..1e5
  for (int i = 0; i <= 12; ++i) gsus.push_back(std::pow(10.0, -4.0 + 0.5 * i));          // 1e-4..100
  for (double a : alphas) for (double l : lams) for (double g : gsus)
    for (double P : {1.0, 2.0}) run(a, l, g, P);
  std::printf("done; worst it=%d (res=%.2e)\n", worst_it, worst_res);
  return 0;
}
