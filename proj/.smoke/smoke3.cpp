// Scratch verification of precoders.hpp against pinned examples.
#include <cstdio>
#include <cmath>
#include "lse_lab/precoders.hpp"

using namespace lse_lab;

static int fails = 0;
#define CHECK(cond, label)                                        \
  do {                                                            \
    if (cond) std::printf("[ok]   %s\n", label);                  \
    else { std::printf("[FAIL] %s\n", label); ++fails; }          \
  } while (0)

static PrecodingInstance random_instance(int K, int N, double gamma,
                                         double lambda, Constellation con,
                                         std::uint64_t key) {
  GaussianStream gs(key);
  PrecodingInstance inst;
  inst.H.resize(K, N);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < N; ++j)
      inst.H(i, j) = gs.cnormal(1.0 / N);
  inst.u.resize(K);
  for (int i = 0; i < K; ++i) inst.u(i) = gs.cnormal(1.0);
  inst.gamma = gamma;
  inst.lambda = lambda;
  inst.constellation = con;
  return inst;
}

int main() {
  // 1) RZF scalar: H=[1], u=[2], gamma=lambda=1 -> v=[1], obj=2.
  {
    PrecodingInstance inst;
    inst.H = cmat::Ones(1, 1);
    inst.u = cvec::Ones(1) * 2.0;
    inst.gamma = 1.0;
    inst.lambda = 1.0;
    auto r = rzf_precode(inst);
    CHECK(std::abs(r.v(0) - cplx(1.0, 0.0)) < 1e-14 &&
              std::abs(r.objective - 2.0) < 1e-14,
          "rzf scalar v=1 obj=2");
  }
  // 2) lambda -> large: v -> 0.
  {
    auto inst = random_instance(4, 8, 1.0, 1e9, Constellation::full_complex(), 7);
    auto r = rzf_precode(inst);
    CHECK(r.v.norm() <= std::sqrt(inst.gamma) * inst.u.norm() * 1.0 / 1e8,
          "rzf large lambda shrinks v");
  }
  // 3) singular at lambda=0 (K=2, N=1 -> H H^H rank 1).
  {
    PrecodingInstance inst;
    inst.H = cmat::Ones(2, 1);
    inst.u = cvec::Ones(2);
    inst.lambda = 0.0;
    bool threw = false;
    std::string msg;
    try { rzf_precode(inst); } catch (const std::runtime_error& e) { threw = true; msg = e.what(); }
    CHECK(threw && msg.find("lambda > 0") != std::string::npos,
          "rzf singular error suggests lambda > 0");
  }
  // 4) first-order optimality of RZF on random K=4, N=8.
  {
    auto inst = random_instance(4, 8, 2.0, 0.3, Constellation::full_complex(), 11);
    auto r = rzf_precode(inst);
    cvec g = 2.0 * (inst.H.adjoint() * (inst.H * r.v - std::sqrt(inst.gamma) * inst.u))
             + 2.0 * inst.lambda * r.v;
    CHECK(g.lpNorm<Eigen::Infinity>() < 1e-8, "rzf gradient ~ 0");
  }
  // 5) PG scalar: H=[1], lambda=0, u=[3], P=1 -> v=[1], obj=4.
  {
    PrecodingInstance inst;
    inst.H = cmat::Ones(1, 1);
    inst.u = cvec::Ones(1) * 3.0;
    inst.lambda = 0.0;
    inst.constellation = Constellation::disk(1.0);
    auto r = precode_projected_gradient(inst);
    CHECK(std::abs(r.v(0) - cplx(1.0, 0.0)) < 1e-9 &&
              std::abs(r.objective - 4.0) < 1e-9 && r.converged,
          "pg scalar clip v=1 obj=4");
  }
  // 6) PG with P=1e6 matches RZF within 1e-6 relative (random K=8, N=16).
  {
    auto inst = random_instance(8, 16, 1.0, 0.2, Constellation::disk(1e6), 13);
    auto pg = precode_projected_gradient(inst);
    auto instf = inst;
    instf.constellation = Constellation::full_complex();
    auto rz = rzf_precode(instf);
    CHECK(std::abs(pg.objective - rz.objective) < 1e-6 * rz.objective,
          "pg(P=1e6) == rzf to 1e-6 rel");
  }
  // 7) PG monotone + projected fixed-point residual.
  {
    auto inst = random_instance(8, 16, 1.0, 0.1, Constellation::disk(0.5), 17);
    auto r = precode_projected_gradient(inst, 0.0, 1e-13, 20000);
    const double L = 2.0 * (inst.lambda + spectral_norm_squared(inst.H));
    cvec g = 2.0 * (inst.H.adjoint() * (inst.H * r.v - std::sqrt(inst.gamma) * inst.u))
             + 2.0 * inst.lambda * r.v;
    cvec w = r.v - (1.0 / L) * g;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w(i) = inst.constellation.project(w(i));
    CHECK((w - r.v).lpNorm<Eigen::Infinity>() < 1e-6 && r.converged,
          "pg fixed-point residual < 1e-6");
  }
  // 8) CD BPSK: N=2, K=1, H=[1 1], sqrt(gamma) u=[2] -> v=(+1,+1), obj 0.
  {
    PrecodingInstance inst;
    inst.H = cmat::Ones(1, 2);
    inst.u = cvec::Ones(1) * 2.0;
    inst.constellation = Constellation::mpsk(2, 1.0);
    auto r = precode_coordinate_descent(inst, 4, 99);
    CHECK(r.v(0) == cplx(1.0, 0.0) && r.v(1) == cplx(1.0, 0.0) &&
              std::abs(r.objective) < 1e-24,
          "cd bpsk (+1,+1) obj 0");
  }
  // 9) CD circle: H=[1], sqrt(gamma) u=[2i], P=1 -> v=[i], obj 1.
  {
    PrecodingInstance inst;
    inst.H = cmat::Ones(1, 1);
    inst.u.resize(1);
    inst.u(0) = cplx(0.0, 2.0);
    inst.constellation = Constellation::circle(1.0);
    auto r = precode_coordinate_descent(inst, 4, 5);
    CHECK(std::abs(r.v(0) - cplx(0.0, 1.0)) < 1e-12 &&
              std::abs(r.objective - 1.0) < 1e-12,
          "cd circle v=i obj 1");
  }
  // 10) CD vs exhaustive, BPSK N=12, K=6, 20 seeds, 200 restarts.
  {
    int hits = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < 20; ++t) {
      auto inst = random_instance(6, 12, 1.0, 0.0, Constellation::mpsk(2, 1.0),
                                  1000 + t);
      auto ex = exhaustive_oracle(inst);
      auto cd = precode_coordinate_descent(inst, 200, 2000 + t);
      if (cd.objective <= ex.objective * (1.0 + 1e-9) + 1e-12) ++hits;
      worst_gap = std::max(worst_gap, cd.objective - ex.objective);
      if (cd.objective < ex.objective - 1e-9) {
        CHECK(false, "cd below exhaustive (impossible)");
      }
    }
    std::printf("       cd-vs-exhaustive hits %d/20, worst gap %.3e\n", hits, worst_gap);
    CHECK(hits >= 19, "cd >= 95% optimal at 200 restarts");
  }
  // 11) exhaustive refusal above 2^22.
  {
    auto inst = random_instance(2, 23, 1.0, 0.0, Constellation::mpsk(2, 1.0), 3);
    bool threw = false;
    std::string msg;
    try { exhaustive_oracle(inst); } catch (const std::invalid_argument& e) { threw = true; msg = e.what(); }
    CHECK(threw && msg.find("2^22") != std::string::npos, "exhaustive refusal");
  }
  // 12) scaling covariance: u -> 2u doubles v, quadruples objective.
  {
    auto inst = random_instance(4, 8, 1.0, 0.4, Constellation::full_complex(), 23);
    auto r1 = rzf_precode(inst);
    auto inst2 = inst;
    inst2.u *= 2.0;
    auto r2 = rzf_precode(inst2);
    CHECK((r2.v - 2.0 * r1.v).norm() < 1e-12 * r1.v.norm() &&
              std::abs(r2.objective - 4.0 * r1.objective) < 1e-10 * r1.objective,
          "scaling covariance");
  }
  // 13) feasibility exactness (circle magnitudes, mpsk grid membership).
  {
    auto inst = random_instance(6, 12, 1.0, 0.0, Constellation::circle(2.0), 29);
    auto r = precode_coordinate_descent(inst, 3, 7);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < r.v.size(); ++i)
      worst = std::max(worst, std::abs(std::norm(r.v(i)) - 2.0));
    CHECK(worst <= 1e-12, "circle |v|^2 == P to 1e-12");

    auto instm = random_instance(6, 12, 1.0, 0.0, Constellation::mpsk(8, 1.0), 31);
    auto rm = precode_coordinate_descent(instm, 3, 9);
    auto pts = instm.constellation.points();
    bool all_exact = true;
    for (Eigen::Index i = 0; i < rm.v.size(); ++i) {
      bool member = false;
      for (const auto& p : pts) member = member || (rm.v(i) == p);
      all_exact = all_exact && member;
    }
    CHECK(all_exact, "mpsk entries bit-exact grid members");
  }
  // 14) empirical distortion: v=0 -> gamma ||u||^2 / K.
  {
    auto inst = random_instance(5, 10, 2.0, 0.0, Constellation::full_complex(), 37);
    cvec z = cvec::Zero(10);
    const double d = empirical_distortion(inst.H, inst.u, z, inst.gamma);
    CHECK(std::abs(d - inst.gamma * inst.u.squaredNorm() / 5.0) < 1e-12,
          "empirical distortion at v=0");
  }
  // 15) CD on full-complex converges to the RZF point (restart-invariant).
  {
    auto inst = random_instance(4, 8, 1.0, 0.5, Constellation::full_complex(), 41);
    auto rz = rzf_precode(inst);
    auto cd = precode_coordinate_descent(inst, 5, 43);
    CHECK(std::abs(cd.objective - rz.objective) < 1e-8 * rz.objective,
          "cd full-complex == rzf");
  }
  // 16) CD on disk matches PG objective.
  {
    auto inst = random_instance(8, 16, 1.0, 0.1, Constellation::disk(0.5), 47);
    auto pg = precode_projected_gradient(inst);
    auto cd = precode_coordinate_descent(inst, 5, 49);
    CHECK(std::abs(cd.objective - pg.objective) < 1e-7 * pg.objective,
          "cd disk == pg disk");
  }
  // 17) determinism: same seed -> bit-identical result.
  {
    auto inst = random_instance(6, 12, 1.0, 0.0, Constellation::mpsk(4, 1.0), 53);
    auto a = precode_coordinate_descent(inst, 10, 71);
    auto b = precode_coordinate_descent(inst, 10, 71);
    bool same = a.objective == b.objective;
    for (Eigen::Index i = 0; i < a.v.size(); ++i) same = same && (a.v(i) == b.v(i));
    CHECK(same, "cd deterministic given seed");
  }
  std::printf(fails == 0 ? "ALL OK\n" : "FAILURES: %d\n", fails);
  return fails == 0 ? 0 : 1;
}
