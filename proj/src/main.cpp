// Command-line front end: replica predictions (RS / one-step RSB), finite-size
// Monte Carlo, tuning, the phase-grid union bound, the multicarrier Gramian
// spectrum check, and the power-decay exponent fit.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure (diagnostics on
// standard error).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lse_lab/experiments.hpp"
#include "lse_lab/io.hpp"
#include "lse_lab/replica_core.hpp"
#include "lse_lab/replica_rsb.hpp"
#include "lse_lab/spectra.hpp"

namespace {

using nlohmann::json;
using namespace lse_lab;

// ------------------------------------------------------------ JSON config

std::string scalar_to_input(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Adapter so --config accepts a JSON object; nested objects scope keys to a
// subcommand ({"sweep": {"alphas": "1,2,3"}}).  Arrays are joined with
// commas.  Command-line flags win over config values; unknown keys are
// rejected by the parser.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::FileError("config must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    walk(j, {}, out);
    return out;
  }

 private:
  static void walk(const json& j, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json& v = it.value();
      if (v.is_object()) {
        auto p = parents;
        p.push_back(it.key());
        walk(v, std::move(p), out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) {
          if (!joined.empty()) joined.push_back(',');
          joined += scalar_to_input(e);
        }
        item.inputs.push_back(joined);
      } else {
        item.inputs.push_back(scalar_to_input(v));
      }
      out.push_back(std::move(item));
    }
  }
};

// ------------------------------------------------------------- small helpers

Constellation make_set(const std::string& set, int M, double p) {
  if (set == "full" || set == "full-complex") return Constellation::full_complex();
  if (set == "disk") return Constellation::disk(p);
  if (set == "circle") return Constellation::circle(p);
  if (set == "mpsk") return Constellation::mpsk(M, p);
  throw std::invalid_argument("unknown set '" + set + "' (full|disk|circle|mpsk)");
}

struct SpectrumFlags {
  std::string kind = "iid";
  double nu = 2.0;
  double kappa = 2.0;
};

std::shared_ptr<const SpectrumModel> make_spectrum(const SpectrumFlags& sf,
                                                   double alpha) {
  if (sf.kind == "iid") return mp_spectrum(alpha);
  if (sf.kind == "pathloss") {
    PathLossParams pl;
    pl.alpha = alpha;
    pl.nu = sf.nu;
    pl.kappa = sf.kappa;
    return std::make_shared<const PathLossNumeric>(pl);
  }
  throw std::invalid_argument("unknown spectrum '" + sf.kind + "' (iid|pathloss)");
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse number '" + tok + "' in list");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size())
      throw std::invalid_argument("cannot parse number '" + tok + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

// LSE_LAB_THREADS caps worker parallelism (0 = auto).
int resolve_threads(int requested) {
  const auto hw = [] {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
  };
  const char* env = std::getenv("LSE_LAB_THREADS");
  if (env == nullptr || *env == '\0')
    return requested;  // 0 propagates as auto downstream
  int cap = 0;
  try {
    cap = std::stoi(env);
  } catch (const std::exception&) {
    throw std::invalid_argument("LSE_LAB_THREADS must be an integer");
  }
  const int cap_eff = cap <= 0 ? hw() : cap;
  const int req_eff = requested <= 0 ? hw() : requested;
  return std::max(1, std::min(req_eff, cap_eff));
}

void echo_config(const std::string& name, const json& cfg) {
  std::fprintf(stderr, "config %s: %s\n", name.c_str(), cfg.dump().c_str());
}

struct RunContext {
  std::string manifest_path;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  void finish(const std::string& command, const json& cfg,
              const std::vector<std::string>& outputs) const {
    if (manifest_path.empty()) return;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_manifest(manifest_path, command, cfg, outputs, secs);
  }
};

void print_kv(const char* key, double v) { std::printf("%s = %.10g\n", key, v); }
void print_kv(const char* key, const std::string& v) {
  std::printf("%s = %s\n", key, v.c_str());
}

// -------------------------------------------------------------- subcommands

struct RsArgs {
  std::string set = "full";
  int M = 4;
  double p = 1.0;
  double alpha = 0.0;
  double gamma = 1.0;
  double lambda = 0.0;
  double sigma_u2 = 1.0;
  int quad_order = 80;
  SpectrumFlags spectrum;
};

void add_set_flags(CLI::App* c, RsArgs& a) {
  c->add_option("--set", a.set,
                "input set of the precoder entries: full (unconstrained complex "
                "plane), disk (peak power |x|^2 <= p), circle (constant envelope "
                "|x|^2 = p), mpsk (p-power phase grid with M points)")
      ->check(CLI::IsMember({"full", "full-complex", "disk", "circle", "mpsk"}));
  c->add_option("--M", a.M, "number of points of the phase grid (mpsk set)")
      ->check(CLI::PositiveNumber);
  c->add_option("--p,--P", a.p,
                "power of the set: peak power of the disk, squared envelope of "
                "circle/mpsk symbols")
      ->check(CLI::NonNegativeNumber);
}

void add_rs_flags(CLI::App* c, RsArgs& a) {
  add_set_flags(c, a);
  c->add_option("--alpha", a.alpha,
                "load ratio alpha = N/K (transmit antennas per user)")
      ->required()
      ->check(CLI::PositiveNumber);
  c->add_option("--gamma", a.gamma,
                "gain of the scaled target sqrt(gamma) u in the residual")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--lambda", a.lambda,
                "penalty weight of the transmit-energy term lambda ||x||^2 "
                "(active on full/disk sets)")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--sigma-u2", a.sigma_u2, "variance of the data entries u_k")
      ->check(CLI::PositiveNumber);
  c->add_option("--quad-order", a.quad_order,
                "quadrature order of the scalar-denoiser Gaussian averages")
      ->check(CLI::PositiveNumber);
  c->add_option("--spectrum", a.spectrum.kind,
                "channel Gramian spectrum: iid entries or a distance-decay "
                "(path-loss) profile")
      ->check(CLI::IsMember({"iid", "pathloss"}));
  c->add_option("--nu", a.spectrum.nu, "path-loss decay exponent (pathloss spectrum)")
      ->check(CLI::PositiveNumber);
  c->add_option("--kappa", a.spectrum.kappa,
                "max/min distance ratio of the path-loss profile (>= 1)");
}

json rs_args_json(const RsArgs& a) {
  return json{{"set", a.set},        {"M", a.M},
              {"p", a.p},            {"alpha", a.alpha},
              {"gamma", a.gamma},    {"lambda", a.lambda},
              {"sigma_u2", a.sigma_u2}, {"quad_order", a.quad_order},
              {"spectrum", a.spectrum.kind}, {"nu", a.spectrum.nu},
              {"kappa", a.spectrum.kappa}};
}

RsConfig build_rs_config(const RsArgs& a) {
  RsConfig cfg;
  cfg.gamma = a.gamma;
  cfg.sigma_u2 = a.sigma_u2;
  cfg.lambda = a.lambda;
  cfg.quad_order = a.quad_order;
  cfg.spectrum = make_spectrum(a.spectrum, a.alpha);
  return cfg;
}

int run_replica_rs(const RsArgs& a, const RunContext& ctx) {
  const json cfg_json = rs_args_json(a);
  echo_config("replica-rs", cfg_json);
  const Constellation con = make_set(a.set, a.M, a.p);
  const RsConfig cfg = build_rs_config(a);
  const RsSolution sol = rs_dispatch(con, cfg);
  print_kv("set", con.name());
  print_kv("alpha", a.alpha);
  print_kv("q", sol.q);
  print_kv("chi", sol.chi);
  print_kv("e", sol.e);
  print_kv("f", sol.f);
  print_kv("D_rs", sol.D_rs);
  print_kv("entropy0", sol.entropy0);
  print_kv("residual", sol.residual);
  ctx.finish("replica-rs", cfg_json, {});
  return 0;
}

int run_replica_rsb(const RsArgs& a, int rsb_quad_order, const RunContext& ctx) {
  json cfg_json = rs_args_json(a);
  cfg_json["rsb_quad_order"] = rsb_quad_order;
  echo_config("replica-rsb", cfg_json);
  const Constellation con = make_set(a.set, a.M, a.p);
  if (con.kind() != SetKind::Mpsk && con.kind() != SetKind::Circle)
    throw std::invalid_argument(
        "replica-rsb: the one-step breaking ansatz applies to the mpsk and "
        "circle sets (convex sets are exactly described by the symmetric point)");
  const RsConfig cfg = build_rs_config(a);
  const RsbSolution sol = solve_rsb1(con, cfg, rsb_quad_order);
  print_kv("set", con.name());
  print_kv("alpha", a.alpha);
  print_kv("mu1", sol.mu1);
  print_kv("chi1", sol.chi1);
  print_kv("q1", sol.q1);
  print_kv("p1", sol.p1);
  print_kv("eta1", sol.eta1);
  print_kv("D_rsb", sol.D_rsb);
  print_kv("entropy0", sol.entropy0);
  print_kv("residual", sol.residual);
  print_kv("stationarity", sol.fourth_residual);
  try {
    const RsSolution rs = rs_dispatch(con, cfg);
    print_kv("D_rs", rs.D_rs);
  } catch (const DivergedRsError& e) {
    print_kv("rs_valid", std::string("0"));
    print_kv("alpha_star", e.alpha_star);
  }
  ctx.finish("replica-rsb", cfg_json, {});
  return 0;
}

struct SimArgs {
  RsArgs rs;
  int K = 100;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string solver = "auto";
  int restarts = 10;
  double pg_tol = 1e-10;
  int pg_max_iter = 5000;
  int threads = 0;
};

void add_sim_flags(CLI::App* c, SimArgs& s) {
  c->add_option("--K", s.K, "number of users (rows of the channel matrix)")
      ->check(CLI::PositiveNumber);
  c->add_option("--trials", s.trials, "number of independent (H, u) draws")
      ->check(CLI::PositiveNumber);
  c->add_option("--seed", s.seed, "base seed; trial t draws from stream seed + t");
  c->add_option("--solver", s.solver,
                "precoder: auto picks the closed form (full), projected "
                "gradient (disk) or restarted coordinate descent "
                "(circle/mpsk); null sends x = 0")
      ->check(CLI::IsMember({"auto", "rzf", "pg", "cd", "null"}));
  c->add_option("--restarts", s.restarts,
                "random restarts of the coordinate-descent search")
      ->check(CLI::PositiveNumber);
  c->add_option("--pg-tol", s.pg_tol,
                "relative objective-decrease stop of projected gradient");
  c->add_option("--pg-max-iter", s.pg_max_iter,
                "iteration cap of projected gradient")
      ->check(CLI::PositiveNumber);
  c->add_option("--threads", s.threads,
                "worker threads for trials (0 = auto; LSE_LAB_THREADS caps)");
}

json sim_args_json(const SimArgs& s) {
  json j = rs_args_json(s.rs);
  j["K"] = s.K;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["solver"] = s.solver;
  j["restarts"] = s.restarts;
  j["pg_tol"] = s.pg_tol;
  j["pg_max_iter"] = s.pg_max_iter;
  j["threads"] = s.threads;
  return j;
}

McConfig build_mc_config(const SimArgs& s) {
  McConfig mc;
  mc.K = s.K;
  mc.alpha = s.rs.alpha;
  mc.trials = s.trials;
  mc.seed = s.seed;
  mc.constellation = make_set(s.rs.set, s.rs.M, s.rs.p);
  mc.gamma = s.rs.gamma;
  mc.lambda = s.rs.lambda;
  mc.sigma_u2 = s.rs.sigma_u2;
  mc.solver = s.solver == "auto" ? default_solver(mc.constellation)
                                 : solver_from_name(s.solver);
  mc.restarts = s.restarts;
  mc.pg_tol = s.pg_tol;
  mc.pg_max_iter = s.pg_max_iter;
  mc.threads = resolve_threads(s.threads);
  return mc;
}

int run_simulate(const SimArgs& s, const RunContext& ctx) {
  const json cfg_json = sim_args_json(s);
  echo_config("simulate", cfg_json);
  if (s.rs.spectrum.kind != "iid")
    throw std::invalid_argument(
        "simulate: only the iid channel ensemble is simulated");
  const McConfig mc = build_mc_config(s);
  const McResult res = monte_carlo_distortion(mc);
  print_kv("set", mc.constellation.name());
  print_kv("solver", solver_name(mc.solver));
  print_kv("K", static_cast<double>(mc.K));
  print_kv("N", static_cast<double>(mc.N()));
  print_kv("trials_used", static_cast<double>(res.trials_used));
  print_kv("trials_excluded", static_cast<double>(res.trials_excluded));
  print_kv("D_mc_mean", res.mean);
  print_kv("D_mc_stderr", res.stderr_of_mean);
  ctx.finish("simulate", cfg_json, {});
  return 0;
}

struct SweepArgs {
  SimArgs sim;
  std::string alphas;        // comma list; or linspace via min/max/count
  double alpha_min = 0.0, alpha_max = 0.0;
  int alpha_count = 0;
  double sigma_n2 = 1.0;
  bool with_rsb = false;
  int rsb_quad_order = 32;
  bool with_mc = false;
  std::string out;
};

std::vector<double> sweep_alphas(const SweepArgs& sw) {
  if (!sw.alphas.empty()) return parse_list(sw.alphas);
  if (sw.alpha_count > 0) {
    if (!(sw.alpha_min > 0.0) || !(sw.alpha_max >= sw.alpha_min))
      throw std::invalid_argument("sweep: need 0 < --alpha-min <= --alpha-max");
    std::vector<double> out;
    if (sw.alpha_count == 1) {
      out.push_back(sw.alpha_min);
    } else {
      for (int i = 0; i < sw.alpha_count; ++i)
        out.push_back(sw.alpha_min + (sw.alpha_max - sw.alpha_min) * i /
                                         (sw.alpha_count - 1));
    }
    return out;
  }
  throw std::invalid_argument("sweep: give --alphas or --alpha-min/--alpha-max/--alpha-count");
}

int run_sweep(const SweepArgs& sw, const RunContext& ctx) {
  json cfg_json = sim_args_json(sw.sim);
  cfg_json.erase("alpha");
  cfg_json["alphas"] = sw.alphas;
  cfg_json["alpha_min"] = sw.alpha_min;
  cfg_json["alpha_max"] = sw.alpha_max;
  cfg_json["alpha_count"] = sw.alpha_count;
  cfg_json["sigma_n2"] = sw.sigma_n2;
  cfg_json["rsb"] = sw.with_rsb;
  cfg_json["rsb_quad_order"] = sw.rsb_quad_order;
  cfg_json["mc"] = sw.with_mc;
  cfg_json["out"] = sw.out;
  echo_config("sweep", cfg_json);
  if (sw.sim.rs.spectrum.kind != "iid")
    throw std::invalid_argument("sweep: only the iid ensemble is swept");

  SweepConfig sc;
  sc.constellation = make_set(sw.sim.rs.set, sw.sim.rs.M, sw.sim.rs.p);
  sc.alphas = sweep_alphas(sw);
  sc.gamma = sw.sim.rs.gamma;
  sc.lambda = sw.sim.rs.lambda;
  sc.sigma_u2 = sw.sim.rs.sigma_u2;
  sc.sigma_n2 = sw.sigma_n2;
  sc.quad_order = sw.sim.rs.quad_order;
  sc.with_rsb = sw.with_rsb;
  sc.rsb_quad_order = sw.rsb_quad_order;
  sc.with_mc = sw.with_mc;
  sc.mc.K = sw.sim.K;
  sc.mc.trials = sw.sim.trials;
  sc.mc.seed = sw.sim.seed;
  sc.mc.solver = sw.sim.solver == "auto" ? default_solver(sc.constellation)
                                         : solver_from_name(sw.sim.solver);
  sc.mc.restarts = sw.sim.restarts;
  sc.mc.pg_tol = sw.sim.pg_tol;
  sc.mc.pg_max_iter = sw.sim.pg_max_iter;
  sc.mc.threads = resolve_threads(sw.sim.threads);

  SweepCsvWriter writer(sw.out);  // flushes per row: partial sweeps keep rows
  for (double a : sc.alphas) writer.write(compute_sweep_row(sc, a));
  ctx.finish("sweep", cfg_json, sw.out.empty() ? std::vector<std::string>{}
                                               : std::vector<std::string>{sw.out});
  return 0;
}

int run_tune_rzf(double alpha, double q, double sigma_n2, double sigma_u2,
                 const RunContext& ctx) {
  const json cfg_json{{"alpha", alpha}, {"q", q}, {"sigma_n2", sigma_n2},
                      {"sigma_u2", sigma_u2}};
  echo_config("tune-rzf", cfg_json);
  const RzfTuning t = tune_rzf(alpha, q, sigma_n2, sigma_u2);
  print_kv("s", t.s);
  print_kv("chi_opt", t.chi_opt);
  print_kv("lambda_opt", t.lambda_opt);
  print_kv("gamma", t.gamma);
  print_kv("D_rs", t.distortion);
  print_kv("rate_bound", t.rate_bound);
  ctx.finish("tune-rzf", cfg_json, {});
  return 0;
}

struct TuneArgs {
  std::string set = "full";
  int M = 4;
  double p = 1.0;
  double alpha = 0.0;
  double q_target = 1.0;
  double sigma_n2 = 1.0;
  double sigma_u2 = 1.0;
  double gamma_lo = 1e-4;
  double gamma_hi = 100.0;
};

int run_tune(const TuneArgs& t, const RunContext& ctx) {
  const json cfg_json{{"set", t.set},           {"M", t.M},
                      {"p", t.p},               {"alpha", t.alpha},
                      {"q_target", t.q_target}, {"sigma_n2", t.sigma_n2},
                      {"sigma_u2", t.sigma_u2}, {"gamma_lo", t.gamma_lo},
                      {"gamma_hi", t.gamma_hi}};
  echo_config("tune", cfg_json);
  const Constellation con = make_set(t.set, t.M, t.p);
  TuneOptions opt;
  opt.sigma_u2 = t.sigma_u2;
  opt.gamma_lo = t.gamma_lo;
  opt.gamma_hi = t.gamma_hi;
  const TuneResult r = tune_constellation(con, t.alpha, t.q_target, t.sigma_n2, opt);
  print_kv("set", con.name());
  print_kv("lambda", r.lambda);
  print_kv("gamma", r.gamma);
  print_kv("chi", r.chi);
  print_kv("q", r.q);
  print_kv("D_rs", r.distortion);
  print_kv("rate_bound", r.rate_bound);
  ctx.finish("tune", cfg_json, {});
  return 0;
}

int run_union_bound(double alpha, int M, const RunContext& ctx) {
  const json cfg_json{{"alpha", alpha}, {"M", M}};
  echo_config("union-bound", cfg_json);
  const UnionBoundResult r = union_bound_epsilon(alpha, M);
  print_kv("epsilon_star", r.epsilon_star);
  ctx.finish("union-bound", cfg_json, {});
  return 0;
}

int run_ofdm(int L, int N, int K, std::uint64_t seed, bool dense,
             const RunContext& ctx) {
  const json cfg_json{{"L", L}, {"N", N}, {"K", K}, {"seed", seed}, {"dense", dense}};
  echo_config("ofdm-eig", cfg_json);
  const OfdmResult r = ofdm_equivalence(L, N, K, seed);
  print_kv("pooled_count", static_cast<double>(r.pooled.size()));
  print_kv("unitarity_error", r.unitarity_error);
  print_kv("ks_distance", r.ks_distance);
  if (dense) {
    const std::vector<double> d = ofdm_dense_gramian_eigs(L, N, K, seed);
    double dmax = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      dmax = std::max(dmax, std::abs(d[i] - r.pooled[i]));
    print_kv("dense_vs_pooled_max_abs", dmax);
  }
  ctx.finish("ofdm-eig", cfg_json, {});
  return 0;
}

struct DecayArgs {
  double d_target = 0.1;
  double P = 1.0;
  std::string alphas;
  double alpha_min = 10.0, alpha_max = 100.0;
  int alpha_count = 12;
  double gamma = 1.0;
  double sigma_u2 = 1.0;
  std::string out;
};

int run_power_decay(const DecayArgs& d, const RunContext& ctx) {
  const json cfg_json{{"d_target", d.d_target},   {"P", d.P},
                      {"alphas", d.alphas},       {"alpha_min", d.alpha_min},
                      {"alpha_max", d.alpha_max}, {"alpha_count", d.alpha_count},
                      {"gamma", d.gamma},         {"sigma_u2", d.sigma_u2},
                      {"out", d.out}};
  echo_config("power-decay", cfg_json);
  std::vector<double> alphas;
  if (!d.alphas.empty()) {
    alphas = parse_list(d.alphas);
  } else {
    if (!(d.alpha_min > 0.0) || !(d.alpha_max > d.alpha_min) || d.alpha_count < 2)
      throw std::invalid_argument(
          "power-decay: need 0 < --alpha-min < --alpha-max and --alpha-count >= 2");
    for (int i = 0; i < d.alpha_count; ++i)  // geometric spacing
      alphas.push_back(d.alpha_min * std::pow(d.alpha_max / d.alpha_min,
                                              static_cast<double>(i) /
                                                  (d.alpha_count - 1)));
  }
  const PowerDecayResult r = power_decay_fit(d.d_target, alphas, d.P, d.gamma, d.sigma_u2);
  print_kv("kappa", r.kappa);
  if (!d.out.empty()) {
    std::ofstream f(d.out, std::ios::out | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + d.out);
    f << "alpha,q,lambda,D_rs\n";
    for (const auto& p : r.points)
      f << csv_number(p.alpha) << ',' << csv_number(p.q) << ','
        << csv_number(p.lambda) << ',' << csv_number(p.distortion) << "\n";
  } else {
    std::printf("alpha,q,lambda,D_rs\n");
    for (const auto& p : r.points)
      std::printf("%s,%s,%s,%s\n", csv_number(p.alpha).c_str(),
                  csv_number(p.q).c_str(), csv_number(p.lambda).c_str(),
                  csv_number(p.distortion).c_str());
  }
  ctx.finish("power-decay", cfg_json,
             d.out.empty() ? std::vector<std::string>{} : std::vector<std::string>{d.out});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical toolkit for nonlinear least-squares precoding over "
      "constrained constellations: large-system replica predictions (RS and "
      "one-step RSB), finite-size Monte Carlo, tuning, union-bound floor, "
      "multicarrier spectrum checks, and power-decay fits."};
  app.set_config("--config")
      ->description("JSON configuration file; keys mirror flags, nested by "
                    "subcommand; command-line flags win")
      ->configurable(false);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);  // unknown keys rejected
  app.require_subcommand(1);

  RunContext ctx;
  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "write a JSON run record (resolved config, outputs, versions, "
                 "wall time) to this path")
      ->configurable(true);

  // replica-rs
  RsArgs rs_a;
  CLI::App* c_rs = app.add_subcommand(
      "replica-rs", "large-system RS prediction of the distortion");
  add_rs_flags(c_rs, rs_a);

  // replica-rsb
  RsArgs rsb_a;
  int rsb_quad_order = 32;
  CLI::App* c_rsb = app.add_subcommand(
      "replica-rsb",
      "one-step replica-symmetry-breaking prediction (mpsk/circle sets)");
  add_rs_flags(c_rsb, rsb_a);
  c_rsb->add_option("--rsb-quad-order", rsb_quad_order,
                    "panel order of the breaking-overlap Gaussian averages")
      ->check(CLI::PositiveNumber);

  // simulate
  SimArgs sim_a;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "finite-size Monte Carlo distortion of a concrete precoder");
  add_rs_flags(c_sim, sim_a.rs);
  add_sim_flags(c_sim, sim_a);

  // sweep
  SweepArgs sweep_a;
  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "CSV table of predictions (and optional Monte Carlo) over alpha");
  add_set_flags(c_sweep, sweep_a.sim.rs);
  c_sweep->add_option("--alphas", sweep_a.alphas, "comma-separated load ratios alpha");
  c_sweep->add_option("--alpha-min", sweep_a.alpha_min, "first alpha of a linear grid");
  c_sweep->add_option("--alpha-max", sweep_a.alpha_max, "last alpha of a linear grid");
  c_sweep->add_option("--alpha-count", sweep_a.alpha_count, "points of the linear grid");
  c_sweep->add_option("--gamma", sweep_a.sim.rs.gamma, "gain of the scaled target");
  c_sweep->add_option("--lambda", sweep_a.sim.rs.lambda,
                      "penalty weight of the transmit-energy term");
  c_sweep->add_option("--sigma-u2", sweep_a.sim.rs.sigma_u2, "data variance");
  c_sweep->add_option("--sigma-n2", sweep_a.sigma_n2,
                      "noise variance in the rate-bound denominator");
  c_sweep->add_option("--quad-order", sweep_a.sim.rs.quad_order,
                      "quadrature order of the scalar averages");
  c_sweep->add_flag("--rsb", sweep_a.with_rsb,
                    "add one-step breaking columns (mpsk/circle rows)");
  c_sweep->add_option("--rsb-quad-order", sweep_a.rsb_quad_order,
                      "panel order of the breaking averages");
  c_sweep->add_flag("--mc", sweep_a.with_mc, "add Monte Carlo columns");
  c_sweep->add_option("--K", sweep_a.sim.K, "users per Monte Carlo instance");
  c_sweep->add_option("--trials", sweep_a.sim.trials, "Monte Carlo draws per row");
  c_sweep->add_option("--seed", sweep_a.sim.seed, "base seed; trial t uses seed + t");
  c_sweep->add_option("--solver", sweep_a.sim.solver,
                      "auto|rzf|pg|cd|null precoder for the Monte Carlo columns")
      ->check(CLI::IsMember({"auto", "rzf", "pg", "cd", "null"}));
  c_sweep->add_option("--restarts", sweep_a.sim.restarts, "coordinate-descent restarts");
  c_sweep->add_option("--threads", sweep_a.sim.threads,
                      "worker threads (0 = auto; LSE_LAB_THREADS caps)");
  c_sweep->add_option("--out", sweep_a.out, "CSV output path (default: stdout)");

  // tune-rzf
  double tr_alpha = 0.0, tr_q = 1.0, tr_sn2 = 1.0, tr_su2 = 1.0;
  CLI::App* c_trzf = app.add_subcommand(
      "tune-rzf",
      "closed-form penalty/gain choice maximizing the rate bound of the "
      "regularized linear precoder");
  c_trzf->add_option("--alpha", tr_alpha, "load ratio alpha = N/K")
      ->required()
      ->check(CLI::PositiveNumber);
  c_trzf->add_option("--q", tr_q, "per-antenna average power constraint")
      ->check(CLI::PositiveNumber);
  c_trzf->add_option("--sigma-n2", tr_sn2, "receiver noise variance")
      ->check(CLI::PositiveNumber);
  c_trzf->add_option("--sigma-u2", tr_su2, "data variance")->check(CLI::PositiveNumber);

  // tune
  TuneArgs tune_a;
  CLI::App* c_tune = app.add_subcommand(
      "tune",
      "pick penalty weight and gain for a constellation by maximizing the "
      "rate bound (power pinned on constant-modulus sets)");
  c_tune->add_option("--set", tune_a.set, "full|disk|circle|mpsk")
      ->check(CLI::IsMember({"full", "full-complex", "disk", "circle", "mpsk"}));
  c_tune->add_option("--M", tune_a.M, "phase-grid points (mpsk)")
      ->check(CLI::PositiveNumber);
  c_tune->add_option("--p,--P", tune_a.p, "set power (peak/envelope)")
      ->check(CLI::NonNegativeNumber);
  c_tune->add_option("--alpha", tune_a.alpha, "load ratio alpha = N/K")
      ->required()
      ->check(CLI::PositiveNumber);
  c_tune->add_option("--q-target", tune_a.q_target,
                     "average-power target of the penalty root-find (full/disk)");
  c_tune->add_option("--sigma-n2", tune_a.sigma_n2, "receiver noise variance")
      ->check(CLI::PositiveNumber);
  c_tune->add_option("--sigma-u2", tune_a.sigma_u2, "data variance")
      ->check(CLI::PositiveNumber);
  c_tune->add_option("--gamma-lo", tune_a.gamma_lo, "gain search lower end")
      ->check(CLI::PositiveNumber);
  c_tune->add_option("--gamma-hi", tune_a.gamma_hi, "gain search upper end")
      ->check(CLI::PositiveNumber);

  // union-bound
  double ub_alpha = 0.0;
  int ub_M = 2;
  CLI::App* c_ub = app.add_subcommand(
      "union-bound",
      "probabilistic distortion floor of the M-point phase grid (iid ensemble, "
      "unit gain and data variance)");
  c_ub->add_option("--alpha", ub_alpha, "load ratio alpha = N/K")
      ->required()
      ->check(CLI::PositiveNumber);
  c_ub->add_option("--M", ub_M, "phase-grid points")->check(CLI::PositiveNumber);

  // ofdm-eig
  int of_L = 4, of_N = 8, of_K = 8;
  std::uint64_t of_seed = 1;
  bool of_dense = false;
  CLI::App* c_of = app.add_subcommand(
      "ofdm-eig",
      "Gramian spectrum of the multicarrier block channel vs a single iid "
      "draw (Kolmogorov-Smirnov distance)");
  c_of->add_option("--L", of_L, "number of subcarriers (diagonal blocks)")
      ->check(CLI::PositiveNumber);
  c_of->add_option("--N", of_N, "antennas per subcarrier")->check(CLI::PositiveNumber);
  c_of->add_option("--K", of_K, "users per subcarrier")->check(CLI::PositiveNumber);
  c_of->add_option("--seed", of_seed, "subcarrier j draws from stream seed + j");
  c_of->add_flag("--dense", of_dense,
                 "also build the literal dense block matrix and compare spectra "
                 "(memory-guarded)");

  // power-decay
  DecayArgs decay_a;
  CLI::App* c_pd = app.add_subcommand(
      "power-decay",
      "decay exponent of the average power against the load at fixed "
      "distortion under the peak-power set");
  c_pd->add_option("--d-target", decay_a.d_target, "distortion level to hold")
      ->check(CLI::PositiveNumber);
  c_pd->add_option("--p,--P", decay_a.P, "peak power of the disk set")
      ->check(CLI::PositiveNumber);
  c_pd->add_option("--alphas", decay_a.alphas, "comma-separated load ratios");
  c_pd->add_option("--alpha-min", decay_a.alpha_min, "first alpha of a geometric grid");
  c_pd->add_option("--alpha-max", decay_a.alpha_max, "last alpha of a geometric grid");
  c_pd->add_option("--alpha-count", decay_a.alpha_count, "points of the geometric grid");
  c_pd->add_option("--gamma", decay_a.gamma, "gain of the scaled target");
  c_pd->add_option("--sigma-u2", decay_a.sigma_u2, "data variance");
  c_pd->add_option("--out", decay_a.out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message to stderr
    return 1;     // usage errors are exit 1
  }

  ctx.manifest_path = manifest_path;
  try {
    if (c_rs->parsed()) return run_replica_rs(rs_a, ctx);
    if (c_rsb->parsed()) return run_replica_rsb(rsb_a, rsb_quad_order, ctx);
    if (c_sim->parsed()) return run_simulate(sim_a, ctx);
    if (c_sweep->parsed()) return run_sweep(sweep_a, ctx);
    if (c_trzf->parsed()) return run_tune_rzf(tr_alpha, tr_q, tr_sn2, tr_su2, ctx);
    if (c_tune->parsed()) return run_tune(tune_a, ctx);
    if (c_ub->parsed()) return run_union_bound(ub_alpha, ub_M, ctx);
    if (c_of->parsed()) return run_ofdm(of_L, of_N, of_K, of_seed, of_dense, ctx);
    if (c_pd->parsed()) return run_power_decay(decay_a, ctx);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const DivergedRsError& e) {
    std::fprintf(stderr, "RS branch divergent, alpha* = %.4f\n", e.alpha_star);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
