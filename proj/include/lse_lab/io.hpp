#pragma once
// CSV serialization of sweep rows (stable, documented column set) and the
// JSON run-manifest.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lse_lab/experiments.hpp"

namespace lse_lab {

inline constexpr const char* kProjectName = "lse-lab";
inline constexpr const char* kProjectVersion = "1.0.0";

// Shortest round-trip-ish decimal rendering used across all CSV output;
// identical inputs therefore produce byte-identical files.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string csv_int(long long v) { return std::to_string(v); }

// The public column contract.  Cells are empty when a quantity does not
// apply to the row (no Monte Carlo run, branch divergent, non-grid set...).
inline const char* sweep_csv_header() {
  return "alpha,set,M,power,gamma,lambda,sigma_u2,sigma_n2,"
         "rs_valid,alpha_star,chi,q,D_rs,entropy0_rs,"
         "mu1,D_rsb,entropy0_rsb,"
         "K,trials,D_mc_mean,D_mc_stderr,"
         "rate_bound,union_eps";
}

inline std::string sweep_csv_row(const SweepRow& r) {
  std::string s;
  s.reserve(256);
  auto add = [&s](const std::string& cell) {
    if (!s.empty()) s.push_back(',');
    s += cell;
  };
  add(csv_number(r.alpha));
  add(r.set_name);
  add(r.M > 0 ? csv_int(r.M) : "");
  add(csv_number(r.power));
  add(csv_number(r.gamma));
  add(csv_number(r.lambda));
  add(csv_number(r.sigma_u2));
  add(csv_number(r.sigma_n2));
  add(r.rs_valid ? "1" : "0");
  add(r.rs_valid ? "" : csv_number(r.alpha_star));
  add(csv_number(r.chi));
  add(csv_number(r.q));
  add(csv_number(r.D_rs));
  add(csv_number(r.entropy0_rs));
  add(r.has_rsb ? csv_number(r.mu1) : "");
  add(r.has_rsb ? csv_number(r.D_rsb) : "");
  add(r.has_rsb ? csv_number(r.entropy0_rsb) : "");
  add(r.has_mc ? csv_int(r.K) : "");
  add(r.has_mc ? csv_int(r.trials) : "");
  add(r.has_mc ? csv_number(r.D_mc_mean) : "");
  add(r.has_mc ? csv_number(r.D_mc_stderr) : "");
  add(csv_number(r.rate_bound));
  add(csv_number(r.union_eps));
  return s;
}

// Streams rows as they complete (flush per row), so an interrupted sweep
// leaves every finished row on disk.
class SweepCsvWriter {
 public:
  // Opens `path`, or standard output when `path` is empty.
  explicit SweepCsvWriter(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
      out_ = &file_;
    } else {
      out_ = &std::cout;
    }
    (*out_) << sweep_csv_header() << "\n";
    out_->flush();
  }
  void write(const SweepRow& r) {
    (*out_) << sweep_csv_row(r) << "\n";
    out_->flush();
  }

 private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

// ---------------------------------------------------------------- manifest

// JSON run record: the resolved configuration, output files, library
// versions, and wall time.  Not part of the byte-determinism contract
// (wall time varies); the CSV is.
inline void write_run_manifest(const std::string& path,
                               const std::string& command,
                               const nlohmann::json& resolved_config,
                               const std::vector<std::string>& outputs,
                               double wall_time_s) {
  nlohmann::json m;
  m["command"] = command;
  m["config"] = resolved_config;
  m["outputs"] = outputs;
  m["wall_time_s"] = wall_time_s;
  m["versions"] = {
      {"project", std::string(kProjectName) + " " + kProjectVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
  };
  std::ofstream f(path, std::ios::out | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open manifest file: " + path);
  f << m.dump(2) << "\n";
}

}  // namespace lse_lab
