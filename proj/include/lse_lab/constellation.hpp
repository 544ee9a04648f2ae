#pragma once
// Output constellations 𝕏 for the LSE precoder: the set each precoded
// coordinate must lie in, together with the geometric data the replica
// quadrature needs (angular sectors and radial breakpoints of the projection
// map) and the exact nearest-point projection.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lse_lab/special.hpp"

namespace lse_lab {

using cplx = std::complex<double>;

enum class SetKind { FullComplex, Disk, Circle, Mpsk };

class Constellation {
 public:
  static Constellation full_complex() { return Constellation(SetKind::FullComplex, 0.0, 0); }
  static Constellation disk(double peak_power) {
    require(peak_power > 0.0, "disk: peak power must be > 0");
    return Constellation(SetKind::Disk, peak_power, 0);
  }
  static Constellation circle(double envelope_power) {
    require(envelope_power > 0.0, "circle: envelope power must be > 0");
    return Constellation(SetKind::Circle, envelope_power, 0);
  }
  static Constellation mpsk(int M, double symbol_power) {
    require(M >= 2, "mpsk: M must be >= 2");
    require(symbol_power > 0.0, "mpsk: symbol power must be > 0");
    return Constellation(SetKind::Mpsk, symbol_power, M);
  }

  SetKind kind() const { return kind_; }
  double power() const { return power_; }  // P (disk/circle) or p (mpsk)
  int M() const { return M_; }

  // Whether the quadratic penalty weight acts: for circle / M-PSK the
  // squared norm of any feasible point is the constant P (resp. p), so the
  // penalty only shifts the objective and the solvers treat it as zero.
  bool lambda_active() const {
    return kind_ == SetKind::FullComplex || kind_ == SetKind::Disk;
  }

  bool discrete() const { return kind_ == SetKind::Mpsk; }

  // Unit phase e^{j 2 pi m / M} with the four cardinal directions snapped to
  // exact values, so axis-aligned grids (BPSK, QPSK) are exactly real /
  // imaginary.
  static cplx unit_phase(int m, int M) {
    if (4 * m % M == 0) {
      switch ((4 * m / M) & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        case 3: return {0.0, -1.0};
      }
    }
    const double th = 2.0 * kPi * m / M;
    return {std::cos(th), std::sin(th)};
  }

  // Grid points for discrete sets (exact values; members are bit-identical
  // to these on return from any precoder).
  std::vector<cplx> points() const {
    require(kind_ == SetKind::Mpsk, "points(): only the M-PSK set is discrete");
    std::vector<cplx> pts(M_);
    const double r = std::sqrt(power_);
    for (int m = 0; m < M_; ++m) pts[m] = r * unit_phase(m, M_);
    return pts;
  }

  // Nearest point of the set (ties on sector boundaries resolve to the
  // lower grid index; the zero input holds 'fallback' for circle).
  cplx project(cplx v, cplx fallback = cplx(0.0, 0.0)) const {
    switch (kind_) {
      case SetKind::FullComplex:
        return v;
      case SetKind::Disk: {
        const double a = std::abs(v);
        const double r = std::sqrt(power_);
        return a > r ? v * (r / a) : v;
      }
      case SetKind::Circle: {
        const double a = std::abs(v);
        if (a == 0.0) return fallback;
        return v * (std::sqrt(power_) / a);
      }
      case SetKind::Mpsk:
        return std::sqrt(power_) * unit_phase(nearest_phase_index(v), M_);
    }
    return v;
  }

  // Index of the nearest M-PSK grid phase; boundary ties -> lower index.
  int nearest_phase_index(cplx v) const {
    require(kind_ == SetKind::Mpsk, "nearest_phase_index: M-PSK only");
    if (v == cplx(0.0, 0.0)) return 0;
    double th = std::arg(v);  // (-pi, pi]
    if (th < 0) th += 2.0 * kPi;
    const double step = 2.0 * kPi / M_;
    int m = static_cast<int>(std::floor(th / step + 0.5));
    if (m >= M_) m = 0;
    // Exact half-way points round down to the lower index.
    const double lo = (m - 0.5) * step;
    if (th == lo && m > 0) m -= 1;
    return m;
  }

  // Angular sector boundaries of the projection map in (0, 2pi]; empty when
  // the projection is rotation-covariant (all sets except M-PSK).
  std::vector<double> angular_breakpoints() const {
    std::vector<double> br;
    if (kind_ == SetKind::Mpsk) {
      const double step = 2.0 * kPi / M_;
      for (int m = 0; m < M_; ++m) br.push_back((m + 0.5) * step);
    }
    return br;
  }

  // Radial breakpoints of x(scale * z) as a function of r = |z|: the disk
  // projection switches from identity to clipping at |scale| r = sqrt(P).
  std::vector<double> radial_breakpoints(double scale) const {
    if (kind_ == SetKind::Disk && scale > 0.0)
      return {std::sqrt(power_) / scale};
    return {};
  }

  std::string name() const {
    switch (kind_) {
      case SetKind::FullComplex: return "full-complex";
      case SetKind::Disk: return "disk";
      case SetKind::Circle: return "circle";
      case SetKind::Mpsk: return "mpsk" + std::to_string(M_);
    }
    return "?";
  }

 private:
  Constellation(SetKind k, double power, int M) : kind_(k), power_(power), M_(M) {}
  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  SetKind kind_;
  double power_;
  int M_;
};

}  // namespace lse_lab
