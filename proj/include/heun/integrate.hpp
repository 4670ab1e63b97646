#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "heun/core.hpp"
#include "heun/error.hpp"

namespace heun {

struct StepControl {
  double tol = 1e-12;           // local error bound, relative to the state norm
  double min_step_fraction = 1e-13;  // of |t1 - t0|
  std::size_t max_steps = 2'000'000;
};

namespace detail {

template <class Scalar, std::size_t Dim>
double state_norm(const std::array<Scalar, Dim>& y) {
  double m = 0.0;
  for (const auto& v : y) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

}  // namespace detail

/// Dormand-Prince 5(4) with normwise relative error control. Integrates
/// dy/dt = rhs(t, y) from t0 to t1 (either direction) and calls
/// observer(t, y) at t0 and after every accepted step, t1 included.
template <class Scalar, std::size_t Dim, class Rhs, class Observer>
std::array<Scalar, Dim> integrate_dp5(Rhs&& rhs, double t0, std::array<Scalar, Dim> y, double t1,
                                      const StepControl& ctl, Observer&& observer) {
  using State = std::array<Scalar, Dim>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  observer(t0, y);
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double h_min = std::abs(span) * ctl.min_step_fraction;
  double h = std::abs(span) * 1e-3;
  double t = t0;

  auto axpy = [](const State& base, double h_, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (std::size_t i = 0; i < Dim; ++i) {
      Scalar acc{};
      for (const auto& [w, k] : terms) acc += w * (*k)[i];
      out[i] += h_ * acc;
    }
    return out;
  };

  State k1 = rhs(t, y);
  for (std::size_t steps = 0; steps < ctl.max_steps; ++steps) {
    if (dir * (t1 - t) <= 0.0) return y;
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;
    const State k2 = rhs(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
    const State k3 = rhs(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(t + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y_new = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(t + hs, y_new);

    double err_abs = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) {
      const Scalar ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err_abs = std::max(err_abs, static_cast<double>(std::abs(ei)));
    }
    const double scale = ctl.tol * std::max(detail::state_norm(y), detail::state_norm(y_new));
    double err = scale > 0.0 ? err_abs / scale : (err_abs > 0.0 ? INFINITY : 0.0);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      observer(t, y);
      if (last) return y;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < h_min) throw Error(ErrorKind::StepUnderflow, "adaptive step fell below the minimum");
  }
  throw Error(ErrorKind::StepUnderflow, "step budget exhausted");
}

/// Reference solution of the Heun equation along the straight segment
/// [z0, z1]; samples include both endpoints. The segment must keep a distance
/// of at least 0.05 from 0, 1 and a.
std::vector<SolutionSample> integrate_reference(const HeunParams& p, cplx z0, cplx u0, cplx du0,
                                                cplx z1, double tol);

/// Distance from the segment [z0, z1] to the point s.
double segment_distance(cplx z0, cplx z1, cplx s);

}  // namespace heun
