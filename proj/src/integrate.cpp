#include "heun/integrate.hpp"

#include <algorithm>

namespace heun {

double segment_distance(cplx z0, cplx z1, cplx s) {
  const cplx d = z1 - z0;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(s - z0);
  const double t = std::clamp(std::real((s - z0) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(s - (z0 + t * d));
}

std::vector<SolutionSample> integrate_reference(const HeunParams& p, cplx z0, cplx u0, cplx du0,
                                                cplx z1, double tol) {
  constexpr double kMinDistance = 0.05;
  for (const cplx s : {cplx(0.0), cplx(1.0), p.a}) {
    if (segment_distance(z0, z1, s) < kMinDistance) {
      throw Error(ErrorKind::PathTooClose, "integration path passes within 0.05 of a singular point");
    }
  }
  const cplx dz = z1 - z0;
  using State = std::array<cplx, 2>;
  auto rhs = [&](double t, const State& y) -> State {
    const auto [p1, p0] = ode_coefficients(p, z0 + t * dz);
    return {dz * y[1], dz * (-p1 * y[1] - p0 * y[0])};
  };
  std::vector<SolutionSample> samples;
  StepControl ctl;
  ctl.tol = tol;
  integrate_dp5(rhs, 0.0, State{u0, du0}, 1.0, ctl, [&](double t, const State& y) {
    samples.push_back({t == 1.0 ? z1 : z0 + t * dz, y[0], y[1]});
  });
  return samples;
}

}  // namespace heun
