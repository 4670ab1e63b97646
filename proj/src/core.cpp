#include "heun/core.hpp"

#include <algorithm>
#include <cmath>

#include "heun/error.hpp"

namespace heun {

namespace {

void require_distinct_singularities(cplx a) {
  if (a == cplx(0.0) || a == cplx(1.0)) {
    throw Error(ErrorKind::CoincidentSingularities,
                a == cplx(0.0) ? "a = 0 coincides with the singular point z = 0"
                               : "a = 1 coincides with the singular point z = 1");
  }
}

}  // namespace

HeunParams HeunFamily::with_q(cplx q) const {
  return HeunParams{a, q, alpha, beta, gamma, delta, epsilon()};
}

HeunFamily make_family(cplx a, cplx alpha, cplx beta, cplx gamma, cplx delta) {
  require_distinct_singularities(a);
  return HeunFamily{a, alpha, beta, gamma, delta};
}

HeunParams make_params(cplx a, cplx alpha, cplx beta, cplx gamma, cplx delta, cplx q) {
  return make_family(a, alpha, beta, gamma, delta).with_q(q);
}

HeunFamily family_with_epsilon(cplx a, cplx alpha, cplx beta, cplx gamma, cplx epsilon) {
  return make_family(a, alpha, beta, gamma, (1.0 + alpha + beta) - gamma - epsilon);
}

OdeCoefficients ode_coefficients(const HeunParams& p, cplx z) {
  if (z == cplx(0.0) || z == cplx(1.0) || z == p.a) {
    throw Error(ErrorKind::SingularPoint, "the equation is singular at z = 0, 1, a");
  }
  const cplx zm1 = z - 1.0;
  const cplx zma = z - p.a;
  return {p.gamma / z + p.delta / zm1 + p.epsilon / zma,
          (p.alpha * p.beta * z - p.q) / (z * zm1 * zma)};
}

cplx ode_residual(const HeunParams& p, const SolutionSample& s, cplx ddu) {
  const auto [p1, p0] = ode_coefficients(p, s.z);
  return ddu + p1 * s.du + p0 * s.u;
}

double scaled_residual(const HeunParams& p, cplx z, const Derivatives& d) {
  const double scale = std::max({std::abs(d.u), std::abs(d.du), std::abs(d.ddu)});
  const double r = std::abs(ode_residual(p, {z, d.u, d.du}, d.ddu));
  if (scale == 0.0) return r;
  return r / scale;
}

double distance_to_singularity(const HeunParams& p, cplx z) {
  return std::min({std::abs(z), std::abs(z - 1.0), std::abs(z - p.a)});
}

}  // namespace heun
