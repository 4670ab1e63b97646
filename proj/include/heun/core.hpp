#pragma once

#include <complex>
#include <vector>

namespace heun {

using cplx = std::complex<double>;

struct HeunParams;

/// The Heun parameters with the accessory parameter left open. epsilon is
/// always derived from the Fuchsian relation.
struct HeunFamily {
  cplx a;
  cplx alpha;
  cplx beta;
  cplx gamma;
  cplx delta;

  cplx epsilon() const { return (1.0 + alpha + beta) - (gamma + delta); }
  HeunParams with_q(cplx q) const;
};

/// Parameters of
///   u'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) u' + (alpha beta z - q)/(z(z-1)(z-a)) u = 0.
struct HeunParams {
  cplx a;
  cplx q;
  cplx alpha;
  cplx beta;
  cplx gamma;
  cplx delta;
  cplx epsilon;

  HeunFamily family() const { return {a, alpha, beta, gamma, delta}; }
  /// (1 + alpha + beta) - (gamma + delta) - epsilon; zero for anything built by make_params.
  cplx fuchsian_defect() const { return (1.0 + alpha + beta) - (gamma + delta) - epsilon; }
};

/// Throws CoincidentSingularities when a is 0 or 1.
HeunParams make_params(cplx a, cplx alpha, cplx beta, cplx gamma, cplx delta, cplx q);
HeunFamily make_family(cplx a, cplx alpha, cplx beta, cplx gamma, cplx delta);

/// Family with delta chosen so that epsilon = -order.
HeunFamily family_with_epsilon(cplx a, cplx alpha, cplx beta, cplx gamma, cplx epsilon);

struct SolutionSample {
  cplx z;
  cplx u;
  cplx du;
};

struct Derivatives {
  cplx u;
  cplx du;
  cplx ddu;
};

/// Coefficients (p1, p0) of the normal form u'' + p1 u' + p0 u = 0 at z.
struct OdeCoefficients {
  cplx p1;
  cplx p0;
};

OdeCoefficients ode_coefficients(const HeunParams& p, cplx z);

cplx ode_residual(const HeunParams& p, const SolutionSample& s, cplx ddu);

/// |residual| / max(|u|, |u'|, |u''|); 0 for the zero function.
double scaled_residual(const HeunParams& p, cplx z, const Derivatives& d);

/// Distance from z to the nearest of {0, 1, a}.
double distance_to_singularity(const HeunParams& p, cplx z);

}  // namespace heun
