#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heun/core.hpp"
#include "heun/reduction.hpp"

namespace heun::quantum {

/// V(x) = V0 + V1 / sqrt(1 - exp(-x / sigma)) on x > 0. mass_scale is
/// 2 m sigma^2 / hbar^2, so the Schrodinger equation in t = x / sigma reads
/// psi'' + mass_scale (E - V) psi = 0.
struct PotentialParams {
  double V0 = 1.0;
  double V1 = -1.0;
  double sigma = 1.0;
  double mass_scale = 1.0;

  double threshold() const { return V0 + V1; }
};

/// Throws InvalidArgument unless sigma > 0 and mass_scale > 0.
void validate(const PotentialParams& pp);

double potential(const PotentialParams& pp, double x);

/// z = (1 + sqrt(1 - exp(-x / sigma))) / 2, mapping x in (0, inf) onto (1/2, 1).
double z_of_x(const PotentialParams& pp, double x);
/// dz/dx.
double dz_dx(const PotentialParams& pp, double x);

/// psi = z^alpha1 (1 - z)^alpha2 u(z), where u solves a Heun equation with
/// a = 1/2 and epsilon = -1.
struct HeunMapping {
  HeunParams params;
  cplx alpha1;
  cplx alpha2;
  /// alpha2 - alpha1. The ratio parameter of the 3F2 solutions; the Heun
  /// accessory parameter is params.q = q_label (1 - q_label) / 2.
  cplx q_label;
  /// |P(q)| for the epsilon = -1 quadratic P, relative to the magnitudes
  /// of its two terms (t + a(1-delta))(t + (a-1)(1-gamma)) and the constant.
  double q_condition_residual = 0.0;
};

/// Throws VerificationFailed if the mapped parameters miss the epsilon = -1
/// q-condition by more than 1e-9 (scaled).
HeunMapping map_to_heun(const PotentialParams& pp, double E);

struct FundamentalSolutions {
  HeunMapping mapping;
  AssembledSolution u1;  // 3F2(alpha, beta, 1 + e1; e1, gamma; z), e1 = alpha beta / q_label
  AssembledSolution u2;  // 3F2(alpha, beta, 1 + e2; e2, delta; 1 - z), e2 = -alpha beta / q_label
};

/// Throws Degenerate when q_label vanishes (V1 = 0).
FundamentalSolutions fundamental_solutions(const PotentialParams& pp, double E);

/// u2 at z = 1/2 (x = 0), written as 2F1(alpha, beta; delta; 1/2)
/// + (alpha1 - alpha2)/(2 delta) 2F1(alpha + 1, beta + 1; delta + 1; 1/2),
/// which stays finite where e2 crosses a nonpositive integer.
double spectrum_function(const PotentialParams& pp, double E);

/// A lower bound on the ground-state energy.
double default_energy_floor(const PotentialParams& pp);

struct SpectrumResult {
  std::vector<double> energies;  // ascending
  int bound_state_count = 0;     // zeros of the threshold-energy solution
  bool count_method_agreement = false;
  std::vector<std::string> warnings;
};

/// Roots of spectrum_function in [e_min, e_max]. The grid is uniform in
/// kappa = sqrt(mass_scale (V0 + V1 - E)); brackets are refined with
/// TOMS 748 to |dE| < 1e-10 (1 + |E|).
SpectrumResult spectrum(const PotentialParams& pp, double e_min, double e_max, int grid = 400);
/// Same over [default_energy_floor, threshold].
SpectrumResult spectrum(const PotentialParams& pp, int grid = 400);

/// Solution at E = V0 + V1 vanishing at the origin, built from the two 3F2
/// branches (argument z for the first, 1 - z for the second). The branch
/// series cancel heavily once alpha1 grows, so they are summed with 50
/// significant digits; lost_digits() reports the worst cancellation. Beyond
/// x = kSeriesSwitch * sigma it is continued by integrating the Schrodinger
/// equation.
class ZeroEnergySolution {
 public:
  explicit ZeroEnergySolution(const PotentialParams& pp);

  static constexpr double kSeriesSwitch = 2.0;

  /// (psi, dpsi/dx); requires x > 0.
  std::pair<double, double> evaluate(double x) const;
  double alpha1() const { return alpha1_; }
  /// log10(largest term / |sum|) seen at the matching point z = 1/2.
  double lost_digits() const { return lost_digits_; }

 private:
  struct Branches {
    double b1, db1, b2, db2;  // values and d/dz
    double lost_digits;
  };
  Branches branches(double z) const;
  std::pair<double, double> series(double t) const;

  PotentialParams pp_;
  double alpha1_;
  double c1_ = 0.0;
  double c2_ = 0.0;
  double lost_digits_ = 0.0;
};

double zero_energy_solution(const PotentialParams& pp, double x);

/// Sign changes of the zero-energy solution on (0, inf). Zero when V1 >= 0.
int count_bound_states(const PotentialParams& pp);

/// Boundary mismatch: integrates inward from t = 40 with psi ~ exp(-kappa t)
/// to t = 1e-6, extrapolates psi(0) and returns psi(0) / |(psi(0), psi'(0))|.
/// Requires E < V0 + V1.
double shoot(const PotentialParams& pp, double E);

/// Sign-change roots of shoot on the same kappa grid as spectrum.
std::vector<double> shooting_roots(const PotentialParams& pp, double e_min, double e_max, int grid = 400);

}  // namespace heun::quantum
