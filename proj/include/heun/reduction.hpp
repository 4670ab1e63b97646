#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heun/core.hpp"
#include "heun/numerics.hpp"
#include "heun/series.hpp"

namespace heun {

/// One admissible accessory parameter q with its auxiliary parameters
/// e_1..e_N, for which
///   N+2 F N+1 (1 + e_1, ..., 1 + e_N, alpha, beta; e_1, ..., e_N, gamma; z)
/// solves the Heun equation with epsilon = -N.
struct ReductionSolution {
  int n_order = 0;
  cplx q;
  std::vector<cplx> e;            // canonical (real, imag) order
  double system_residual = 0.0;   // max |A_m| / largest coefficient of the three products of Pi
  double recurrence_residual = 0.0;  // recurrence_defect over recurrence_terms; inf when degenerate
  bool degenerate = false;        // some e_k at 0, a negative integer, alpha or beta
};

struct SolveOptions {
  std::uint64_t seed = 0;
  int starts = 0;               // random starts; 0 selects max(64, 32 (N + 1))
  bool pencil = true;           // add pencil_seeds to the start set
  double newton_tol = 1e-13;    // on the scaled coefficient system
  int max_iter = 200;
  bool retry = true;            // one retry with 4x the starts on shortfall
  int recurrence_terms = 200;
  double spurious_threshold = 1e-8;
};

struct ReductionReport {
  int n_order = 0;
  int expected = 0;             // N + 1
  std::vector<ReductionSolution> solutions;  // sorted by (Re q, Im q)
  int starts_used = 0;
  int spurious = 0;             // Newton roots rejected by the recurrence check
  std::vector<std::string> warnings;

  bool complete() const { return static_cast<int>(solutions.size()) >= expected; }
};

/// Pi(n) = a(alpha-1+n)(beta-1+n) prod(e_k+n) + Q_{n-1} prod(e_k-1+n)
///         + (n-1)(gamma-2+n) prod(e_k-2+n),
/// Q_{n-1} = -q - (a delta + epsilon)(n-1) - (1+a)(gamma-2+n)(n-1).
cplx pi_eval(const HeunParams& p, std::span<const cplx> e, cplx n);

/// Coefficients A_0..A_{N+1} of Pi, interpolated from pi_eval at n = 0..N+1.
ComplexPoly pi_coefficients(const HeunParams& p, std::span<const cplx> e);

/// The three products of Pi expanded as polynomials in n.
struct PiTerms {
  ComplexPoly leading;
  ComplexPoly middle;
  ComplexPoly trailing;

  ComplexPoly sum() const { return leading + middle + trailing; }
  double scale() const;
};

PiTerms pi_terms(const HeunParams& p, std::span<const cplx> e);

/// max_{m <= N} |A_m| / PiTerms::scale().
double system_residual(const HeunParams& p, std::span<const cplx> e);

/// Start points from the linear structure of the system: for fixed q the
/// A_m are linear in the elementary symmetric functions of e, so candidate
/// q are the eigenvalues of an (N+1)x(N+1) pencil and the e_k are read off
/// from the eigenvectors.
std::vector<std::vector<cplx>> pencil_seeds(const HeunFamily& family, int order);

/// All admissible (q, e) for a family with epsilon = -N, by damped Newton
/// on A_0 = ... = A_N = 0 from the pencil seeds plus seeded random starts.
ReductionReport solve_reduction(const HeunFamily& family, int order, const SolveOptions& opts = {});

/// Quadratic in q that the accessory parameter satisfies when epsilon = -1.
ComplexPoly closed_form_n1(const HeunFamily& family);
/// Cubic in q that the accessory parameter satisfies when epsilon = -2.
ComplexPoly closed_form_n2(const HeunFamily& family);

/// Monic prod (q - q_i) over the solutions; throws Shortfall when fewer than
/// N + 1 were found.
ComplexPoly q_polynomial(const ReductionReport& report);
ComplexPoly q_polynomial(const HeunFamily& family, int order, const SolveOptions& opts = {});

struct ConjectureResidual {
  double q_residual = 0.0;
  double a_residual = 0.0;
};

/// Relative residuals of q = a alpha beta prod (1 + e_k)/e_k and of
/// a = (prod e_k (1 + e_k - gamma) / ((e_k - alpha)(e_k - beta)))^(1/N),
/// the latter minimized over the N branches of the root.
ConjectureResidual conjecture_check(const ReductionSolution& sol, const HeunParams& p);

GhfParams build_solution_at_0(const HeunParams& p, const ReductionSolution& sol);

/// Integer value of epsilon; throws EpsilonMismatch when it is not one.
int integer_epsilon(const HeunFamily& family);

struct PowerTransform {
  cplx prefactor_exponent;   // u = (z - a)^prefactor_exponent w
  HeunParams transformed;    // epsilon -> 2 - epsilon
};

/// u = (z - a)^(1 - epsilon) w for a positive integer epsilon >= 2.
PowerTransform positive_epsilon_transform(const HeunParams& p);
HeunFamily positive_epsilon_transform(const HeunFamily& family);

/// The equation for w(t) = u(1 - t): singular points 0, 1, 1 - a.
HeunParams reflect(const HeunParams& p);
HeunFamily reflect(const HeunFamily& family);

enum class Expansion { AtZero, AtOne };

/// (z - a)^prefactor_exponent * rFs(argument), the argument being z or 1 - z.
class AssembledSolution {
 public:
  AssembledSolution(GhfParams ghf, Expansion expansion, cplx a, cplx prefactor_exponent);

  const GhfParams& ghf() const { return ghf_; }
  Expansion expansion() const { return expansion_; }
  cplx prefactor_exponent() const { return prefactor_exponent_; }
  /// Distance to the nearest other singular point: min(1, |a|) or min(1, |1 - a|).
  double radius() const { return radius_; }

  cplx argument(cplx z) const { return expansion_ == Expansion::AtZero ? z : 1.0 - z; }
  bool in_disk(cplx z) const { return std::abs(argument(z)) < radius_; }
  Derivatives evaluate(cplx z, double tol = kSeriesTol) const;

 private:
  GhfParams ghf_;
  Expansion expansion_;
  cplx a_;
  cplx prefactor_exponent_;
  double radius_;
};

struct Admissible {
  HeunParams params;            // original equation with the admissible q
  ReductionSolution reduction;  // in the coordinates where the reduction ran
  AssembledSolution solution;
};

struct AdmissibleSet {
  std::vector<Admissible> items;  // non-degenerate solutions only
  ReductionReport report;
};

/// Solutions around z = 0 for any integer epsilon other than 1.
AdmissibleSet solutions_at_0(const HeunFamily& family, const SolveOptions& opts = {});

/// Solutions around z = 1, built from the reflected equation with
/// denominator parameter delta and argument 1 - z.
AdmissibleSet build_solution_at_1(const HeunFamily& family, const SolveOptions& opts = {});

}  // namespace heun
