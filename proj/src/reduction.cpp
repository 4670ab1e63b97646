#include "heun/reduction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "heun/error.hpp"

namespace heun {

namespace {

ComplexPoly linear_in_n(cplx shift) { return ComplexPoly::linear(shift, 1.0); }

ComplexPoly shifted_product(std::span<const cplx> e, double shift) {
  ComplexPoly p = ComplexPoly::constant(1.0);
  for (const cplx ek : e) p = p * linear_in_n(ek + shift);
  return p;
}

bool q_less(cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); }

void require_order(const HeunFamily& family, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "order N must be nonnegative");
  if (family.a == cplx(1.0)) throw Error(ErrorKind::UnitA, "the epsilon condition needs a != 1");
  const cplx eps = family.epsilon();
  const double scale = 1.0 + std::abs(family.alpha) + std::abs(family.beta) +
                       std::abs(family.gamma) + std::abs(family.delta);
  if (std::abs(eps + static_cast<double>(order)) > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "epsilon = " << eps << " but the order-" << order << " reduction needs epsilon = " << -order;
    throw Error(ErrorKind::EpsilonMismatch, msg.str());
  }
}

bool near(cplx x, cplx y) { return std::abs(x - y) <= 1e-8 * (1.0 + std::abs(y)); }

bool degenerate_e(const HeunFamily& f, std::span<const cplx> e, int order) {
  for (const cplx ek : e) {
    if (near(ek, f.alpha) || near(ek, f.beta)) return true;
    for (int m = 0; m <= order; ++m) {
      if (near(ek, cplx(-static_cast<double>(m)))) return true;
    }
  }
  return false;
}

ReductionSolution make_solution(const HeunFamily& family, int order, const std::vector<cplx>& x,
                                const SolveOptions& opts) {
  ReductionSolution sol;
  sol.n_order = order;
  sol.q = x[0];
  sol.e.assign(x.begin() + 1, x.end());
  canonicalize_tail(sol.e, 0);
  const HeunParams p = family.with_q(sol.q);
  sol.system_residual = system_residual(p, sol.e);
  sol.degenerate = degenerate_e(family, sol.e, opts.recurrence_terms);
  sol.recurrence_residual = std::numeric_limits<double>::infinity();
  if (!sol.degenerate) {
    try {
      const GhfParams g = build_solution_at_0(p, sol);
      sol.recurrence_residual = recurrence_defect(p, g, opts.recurrence_terms);
    } catch (const Error&) {
      sol.degenerate = true;
    }
  }
  return sol;
}

std::vector<std::vector<cplx>> draw_starts(const HeunFamily& f, int order, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto disk = [&](cplx center, double radius) {
    const double r = radius * std::sqrt(unit(rng));
    const double th = 2.0 * std::numbers::pi * unit(rng);
    return center + std::polar(r, th);
  };
  const double q_radius = 5.0 * std::abs(f.a * f.alpha * f.beta) + 1.0;
  std::vector<std::vector<cplx>> starts;
  starts.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    std::vector<cplx> x(static_cast<std::size_t>(order) + 1);
    x[0] = disk(0.0, q_radius);
    for (int k = 1; k <= order; ++k) x[static_cast<std::size_t>(k)] = disk(-0.5, 5.0);
    starts.push_back(std::move(x));
  }
  return starts;
}

}  // namespace

cplx pi_eval(const HeunParams& p, std::span<const cplx> e, cplx n) {
  cplx prod0 = 1.0, prod1 = 1.0, prod2 = 1.0;
  for (const cplx ek : e) {
    prod0 *= ek + n;
    prod1 *= ek - 1.0 + n;
    prod2 *= ek - 2.0 + n;
  }
  const cplx q_prev = -p.q - (p.a * p.delta + p.epsilon) * (n - 1.0) -
                      (1.0 + p.a) * (p.gamma - 2.0 + n) * (n - 1.0);
  return p.a * (p.alpha - 1.0 + n) * (p.beta - 1.0 + n) * prod0 + q_prev * prod1 +
         (n - 1.0) * (p.gamma - 2.0 + n) * prod2;
}

ComplexPoly pi_coefficients(const HeunParams& p, std::span<const cplx> e) {
  const std::size_t nodes = e.size() + 2;
  std::vector<cplx> values(nodes);
  for (std::size_t n = 0; n < nodes; ++n) values[n] = pi_eval(p, e, static_cast<double>(n));
  return interpolate_integer_nodes(values);
}

double PiTerms::scale() const {
  return std::max({leading.max_abs_coefficient(), middle.max_abs_coefficient(),
                   trailing.max_abs_coefficient()});
}

PiTerms pi_terms(const HeunParams& p, std::span<const cplx> e) {
  const ComplexPoly q_prev =
      ComplexPoly::constant(-p.q) -
      (p.a * p.delta + p.epsilon) * linear_in_n(-1.0) -
      (1.0 + p.a) * (linear_in_n(p.gamma - 2.0) * linear_in_n(-1.0));
  return PiTerms{
      p.a * (linear_in_n(p.alpha - 1.0) * linear_in_n(p.beta - 1.0) * shifted_product(e, 0.0)),
      q_prev * shifted_product(e, -1.0),
      linear_in_n(-1.0) * linear_in_n(p.gamma - 2.0) * shifted_product(e, -2.0)};
}

double system_residual(const HeunParams& p, std::span<const cplx> e) {
  const PiTerms terms = pi_terms(p, e);
  const ComplexPoly total = terms.sum();
  double worst = 0.0;
  for (std::size_t m = 0; m <= e.size(); ++m) worst = std::max(worst, std::abs(total[m]));
  const double scale = terms.scale();
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<std::vector<cplx>> pencil_seeds(const HeunFamily& family, int order) {
  require_order(family, order);
  const HeunParams p = family.with_q(0.0);
  const auto dim = static_cast<Eigen::Index>(order) + 1;
  // prod(n + e_k) = sum_j s_j n^(N-j) with s_0 = 1, so Pi = sum_j s_j (B_j + q C_j).
  const ComplexPoly q_rest = ComplexPoly::constant(0.0) -
                             (p.a * p.delta + p.epsilon) * linear_in_n(-1.0) -
                             (1.0 + p.a) * (linear_in_n(p.gamma - 2.0) * linear_in_n(-1.0));
  Eigen::MatrixXcd b(dim, dim), c(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::vector<cplx> mono(static_cast<std::size_t>(dim - j), cplx(0.0));
    mono.back() = 1.0;
    const ComplexPoly e0(mono);
    const ComplexPoly e1 = e0.shifted(-1.0), e2 = e0.shifted(-2.0);
    const ComplexPoly bj = p.a * (linear_in_n(p.alpha - 1.0) * linear_in_n(p.beta - 1.0) * e0) +
                           q_rest * e1 + linear_in_n(-1.0) * linear_in_n(p.gamma - 2.0) * e2;
    const ComplexPoly cj = cplx(-1.0) * e1;
    for (Eigen::Index m = 0; m < dim; ++m) {
      b(m, j) = bj[static_cast<std::size_t>(m)];
      c(m, j) = cj[static_cast<std::size_t>(m)];
    }
  }
  // C is anti-triangular with -1 on the anti-diagonal, hence invertible.
  const Eigen::MatrixXcd m = c.partialPivLu().solve(b);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m);
  std::vector<std::vector<cplx>> seeds;
  if (solver.info() != Eigen::Success) return seeds;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::VectorXcd v = solver.eigenvectors().col(k);
    if (std::abs(v(0)) <= 1e-12 * v.norm()) continue;
    std::vector<cplx> x{-solver.eigenvalues()(k)};
    if (order > 0) {
      std::vector<cplx> ascending(static_cast<std::size_t>(dim));
      for (Eigen::Index j = 0; j < dim; ++j) ascending[static_cast<std::size_t>(order - j)] = v(j) / v(0);
      for (const cplx r : poly_roots(ComplexPoly(ascending))) x.push_back(-r);
    }
    seeds.push_back(std::move(x));
  }
  return seeds;
}

ReductionReport solve_reduction(const HeunFamily& family, int order, const SolveOptions& opts) {
  require_order(family, order);
  ReductionReport report;
  report.n_order = order;
  report.expected = order + 1;

  const std::size_t dim = static_cast<std::size_t>(order) + 1;
  const VectorFunction system = [&](std::span<const cplx> x) {
    const HeunParams p = family.with_q(x[0]);
    const PiTerms terms = pi_terms(p, x.subspan(1));
    const ComplexPoly total = terms.sum();
    const double scale = std::max(terms.scale(), 1e-300);
    std::vector<cplx> out(dim);
    for (std::size_t m = 0; m < dim; ++m) out[m] = total[m] / scale;
    return out;
  };

  NewtonOptions nopts;
  nopts.tol = opts.newton_tol;
  nopts.max_iter = opts.max_iter;

  std::mt19937_64 rng(opts.seed);
  const int base = opts.starts > 0 ? opts.starts : std::max(64, 32 * (order + 1));
  std::vector<NewtonPoint> converged;
  std::vector<ReductionSolution> accepted;

  auto run_batch = [&](int count, bool with_pencil) {
    auto starts = draw_starts(family, order, count, rng);
    if (with_pencil) {
      for (auto& x : pencil_seeds(family, order)) starts.insert(starts.begin(), std::move(x));
    }
    report.starts_used += static_cast<int>(starts.size());
    for (auto& pt : newton_multistart(system, dim, starts, nopts)) converged.push_back(std::move(pt));
    // Lowest residual first so each cluster is represented by its best point
    // regardless of the order in which starts converged.
    std::sort(converged.begin(), converged.end(), [](const NewtonPoint& l, const NewtonPoint& r) {
      if (l.residual != r.residual) return l.residual < r.residual;
      return q_less(l.point[0], r.point[0]);
    });
    std::vector<std::vector<cplx>> points;
    for (const auto& pt : converged) points.push_back(pt.point);

    accepted.clear();
    report.spurious = 0;
    for (const Cluster& c : dedupe(points, 1e-7, 1e-7, 1)) {
      ReductionSolution sol = make_solution(family, order, c.point, opts);
      if (!sol.degenerate && sol.recurrence_residual > opts.spurious_threshold) {
        ++report.spurious;
        continue;
      }
      accepted.push_back(std::move(sol));
    }
  };

  run_batch(base, opts.pencil);
  if (static_cast<int>(accepted.size()) < report.expected && opts.retry) run_batch(4 * base, false);

  std::sort(accepted.begin(), accepted.end(),
            [](const ReductionSolution& l, const ReductionSolution& r) { return q_less(l.q, r.q); });
  report.solutions = std::move(accepted);
  if (report.spurious > 0) {
    report.warnings.push_back(std::to_string(report.spurious) +
                              " Newton root(s) failed the recurrence check and were discarded");
  }
  if (!report.complete()) {
    report.warnings.push_back("found " + std::to_string(report.solutions.size()) + " of " +
                              std::to_string(report.expected) + " expected solutions");
  }
  for (const auto& s : report.solutions) {
    if (s.degenerate) report.warnings.push_back("degenerate solution at q = " + std::to_string(s.q.real()));
  }
  return report;
}

ComplexPoly closed_form_n1(const HeunFamily& f) {
  if (std::abs(f.epsilon() + 1.0) > 1e-9 * (1.0 + std::abs(f.delta))) {
    throw Error(ErrorKind::EpsilonMismatch, "the quadratic q-condition needs epsilon = -1");
  }
  const cplx a = f.a, al = f.alpha, be = f.beta, ga = f.gamma, de = f.delta;
  // In t = q - a alpha beta.
  const ComplexPoly in_t =
      ComplexPoly::linear(a * (1.0 - de), 1.0) * ComplexPoly::linear((a - 1.0) * (1.0 - ga), 1.0) -
      ComplexPoly::constant(a * (1.0 - a) * (1.0 + al - ga) * (1.0 + be - ga));
  return in_t.shifted(-a * al * be);
}

ComplexPoly closed_form_n2(const HeunFamily& f) {
  if (std::abs(f.epsilon() + 2.0) > 1e-9 * (1.0 + std::abs(f.delta))) {
    throw Error(ErrorKind::EpsilonMismatch, "the cubic q-condition needs epsilon = -2");
  }
  const cplx a = f.a, al = f.alpha, be = f.beta, ga = f.gamma;
  const ComplexPoly quad({2.0 * a * (a - 1.0) * al * be, 4.0 * a - 2.0 - (3.0 + al + be) * a + ga, 1.0});
  const ComplexPoly lin = ComplexPoly::linear(-2.0 * (1.0 + al + be) * a - 2.0 + 2.0 * ga, 1.0);
  const ComplexPoly in_t =
      quad * lin + ComplexPoly::linear(0.0, 2.0 * a * (a - 1.0) * (al * be + 1.0 + al + be));
  return in_t.shifted(-a * al * be);
}

ComplexPoly q_polynomial(const ReductionReport& report) {
  if (!report.complete()) {
    throw Error(ErrorKind::Shortfall, "found " + std::to_string(report.solutions.size()) + " of " +
                                          std::to_string(report.expected) + " accessory parameters");
  }
  std::vector<cplx> roots;
  for (const auto& s : report.solutions) roots.push_back(s.q);
  return ComplexPoly::from_roots(roots);
}

ComplexPoly q_polynomial(const HeunFamily& family, int order, const SolveOptions& opts) {
  return q_polynomial(solve_reduction(family, order, opts));
}

ConjectureResidual conjecture_check(const ReductionSolution& sol, const HeunParams& p) {
  const int n = static_cast<int>(sol.e.size());
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "the product identities need N >= 1");
  cplx q_prod = 1.0, a_prod = 1.0;
  for (const cplx e : sol.e) {
    if (e == cplx(0.0) || e == p.alpha || e == p.beta) {
      throw Error(ErrorKind::Degenerate, "e_k coincides with 0, alpha or beta");
    }
    q_prod *= (1.0 + e) / e;
    a_prod *= e * (1.0 + e - p.gamma) / ((e - p.alpha) * (e - p.beta));
  }
  ConjectureResidual r;
  const cplx q_pred = p.a * p.alpha * p.beta * q_prod;
  r.q_residual = std::abs(sol.q - q_pred) / std::max(std::abs(sol.q), 1e-300);
  const double mod = std::pow(std::abs(a_prod), 1.0 / n);
  const double arg = std::arg(a_prod);
  r.a_residual = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const cplx branch = std::polar(mod, (arg + 2.0 * std::numbers::pi * j) / n);
    r.a_residual = std::min(r.a_residual, std::abs(p.a - branch) / std::abs(p.a));
  }
  return r;
}

GhfParams build_solution_at_0(const HeunParams& p, const ReductionSolution& sol) {
  std::vector<cplx> num, den;
  for (const cplx e : sol.e) num.push_back(1.0 + e);
  num.push_back(p.alpha);
  num.push_back(p.beta);
  for (const cplx e : sol.e) den.push_back(e);
  den.push_back(p.gamma);
  return GhfParams(std::move(num), std::move(den));
}

int integer_epsilon(const HeunFamily& family) {
  const cplx eps = family.epsilon();
  const double rounded = std::round(eps.real());
  const double scale = 1.0 + std::abs(family.alpha) + std::abs(family.beta) +
                       std::abs(family.gamma) + std::abs(family.delta);
  if (std::abs(eps - rounded) > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "epsilon = " << eps << " is not an integer";
    throw Error(ErrorKind::EpsilonMismatch, msg.str());
  }
  return static_cast<int>(rounded);
}

namespace {

int positive_order(const HeunFamily& family) {
  const int m = integer_epsilon(family);
  if (m == 1) {
    throw Error(ErrorKind::ExceptionalEpsilon,
                "epsilon = 1: both exponents at z = a vanish and no rFs solution is known");
  }
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "the power change applies to epsilon >= 2");
  return m;
}

}  // namespace

HeunFamily positive_epsilon_transform(const HeunFamily& family) {
  const double shift = 1.0 - positive_order(family);
  return make_family(family.a, family.alpha + shift, family.beta + shift, family.gamma, family.delta);
}

PowerTransform positive_epsilon_transform(const HeunParams& p) {
  const HeunFamily f = positive_epsilon_transform(p.family());
  const cplx shift = 1.0 - p.epsilon;
  // Substituting u = (z-a)^(1-eps) w: the 1/(z-a)^2 terms cancel and the
  // remaining (1-eps)(gamma (z-1) + delta z) moves into the numerator.
  return {shift, f.with_q(p.q + shift * p.gamma)};
}

HeunParams reflect(const HeunParams& p) {
  return make_params(1.0 - p.a, p.alpha, p.beta, p.delta, p.gamma, p.alpha * p.beta - p.q);
}

HeunFamily reflect(const HeunFamily& f) {
  return make_family(1.0 - f.a, f.alpha, f.beta, f.delta, f.gamma);
}

AssembledSolution::AssembledSolution(GhfParams ghf, Expansion expansion, cplx a, cplx prefactor_exponent)
    : ghf_(std::move(ghf)),
      expansion_(expansion),
      a_(a),
      prefactor_exponent_(prefactor_exponent),
      radius_(std::min(1.0, std::abs(expansion == Expansion::AtZero ? a : 1.0 - a))) {}

Derivatives AssembledSolution::evaluate(cplx z, double tol) const {
  const GhfDerivatives g = ghf_derivatives(ghf_, argument(z), tol);
  const double sign = expansion_ == Expansion::AtZero ? 1.0 : -1.0;
  const cplx f = g.f, fz = sign * g.df, fzz = g.ddf;
  const cplx lam = prefactor_exponent_;
  if (lam == cplx(0.0)) return {f, fz, fzz};
  const cplx s = z - a_;
  const cplx pw = std::pow(s, lam);
  const cplx d1 = lam * pw / s;
  const cplx d2 = lam * (lam - 1.0) * pw / (s * s);
  return {pw * f, d1 * f + pw * fz, d2 * f + 2.0 * d1 * fz + pw * fzz};
}

AdmissibleSet solutions_at_0(const HeunFamily& family, const SolveOptions& opts) {
  const int m = integer_epsilon(family);
  AdmissibleSet out;
  if (m <= 0) {
    out.report = solve_reduction(family, -m, opts);
    for (const auto& sol : out.report.solutions) {
      if (sol.degenerate) continue;
      const HeunParams p = family.with_q(sol.q);
      out.items.push_back({p, sol, AssembledSolution(build_solution_at_0(p, sol), Expansion::AtZero, family.a, 0.0)});
    }
    return out;
  }
  const HeunFamily shifted = positive_epsilon_transform(family);
  const cplx lam = 1.0 - static_cast<double>(m);
  out.report = solve_reduction(shifted, m - 2, opts);
  for (const auto& sol : out.report.solutions) {
    if (sol.degenerate) continue;
    const HeunParams pt = shifted.with_q(sol.q);
    out.items.push_back({family.with_q(sol.q - lam * family.gamma), sol,
                         AssembledSolution(build_solution_at_0(pt, sol), Expansion::AtZero, family.a, lam)});
  }
  return out;
}

AdmissibleSet build_solution_at_1(const HeunFamily& family, const SolveOptions& opts) {
  const HeunFamily mirrored = reflect(family);
  AdmissibleSet inner = solutions_at_0(mirrored, opts);
  AdmissibleSet out;
  out.report = std::move(inner.report);
  for (auto& item : inner.items) {
    // (t - (1-a))^lam = (-1)^lam (z - a)^lam; the constant is dropped.
    const HeunParams p = family.with_q(family.alpha * family.beta - item.params.q);
    out.items.push_back({p, item.reduction,
                         AssembledSolution(item.solution.ghf(), Expansion::AtOne, family.a,
                                           item.solution.prefactor_exponent())});
  }
  return out;
}

}  // namespace heun
