#include "heun/quantum.hpp"

#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "heun/error.hpp"
#include "heun/integrate.hpp"
#include "heun/series.hpp"

namespace heun::quantum {

namespace {

constexpr double kHeunA = 0.5;
constexpr double kShootFar = 40.0;
constexpr double kShootNear = 1e-6;
constexpr double kCountFar = 60.0;

// In t = x / sigma.
double scaled_potential(const PotentialParams& pp, double t) {
  return pp.V0 + pp.V1 / std::sqrt(-std::expm1(-t));
}

double z_of_t(double t) { return 0.5 * (1.0 + std::sqrt(-std::expm1(-t))); }

double dz_dt(double t) {
  const double y = std::sqrt(-std::expm1(-t));
  return std::exp(-t) / (4.0 * y);
}

using Real2 = std::array<double, 2>;

// psi'' = mass_scale (V - E) psi in t.
auto schrodinger_rhs(const PotentialParams& pp, double E) {
  return [&pp, E](double t, const Real2& y) -> Real2 {
    return {y[1], pp.mass_scale * (scaled_potential(pp, t) - E) * y[0]};
  };
}

double kappa_of(const PotentialParams& pp, double E) {
  return std::sqrt(pp.mass_scale * (pp.threshold() - E));
}

double energy_of(const PotentialParams& pp, double kappa) {
  return pp.threshold() - kappa * kappa / pp.mass_scale;
}

void check_window(const PotentialParams& pp, double e_min, double e_max, int grid) {
  validate(pp);
  if (grid < 2) throw Error(ErrorKind::InvalidArgument, "the energy grid needs at least 2 points");
  if (!(e_min < e_max)) throw Error(ErrorKind::InvalidArgument, "need e_min < e_max");
  if (e_max > pp.threshold()) {
    std::ostringstream msg;
    msg << "e_max = " << e_max << " lies above the continuum threshold V0 + V1 = " << pp.threshold();
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

// Roots of f over [e_min, e_max], bracketed on a grid uniform in kappa.
std::vector<double> grid_roots(const PotentialParams& pp, double e_min, double e_max, int grid,
                               const std::function<double(double)>& f, double rel_tol,
                               std::vector<std::string>* warnings) {
  const double k_lo = kappa_of(pp, e_max), k_hi = kappa_of(pp, e_min);
  std::vector<double> energies, values;
  for (int i = 0; i < grid; ++i) {
    const double kappa = k_lo + (k_hi - k_lo) * i / (grid - 1);
    const double E = i == 0 ? e_max : (i == grid - 1 ? e_min : energy_of(pp, kappa));
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = f(E);
    } catch (const Error& err) {
      if (warnings) warnings->push_back("skipped E = " + std::to_string(E) + ": " + err.what());
    }
    if (!std::isfinite(v)) continue;
    energies.push_back(E);
    values.push_back(v);
  }
  std::vector<double> roots;
  auto close_enough = [rel_tol](double a, double b) { return std::abs(b - a) <= rel_tol * (1.0 + std::abs(a)); };
  for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
    // Descending energies along the kappa grid.
    const double hi = energies[i], lo = energies[i + 1];
    const double f_hi = values[i], f_lo = values[i + 1];
    if (f_hi == 0.0) {
      roots.push_back(hi);
      continue;
    }
    if ((f_lo < 0.0) == (f_hi < 0.0) || f_lo == 0.0) continue;
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, close_enough, iters);
    roots.push_back(0.5 * (bracket.first + bracket.second));
  }
  if (!values.empty() && values.back() == 0.0) roots.push_back(energies.back());
  std::sort(roots.begin(), roots.end());
  return roots;
}

using Wide = boost::multiprecision::cpp_bin_float_50;

struct WideSum {
  Wide f, df;
  double lost_digits;
};

// 3F2(a1, a2, a3; b1, b2; w) and its w-derivative.
WideSum wide_3f2(const std::array<Wide, 3>& a, const std::array<Wide, 2>& b, const Wide& w) {
  const Wide tol = Wide(1e-45);
  Wide c = 1, f = 1, df = 0, pw = 1, peak = 1;
  int small = 0;
  for (int n = 1; n <= kDefaultTermCap; ++n) {
    const Wide m = n - 1;
    c *= (a[0] + m) * (a[1] + m) * (a[2] + m) / ((b[0] + m) * (b[1] + m) * n);
    const Wide term_d = n * c * pw;
    pw *= w;
    const Wide term = c * pw;
    f += term;
    df += term_d;
    peak = std::max(peak, Wide(abs(term)));
    const bool tiny = abs(term) <= tol * abs(f) && abs(term_d) <= tol * abs(df);
    small = tiny ? small + 1 : 0;
    if (small >= 3) {
      const double lost = f == 0 ? INFINITY : static_cast<double>(log10(peak / abs(f)));
      return {f, df, lost};
    }
  }
  throw Error(ErrorKind::NoConvergence, "zero-energy branch series did not converge");
}

}  // namespace

void validate(const PotentialParams& pp) {
  if (!(pp.sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  if (!(pp.mass_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass_scale must be positive");
}

double potential(const PotentialParams& pp, double x) {
  validate(pp);
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "the potential is defined for x > 0");
  return scaled_potential(pp, x / pp.sigma);
}

double z_of_x(const PotentialParams& pp, double x) {
  validate(pp);
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "z(x) is defined for x > 0");
  return z_of_t(x / pp.sigma);
}

double dz_dx(const PotentialParams& pp, double x) {
  validate(pp);
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "z(x) is defined for x > 0");
  return dz_dt(x / pp.sigma) / pp.sigma;
}

HeunMapping map_to_heun(const PotentialParams& pp, double E) {
  validate(pp);
  const double k = pp.mass_scale;
  HeunMapping m;
  m.alpha1 = std::sqrt(cplx(k * (pp.V0 - pp.V1 - E)));
  m.alpha2 = std::sqrt(cplx(k * (pp.V0 + pp.V1 - E)));
  const cplx root = std::sqrt(cplx(4.0 * k * (pp.V0 - E)));
  const cplx alpha = m.alpha1 + m.alpha2 + root;
  const cplx beta = m.alpha1 + m.alpha2 - root;
  m.q_label = m.alpha2 - m.alpha1;
  const cplx q = 0.5 * m.q_label * (1.0 - m.q_label);
  m.params = make_params(kHeunA, alpha, beta, 1.0 + 2.0 * m.alpha1, 1.0 + 2.0 * m.alpha2, q);

  const ComplexPoly condition = closed_form_n1(m.params.family());
  // Scaled by the two terms of the factored quadratic before they cancel.
  const HeunParams& p = m.params;
  const cplx t = q - p.a * alpha * beta;
  const double scale = std::abs((t + p.a * (1.0 - p.delta)) * (t + (p.a - 1.0) * (1.0 - p.gamma))) +
                       std::abs(p.a * (1.0 - p.a) * (1.0 + alpha - p.gamma) * (1.0 + beta - p.gamma));
  m.q_condition_residual = scale > 0.0 ? std::abs(condition(q)) / scale : 0.0;
  if (m.q_condition_residual > 1e-9) {
    std::ostringstream msg;
    msg << "mapped parameters miss the epsilon = -1 q-condition by " << m.q_condition_residual;
    throw Error(ErrorKind::VerificationFailed, msg.str());
  }
  return m;
}

FundamentalSolutions fundamental_solutions(const PotentialParams& pp, double E) {
  HeunMapping m = map_to_heun(pp, E);
  if (std::abs(m.q_label) <= 1e-14 * (1.0 + std::abs(m.alpha1))) {
    throw Error(ErrorKind::Degenerate, "alpha1 = alpha2: the 3F2 auxiliary parameter is undefined");
  }
  const HeunParams& p = m.params;
  const cplx ab = p.alpha * p.beta;
  const cplx e1 = ab / m.q_label, e2 = -ab / m.q_label;
  GhfParams g1({p.alpha, p.beta, 1.0 + e1}, {e1, p.gamma});
  GhfParams g2({p.alpha, p.beta, 1.0 + e2}, {e2, p.delta});
  return {m, AssembledSolution(std::move(g1), Expansion::AtZero, kHeunA, 0.0),
          AssembledSolution(std::move(g2), Expansion::AtOne, kHeunA, 0.0)};
}

double spectrum_function(const PotentialParams& pp, double E) {
  const HeunMapping m = map_to_heun(pp, E);
  const HeunParams& p = m.params;
  const GhfParams base({p.alpha, p.beta}, {p.delta});
  const GhfParams raised({p.alpha + 1.0, p.beta + 1.0}, {p.delta + 1.0});
  const cplx f = ghf_eval(base, 0.5).value +
                 (m.alpha1 - m.alpha2) / (2.0 * p.delta) * ghf_eval(raised, 0.5).value;
  return f.real();
}

double default_energy_floor(const PotentialParams& pp) {
  validate(pp);
  if (pp.V1 >= 0.0) return pp.threshold() - 1.0;
  // V >= V0 + V1 + V1 / sqrt(t). The ground state of -psi''/k - |V1| t^(-1/2)
  // on the half line is -0.438 k^(1/3) |V1|^(4/3).
  return pp.threshold() - 0.5 * std::cbrt(pp.mass_scale) * std::pow(-pp.V1, 4.0 / 3.0);
}

SpectrumResult spectrum(const PotentialParams& pp, double e_min, double e_max, int grid) {
  check_window(pp, e_min, e_max, grid);
  SpectrumResult out;
  out.energies = grid_roots(
      pp, e_min, e_max, grid, [&pp](double E) { return spectrum_function(pp, E); }, 1e-10, &out.warnings);
  out.bound_state_count = count_bound_states(pp);
  out.count_method_agreement = static_cast<int>(out.energies.size()) == out.bound_state_count;
  if (!out.count_method_agreement) {
    out.warnings.push_back("spectrum has " + std::to_string(out.energies.size()) +
                           " roots but the zero-energy solution has " +
                           std::to_string(out.bound_state_count) + " zeros");
  }
  return out;
}

SpectrumResult spectrum(const PotentialParams& pp, int grid) {
  return spectrum(pp, default_energy_floor(pp), pp.threshold(), grid);
}

ZeroEnergySolution::ZeroEnergySolution(const PotentialParams& pp) : pp_(pp), alpha1_(0.0) {
  validate(pp);
  if (!(pp.V1 < 0.0)) throw Error(ErrorKind::InvalidArgument, "the zero-energy construction needs V1 < 0");
  alpha1_ = std::sqrt(-2.0 * pp.mass_scale * pp.V1);
  // psi(0) = 0 at z = 1/2.
  const Branches at_origin = branches(0.5);
  const double norm = std::hypot(at_origin.b1, at_origin.b2);
  c1_ = at_origin.b2 / norm;
  c2_ = -at_origin.b1 / norm;
  lost_digits_ = at_origin.lost_digits;
}

ZeroEnergySolution::Branches ZeroEnergySolution::branches(double z) const {
  const Wide a1 = alpha1_;
  const Wide r2 = boost::multiprecision::sqrt(Wide(2));
  const WideSum f1 = wide_3f2({a1 * (1 + r2), a1 * (1 - r2), 1 + a1}, {a1, 1 + 2 * a1}, Wide(z));
  const WideSum f2 = wide_3f2({a1 * (r2 - 1), -a1 * (r2 + 1), 1 + a1}, {a1, Wide(1)}, 1 - Wide(z));
  const double zp = std::pow(z, alpha1_), zm = 1.0 / zp;
  const double g1 = static_cast<double>(f1.f), dg1 = static_cast<double>(f1.df);
  const double g2 = static_cast<double>(f2.f), dg2 = static_cast<double>(f2.df);
  return {zp * g1, alpha1_ * zp / z * g1 + zp * dg1, zm * g2, -alpha1_ * zm / z * g2 - zm * dg2,
          std::max(f1.lost_digits, f2.lost_digits)};
}

std::pair<double, double> ZeroEnergySolution::series(double t) const {
  const Branches b = branches(z_of_t(t));
  return {c1_ * b.b1 + c2_ * b.b2, (c1_ * b.db1 + c2_ * b.db2) * dz_dt(t)};
}

std::pair<double, double> ZeroEnergySolution::evaluate(double x) const {
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "the zero-energy solution is evaluated at x > 0");
  const double t = x / pp_.sigma;
  if (t <= kSeriesSwitch) {
    const auto [psi, dpsi] = series(t);
    return {psi, dpsi / pp_.sigma};
  }
  const auto [psi0, dpsi0] = series(kSeriesSwitch);
  const Real2 y = integrate_dp5(schrodinger_rhs(pp_, pp_.threshold()), kSeriesSwitch, Real2{psi0, dpsi0}, t,
                                StepControl{}, [](double, const Real2&) {});
  return {y[0], y[1] / pp_.sigma};
}

double zero_energy_solution(const PotentialParams& pp, double x) {
  return ZeroEnergySolution(pp).evaluate(x).first;
}

int count_bound_states(const PotentialParams& pp) {
  validate(pp);
  if (pp.V1 >= 0.0) return 0;
  const ZeroEnergySolution sol(pp);

  // Log-spaced near the origin, then linear up to the series switch.
  std::vector<double> ts;
  for (int i = 0; i <= 60; ++i) ts.push_back(1e-4 * std::pow(1e3, i / 60.0));
  for (double t = 0.1 + 0.005; t < ZeroEnergySolution::kSeriesSwitch; t += 0.005) ts.push_back(t);
  ts.push_back(ZeroEnergySolution::kSeriesSwitch);

  std::vector<double> psi(ts.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    psi[i] = sol.evaluate(ts[i] * pp.sigma).first;
    peak = std::max(peak, std::abs(psi[i]));
  }
  int zeros = 0;
  const double noise = 1e-12 * peak;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if ((psi[i] < 0.0) == (psi[i + 1] < 0.0)) continue;
    // A flicker at rounding level is not a node.
    if (std::max(std::abs(psi[i]), std::abs(psi[i + 1])) > noise) ++zeros;
  }

  const auto start = sol.evaluate(ZeroEnergySolution::kSeriesSwitch * pp.sigma);
  double prev = start.first;
  const Real2 end = integrate_dp5(
      schrodinger_rhs(pp, pp.threshold()), ZeroEnergySolution::kSeriesSwitch,
      Real2{start.first, start.second * pp.sigma}, kCountFar, StepControl{}, [&](double, const Real2& y) {
        if ((y[0] < 0.0) != (prev < 0.0)) ++zeros;
        prev = y[0];
      });
  // Beyond kCountFar psi is linear in x; it has one more zero if it heads back toward the axis.
  if (end[0] * end[1] < 0.0) ++zeros;
  return zeros;
}

double shoot(const PotentialParams& pp, double E) {
  validate(pp);
  if (!(E < pp.threshold())) throw Error(ErrorKind::InvalidArgument, "shooting needs E below V0 + V1");
  const double kappa = kappa_of(pp, E);
  const auto rhs = schrodinger_rhs(pp, E);
  Real2 y{1.0, -kappa};
  // Unit segments with renormalization keep exp(kappa t) growth in range.
  double t = kShootFar;
  while (t > kShootNear) {
    const double next = std::max(kShootNear, t - 1.0);
    y = integrate_dp5(rhs, t, y, next, StepControl{}, [](double, const Real2&) {});
    const double n = std::hypot(y[0], y[1]);
    y = {y[0] / n, y[1] / n};
    t = next;
  }
  const double psi0 = y[0] - kShootNear * y[1];
  return psi0 / std::hypot(psi0, y[1]);
}

std::vector<double> shooting_roots(const PotentialParams& pp, double e_min, double e_max, int grid) {
  check_window(pp, e_min, e_max, grid);
  // The shooting mismatch needs E strictly below the threshold.
  const double top = std::min(e_max, pp.threshold() - 1e-12 * (1.0 + std::abs(pp.threshold())));
  return grid_roots(pp, e_min, top, grid, [&pp](double E) { return shoot(pp, E); }, 1e-12, nullptr);
}

}  // namespace heun::quantum
