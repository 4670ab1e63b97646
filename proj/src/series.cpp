#include "heun/series.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "heun/error.hpp"

namespace heun {

namespace {

bool is_nonpositive_integer(cplx x) {
  return x.imag() == 0.0 && x.real() <= 0.0 && std::floor(x.real()) == x.real();
}

// R_n, Q_n, P_n of the exponent-0 Frobenius recurrence
//   R_n c_n + Q_{n-1} c_{n-1} + P_{n-2} c_{n-2} = 0.
cplx rec_r(const HeunParams& p, double n) { return p.a * (p.gamma - 1.0 + n) * n; }
cplx rec_q(const HeunParams& p, double n) {
  return -p.q - (p.a * p.delta + p.epsilon) * n - (1.0 + p.a) * (p.gamma - 1.0 + n) * n;
}
cplx rec_p(const HeunParams& p, double n) { return (p.alpha + n) * (p.beta + n); }

// Sums that cancel lose digits in proportion to sum |term| / |sum|; carrying
// the terms in long double buys back about three of them.
using xcplx = std::complex<long double>;

xcplx widen(cplx z) { return {z.real(), z.imag()}; }
cplx narrow(xcplx z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

xcplx wide_ratio(const GhfParams& g, int n) {
  const long double nn = n;
  xcplx num = 1.0L, den = nn;
  for (const cplx a : g.active_numerator()) num *= widen(a) - 1.0L + nn;
  for (const cplx b : g.active_denominator()) {
    const xcplx f = widen(b) - 1.0L + nn;
    if (f == xcplx(0.0L)) {
      throw Error(ErrorKind::UndefinedSeries, "zero denominator factor at n = " + std::to_string(n));
    }
    den *= f;
  }
  return num / den;
}

bool converges_everywhere(const GhfParams& g) {
  return g.active_numerator().size() <= g.active_denominator().size();
}

void require_convergent(const GhfParams& g, cplx z) {
  if (g.last_nonzero() || z == cplx(0.0) || converges_everywhere(g)) return;
  if (g.active_numerator().size() == g.active_denominator().size() + 1) {
    if (std::abs(z) < 1.0) return;
    throw Error(ErrorKind::OutsideDisk, "rFs with r = s + 1 needs |z| < 1");
  }
  throw Error(ErrorKind::NoConvergence, "rFs with r > s + 1 diverges unless it terminates");
}

}  // namespace

GhfParams::GhfParams(std::vector<cplx> numerator, std::vector<cplx> denominator, int check_order)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  active_num_ = numerator_;
  for (const cplx b : denominator_) {
    auto it = std::find(active_num_.begin(), active_num_.end(), b);
    if (it != active_num_.end()) {
      active_num_.erase(it);
    } else {
      active_den_.push_back(b);
    }
  }
  for (const cplx a : active_num_) {
    if (is_nonpositive_integer(a)) {
      const int zero_at = 1 - static_cast<int>(a.real());
      if (!last_nonzero_ || zero_at - 1 < *last_nonzero_) last_nonzero_ = zero_at - 1;
    }
  }
  const int limit = last_nonzero_ ? std::min(check_order, *last_nonzero_) : check_order;
  for (const cplx b : active_den_) {
    for (int n = 1; n <= limit; ++n) {
      const cplx f = b - 1.0 + static_cast<double>(n);
      if (std::abs(f) <= 1e-12 * (1.0 + std::abs(b))) {
        throw Error(ErrorKind::UndefinedSeries,
                    "denominator parameter " + std::to_string(b.real()) + "+" +
                        std::to_string(b.imag()) + "i hits a pole at order " + std::to_string(n));
      }
    }
  }
}

cplx ghf_ratio(const GhfParams& g, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "ghf_ratio needs n >= 1");
  const double nn = static_cast<double>(n);
  cplx num = 1.0, den = nn;
  for (const cplx a : g.active_numerator()) num *= a - 1.0 + nn;
  for (const cplx b : g.active_denominator()) {
    const cplx f = b - 1.0 + nn;
    if (f == cplx(0.0)) {
      throw Error(ErrorKind::UndefinedSeries, "zero denominator factor at n = " + std::to_string(n));
    }
    den *= f;
  }
  return num / den;
}

std::vector<cplx> ghf_coefficients(const GhfParams& g, int n_max) {
  std::vector<cplx> c(static_cast<std::size_t>(std::max(n_max, 0)) + 1);
  c[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    c[k] = (g.last_nonzero() && n > *g.last_nonzero()) ? cplx(0.0) : c[k - 1] * ghf_ratio(g, n);
  }
  return c;
}

GhfValue ghf_eval(const GhfParams& g, cplx z, double tol, int n_cap) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (z == cplx(0.0)) return {1.0, 1, 0.0};
  require_convergent(g, z);
  const xcplx w = widen(z);
  xcplx sum = 1.0L, term = 1.0L, rho = 0.0L;
  int small = 0;
  for (int n = 1; n <= n_cap; ++n) {
    if (g.last_nonzero() && n > *g.last_nonzero()) return {narrow(sum), n, 0.0};
    rho = wide_ratio(g, n) * w;
    term *= rho;
    sum += term;
    small = std::abs(term) <= tol * std::abs(sum) ? small + 1 : 0;
    if (small >= 3) {
      const double r = static_cast<double>(std::abs(rho));
      const double t = static_cast<double>(std::abs(term));
      const double tail = r < 1.0 ? t / (1.0 - r) : std::numeric_limits<double>::infinity();
      return {narrow(sum), n + 1, tail};
    }
  }
  throw Error(ErrorKind::NoConvergence, "series did not converge within " + std::to_string(n_cap) + " terms");
}

GhfDerivatives ghf_derivatives(const GhfParams& g, cplx w, double tol, int n_cap) {
  require_convergent(g, w);
  // Rolling powers w^n, w^(n-1), w^(n-2) keep w = 0 well defined.
  const xcplx x = widen(w);
  xcplx c = 1.0L;
  xcplx pw = 1.0L, pw1 = 0.0L, pw2 = 0.0L;
  xcplx f = 1.0L, df = 0.0L, ddf = 0.0L;
  int small = 0;
  for (int n = 1; n <= n_cap; ++n) {
    if (g.last_nonzero() && n > *g.last_nonzero()) return {narrow(f), narrow(df), narrow(ddf), n};
    c *= wide_ratio(g, n);
    pw2 = pw1;
    pw1 = pw;
    pw *= x;
    const long double nn = n;
    const xcplx t0 = c * pw;
    const xcplx t1 = nn * c * pw1;
    const xcplx t2 = nn * (nn - 1.0L) * c * pw2;
    f += t0;
    df += t1;
    ddf += t2;
    const bool tiny = std::abs(t0) <= tol * std::abs(f) && std::abs(t1) <= tol * std::abs(df) &&
                      std::abs(t2) <= tol * std::abs(ddf);
    small = tiny ? small + 1 : 0;
    if (small >= 3) return {narrow(f), narrow(df), narrow(ddf), n + 1};
  }
  throw Error(ErrorKind::NoConvergence, "derivative series did not converge within " + std::to_string(n_cap) + " terms");
}

HeunParams shift_exponent_at_zero(const HeunParams& p) {
  const cplx s = 1.0 - p.gamma;
  return make_params(p.a, p.alpha + s, p.beta + s, 2.0 - p.gamma, p.delta,
                     p.q + s * (p.a * p.delta + p.epsilon));
}

PowerSeries frobenius_coeffs(const HeunParams& p, cplx mu, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  HeunParams eq = p;
  const cplx second = 1.0 - p.gamma;
  if (std::abs(mu) <= 1e-12) {
    mu = 0.0;
  } else if (std::abs(mu - second) <= 1e-12 * (1.0 + std::abs(p.gamma))) {
    mu = second;
    eq = shift_exponent_at_zero(p);
  } else {
    throw Error(ErrorKind::InvalidArgument, "exponent at z = 0 must be 0 or 1 - gamma");
  }

  PowerSeries ps;
  ps.center = 0.0;
  ps.exponent = mu;
  ps.radius = std::min(1.0, std::abs(p.a));
  ps.coefficients.assign(static_cast<std::size_t>(n_max) + 1, cplx(0.0));
  auto& c = ps.coefficients;
  c[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    const cplx r = rec_r(eq, nn);
    if (r == cplx(0.0)) {
      throw Error(ErrorKind::ResonantExponent, "R_n vanishes at n = " + std::to_string(n));
    }
    const auto k = static_cast<std::size_t>(n);
    cplx acc = rec_q(eq, nn - 1.0) * c[k - 1];
    if (n >= 2) acc += rec_p(eq, nn - 2.0) * c[k - 2];
    c[k] = -acc / r;
  }
  return ps;
}

Derivatives series_derivatives(const PowerSeries& ps, cplx z, double tol) {
  const cplx w = z - ps.center;
  if (!(std::abs(w) < 0.95 * ps.radius)) {
    throw Error(ErrorKind::OutsideDisk, "evaluation point is outside 0.95 of the convergence radius");
  }
  const auto& c = ps.coefficients;
  cplx s = c[0], ds = 0.0, dds = 0.0;
  cplx pw = 1.0, pw1 = 0.0, pw2 = 0.0;
  int small = 0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    pw2 = pw1;
    pw1 = pw;
    pw *= w;
    const double nn = static_cast<double>(n);
    const cplx t0 = c[n] * pw, t1 = nn * c[n] * pw1, t2 = nn * (nn - 1.0) * c[n] * pw2;
    s += t0;
    ds += t1;
    dds += t2;
    const bool tiny = std::abs(t0) <= tol * std::abs(s) && std::abs(t1) <= tol * std::abs(ds) &&
                      std::abs(t2) <= tol * std::abs(dds);
    small = tiny ? small + 1 : 0;
    if (small >= 3) break;
  }
  const cplx mu = ps.exponent;
  if (mu == cplx(0.0)) return {s, ds, dds};
  const cplx wm = std::pow(w, mu);
  const cplx wm1 = wm / w;
  const cplx wm2 = wm1 / w;
  return {wm * s, mu * wm1 * s + wm * ds, mu * (mu - 1.0) * wm2 * s + 2.0 * mu * wm1 * ds + wm * dds};
}

double ratio_consistency(const HeunParams& p, const GhfParams& g, int n_max) {
  const PowerSeries ps = frobenius_coeffs(p, 0.0, n_max);
  const auto& c = ps.coefficients;
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    if (g.last_nonzero() && n > *g.last_nonzero()) {
      worst = std::max(worst, std::abs(c[k]) / std::max(std::abs(c[k - 1]), 1e-300));
      continue;
    }
    const cplx rho = ghf_ratio(g, n);
    const cplx frob = c[k] / c[k - 1];
    worst = std::max(worst, std::abs(frob - rho) / std::max(std::abs(rho), 1e-300));
  }
  return worst;
}

double recurrence_defect(const HeunParams& p, const GhfParams& g, int n_max) {
  const std::vector<cplx> d = ghf_coefficients(g, n_max);
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    const auto k = static_cast<std::size_t>(n);
    const cplx r_term = rec_r(p, nn) * d[k];
    const cplx q_term = rec_q(p, nn - 1.0) * d[k - 1];
    const cplx p_term = n >= 2 ? rec_p(p, nn - 2.0) * d[k - 2] : cplx(0.0);
    const cplx resid = r_term + q_term + p_term;
    // |rho_3term - rho_ghf| / |rho_ghf| equals |resid| / |R_n c_n|.
    double scale = std::abs(r_term);
    if (scale == 0.0) scale = std::max(std::abs(q_term), std::abs(p_term));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(resid) / scale);
  }
  return worst;
}

}  // namespace heun
