#pragma once

#include <cmath>
#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "heun/core.hpp"

namespace heun::testing {

/// Seeded generator for parameter sets. Families with |a| > 1 keep the
/// forward Frobenius recursion stable, which the ratio-consistency checks rely on.
class ParamGen {
 public:
  explicit ParamGen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  cplx in_disk(cplx center, double radius) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    return center + std::polar(r, uniform(0.0, 2.0 * std::numbers::pi));
  }

  /// Real Fuchsian family with epsilon = -order.
  HeunFamily family(int order, double a_lo = 1.5, double a_hi = 4.0) {
    return family_with_epsilon(uniform(a_lo, a_hi), uniform(0.2, 3.0), uniform(0.2, 3.0), uniform(0.2, 3.0),
                               -static_cast<double>(order));
  }

  /// Complex parameters with an arbitrary (complex) epsilon.
  HeunParams generic_params() {
    cplx a;
    do a = in_disk(0.0, 4.0); while (std::abs(a) < 0.5 || std::abs(a - 1.0) < 0.5);
    return make_params(a, in_disk(0.0, 3.0), in_disk(0.0, 3.0), in_disk(1.5, 1.0), in_disk(0.0, 3.0),
                       in_disk(0.0, 3.0));
  }

  std::vector<cplx> complex_vector(std::size_t n, double radius) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = in_disk(0.0, radius);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(cplx x, cplx ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

/// Pochhammer symbol by direct product.
inline cplx pochhammer(cplx x, int n) {
  cplx p = 1.0;
  for (int k = 0; k < n; ++k) p *= x + static_cast<double>(k);
  return p;
}

/// n-th coefficient of pFq from scratch (no reuse of earlier terms), for
/// brute-force comparison. Factors are interleaved to stay in range.
inline cplx ghf_term(const std::vector<cplx>& num, const std::vector<cplx>& den, int n) {
  cplx t = 1.0;
  for (int k = 0; k < n; ++k) {
    for (const cplx a : num) t *= a + static_cast<double>(k);
    for (const cplx b : den) t /= b + static_cast<double>(k);
    t /= static_cast<double>(k + 1);
  }
  return t;
}

/// Sum of pFq by brute force, terms computed independently.
inline cplx ghf_brute(const std::vector<cplx>& num, const std::vector<cplx>& den, cplx z, int terms) {
  cplx s = 0.0, pw = 1.0;
  for (int n = 0; n < terms; ++n, pw *= z) s += ghf_term(num, den, n) * pw;
  return s;
}

/// Roots of c2 x^2 + c1 x + c0 by the quadratic formula.
inline std::pair<cplx, cplx> quadratic_roots(cplx c2, cplx c1, cplx c0) {
  const cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
  // Avoid cancellation: pick the sign that adds magnitudes.
  const cplx sgn = std::real(std::conj(c1) * disc) >= 0.0 ? 1.0 : -1.0;
  const cplx big = -(c1 + sgn * disc) / 2.0;
  return {big / c2, c0 / big};
}

}  // namespace heun::testing

#include <optional>

#include "heun/error.hpp"

namespace heun::testing {

/// Kind of the heun::Error thrown by f, if any.
template <class F>
std::optional<ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

/// Frobenius coefficients at z = 0 (exponent 0) straight from
/// R_n c_n + Q_{n-1} c_{n-1} + P_{n-2} c_{n-2} = 0.
inline std::vector<cplx> three_term_coefficients(const HeunParams& p, int n_max) {
  std::vector<cplx> c(n_max + 1, 0.0);
  c[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double m = n - 1;
    const cplx R = p.a * (p.gamma - 1.0 + double(n)) * double(n);
    const cplx Q = -p.q - (p.a * p.delta + p.epsilon) * m - (1.0 + p.a) * (p.gamma - 1.0 + m) * m;
    cplx rhs = -Q * c[n - 1];
    if (n >= 2) rhs -= (p.alpha + (m - 1.0)) * (p.beta + (m - 1.0)) * c[n - 2];
    c[n] = rhs / R;
  }
  return c;
}

/// Value, first and second derivative of sum c_n z^n.
inline std::array<cplx, 3> sum_series(const std::vector<cplx>& c, cplx z) {
  std::array<cplx, 3> r{0.0, 0.0, 0.0};
  for (std::size_t n = c.size(); n-- > 0;) {
    r[2] = r[2] * z + 2.0 * r[1];
    r[1] = r[1] * z + r[0];
    r[0] = r[0] * z + c[n];
  }
  return r;
}

}  // namespace heun::testing
