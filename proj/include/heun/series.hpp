#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "heun/core.hpp"

namespace heun {

inline constexpr int kDefaultCheckOrder = 200;
inline constexpr int kDefaultTermCap = 100'000;
inline constexpr double kSeriesTol = 1e-16;

/// Truncated expansion (z - center)^exponent * sum_n c_n (z - center)^n.
struct PowerSeries {
  cplx center = 0.0;
  cplx exponent = 0.0;
  std::vector<cplx> coefficients{cplx(1.0)};
  double radius = 1.0;
};

/// Numerator and denominator parameters of rFs. Construction verifies that
/// no coefficient up to check_order hits a denominator pole; a pole beyond a
/// terminating numerator factor is harmless, and numerator/denominator
/// entries that are exactly equal cancel.
class GhfParams {
 public:
  GhfParams(std::vector<cplx> numerator, std::vector<cplx> denominator,
            int check_order = kDefaultCheckOrder);

  const std::vector<cplx>& numerator() const { return numerator_; }
  const std::vector<cplx>& denominator() const { return denominator_; }

  /// Index of the last nonzero coefficient when some numerator factor
  /// vanishes (the series is then a polynomial).
  std::optional<int> last_nonzero() const { return last_nonzero_; }

  const std::vector<cplx>& active_numerator() const { return active_num_; }
  const std::vector<cplx>& active_denominator() const { return active_den_; }

 private:
  std::vector<cplx> numerator_;
  std::vector<cplx> denominator_;
  std::vector<cplx> active_num_;
  std::vector<cplx> active_den_;
  std::optional<int> last_nonzero_;
};

/// c_n / c_{n-1} = prod(a_k - 1 + n) / (n prod(b_k - 1 + n)), n >= 1.
cplx ghf_ratio(const GhfParams& g, int n);

/// Coefficients c_0..c_n_max of the series (c_0 = 1).
std::vector<cplx> ghf_coefficients(const GhfParams& g, int n_max);

struct GhfValue {
  cplx value;
  int terms_used = 0;
  double tail_estimate = 0.0;
};

/// Partial sums stop at the first n where three consecutive terms are below
/// tol * |partial sum|.
GhfValue ghf_eval(const GhfParams& g, cplx z, double tol = kSeriesTol, int n_cap = kDefaultTermCap);

struct GhfDerivatives {
  cplx f;
  cplx df;
  cplx ddf;
  int terms_used = 0;
};

/// F, F' and F'' with respect to the series argument, same stopping rule.
GhfDerivatives ghf_derivatives(const GhfParams& g, cplx w, double tol = kSeriesTol,
                               int n_cap = kDefaultTermCap);

/// Frobenius series at z = 0 for exponent mu in {0, 1 - gamma}. The second
/// exponent goes through u = z^(1-gamma) v, which is again a Heun equation.
PowerSeries frobenius_coeffs(const HeunParams& p, cplx mu, int n_max);

/// Heun equation satisfied by v when u = z^(1-gamma) v.
HeunParams shift_exponent_at_zero(const HeunParams& p);

/// Value and first two derivatives, term-wise. |z - center| must be below
/// 0.95 * radius.
Derivatives series_derivatives(const PowerSeries& ps, cplx z, double tol = kSeriesTol);

/// Largest relative mismatch over 1 <= n <= n_max between the forward
/// three-term Frobenius ratio c_n / c_{n-1} (exponent 0) and ghf_ratio(g, n).
/// Forward recursion loses the GHF solution when |a| < 1, where it is the
/// minimal solution; prefer recurrence_defect there.
double ratio_consistency(const HeunParams& p, const GhfParams& g, int n_max);

/// Same comparison one step at a time: the three-term ratio predicted from
/// the GHF's own c_{n-1}, c_{n-2} against ghf_ratio(g, n). Stable for any a.
double recurrence_defect(const HeunParams& p, const GhfParams& g, int n_max);

}  // namespace heun
