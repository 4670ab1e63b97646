#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace heun {

using cplx = std::complex<double>;

/// Dense polynomial with complex coefficients in ascending degree. Exact
/// trailing zeros are trimmed; the zero polynomial is {0}.
class ComplexPoly {
 public:
  ComplexPoly() : c_{cplx(0.0)} {}
  explicit ComplexPoly(std::vector<cplx> ascending);

  static ComplexPoly constant(cplx c) { return ComplexPoly({c}); }
  /// c0 + c1 x
  static ComplexPoly linear(cplx c0, cplx c1) { return ComplexPoly({c0, c1}); }
  static ComplexPoly from_roots(std::span<const cplx> roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == cplx(0.0); }
  const std::vector<cplx>& coefficients() const { return c_; }
  cplx operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cplx(0.0); }
  cplx leading() const { return c_.back(); }
  double max_abs_coefficient() const;

  cplx operator()(cplx x) const;
  ComplexPoly derivative() const;
  ComplexPoly monic() const;
  /// p(x + s)
  ComplexPoly shifted(cplx s) const;

  friend ComplexPoly operator+(const ComplexPoly& l, const ComplexPoly& r);
  friend ComplexPoly operator-(const ComplexPoly& l, const ComplexPoly& r);
  friend ComplexPoly operator*(const ComplexPoly& l, const ComplexPoly& r);
  friend ComplexPoly operator*(cplx s, const ComplexPoly& p);

 private:
  void trim();
  std::vector<cplx> c_;
};

/// All roots with multiplicity: companion-matrix eigenvalues followed by
/// Newton polishing. Throws InvalidArgument for constant polynomials.
std::vector<cplx> poly_roots(const ComplexPoly& p);

/// sum_k |c_k| |x|^k, the natural scale for judging |p(x)|.
double poly_magnitude(const ComplexPoly& p, cplx x);

/// The polynomial of degree <= d through (n, values[n]) for n = 0..d, built
/// from exact forward differences in Newton form.
ComplexPoly interpolate_integer_nodes(std::span<const cplx> values);

using VectorFunction = std::function<std::vector<cplx>(std::span<const cplx>)>;

struct NewtonOptions {
  double tol = 1e-12;   // on max_i |F_i|
  int max_iter = 200;
  int max_halvings = 30;
  int polish_steps = 3;  // extra iterations after reaching tol, kept while they help
};

struct NewtonPoint {
  std::vector<cplx> point;
  double residual = 0.0;
  int iterations = 0;
};

double max_abs(std::span<const cplx> v);

/// Damped Newton from a single start; Jacobian by central differences with
/// step 1e-7 (1 + |x_i|). Returns nothing when the start does not converge.
std::optional<NewtonPoint> newton_solve(const VectorFunction& f, std::vector<cplx> x,
                                        const NewtonOptions& opts);

/// newton_solve for each start, keeping converged points in start order.
std::vector<NewtonPoint> newton_multistart(const VectorFunction& f, std::size_t dim,
                                           std::span<const std::vector<cplx>> starts,
                                           const NewtonOptions& opts);

/// Sorts point[tail_offset..] by (real, imag), treating real parts within
/// 1e-9 relative as equal so conjugate pairs order stably.
void canonicalize_tail(std::vector<cplx>& point, std::size_t tail_offset);

struct Cluster {
  std::vector<cplx> point;
  int multiplicity = 1;
};

/// Canonicalizes each point and merges those within atol + rtol |x|
/// componentwise. Representatives keep first-seen order.
std::vector<Cluster> dedupe(std::span<const std::vector<cplx>> points, double atol, double rtol,
                            std::size_t tail_offset);

}  // namespace heun
