#include "heun/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "heun/error.hpp"

namespace heun {

ComplexPoly::ComplexPoly(std::vector<cplx> ascending) : c_(std::move(ascending)) {
  if (c_.empty()) c_.push_back(cplx(0.0));
  trim();
}

void ComplexPoly::trim() {
  while (c_.size() > 1 && c_.back() == cplx(0.0)) c_.pop_back();
}

ComplexPoly ComplexPoly::from_roots(std::span<const cplx> roots) {
  ComplexPoly p = constant(1.0);
  for (const cplx r : roots) p = p * linear(-r, 1.0);
  return p;
}

double ComplexPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const cplx c : c_) m = std::max(m, std::abs(c));
  return m;
}

cplx ComplexPoly::operator()(cplx x) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

ComplexPoly ComplexPoly::derivative() const {
  if (c_.size() == 1) return ComplexPoly();
  std::vector<cplx> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::monic() const {
  if (is_zero()) throw Error(ErrorKind::InvalidArgument, "the zero polynomial has no monic form");
  return (1.0 / leading()) * *this;
}

ComplexPoly ComplexPoly::shifted(cplx s) const {
  // Horner in the shifted variable: p(x + s) = (...(c_d (x+s) + c_{d-1})(x+s) ...)
  ComplexPoly acc;
  const ComplexPoly xs = linear(s, 1.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * xs + constant(*it);
  return acc;
}

ComplexPoly operator+(const ComplexPoly& l, const ComplexPoly& r) {
  std::vector<cplx> out(std::max(l.c_.size(), r.c_.size()), cplx(0.0));
  for (std::size_t k = 0; k < l.c_.size(); ++k) out[k] += l.c_[k];
  for (std::size_t k = 0; k < r.c_.size(); ++k) out[k] += r.c_[k];
  return ComplexPoly(std::move(out));
}

ComplexPoly operator-(const ComplexPoly& l, const ComplexPoly& r) { return l + cplx(-1.0) * r; }

ComplexPoly operator*(const ComplexPoly& l, const ComplexPoly& r) {
  std::vector<cplx> out(l.c_.size() + r.c_.size() - 1, cplx(0.0));
  for (std::size_t i = 0; i < l.c_.size(); ++i) {
    for (std::size_t j = 0; j < r.c_.size(); ++j) out[i + j] += l.c_[i] * r.c_[j];
  }
  return ComplexPoly(std::move(out));
}

ComplexPoly operator*(cplx s, const ComplexPoly& p) {
  std::vector<cplx> out = p.c_;
  for (cplx& c : out) c *= s;
  return ComplexPoly(std::move(out));
}

double poly_magnitude(const ComplexPoly& p, cplx x) {
  double acc = 0.0;
  const double r = std::abs(x);
  const auto& c = p.coefficients();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

namespace {

// A root of multiplicity m comes out of the companion matrix as m points
// spread by about eps^(1/m). It is a simple root of the (m-1)-th derivative,
// so Newton on that derivative pins it down. The result replaces the cluster
// only if p is at rounding level there, which keeps distinct close roots apart.
void refine_clusters(const ComplexPoly& p, std::vector<cplx>& roots) {
  const std::size_t d = roots.size();
  std::vector<int> label(d, -1);
  int labels = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (label[i] >= 0) continue;
    label[i] = labels;
    for (std::size_t grow = 0; grow < d; ++grow) {  // single linkage
      bool changed = false;
      for (std::size_t j = 0; j < d; ++j) {
        if (label[j] >= 0) continue;
        for (std::size_t k = 0; k < d; ++k) {
          if (label[k] != labels) continue;
          if (std::abs(roots[j] - roots[k]) < 1e-2 * (1.0 + std::abs(roots[k]))) {
            label[j] = labels;
            changed = true;
            break;
          }
        }
      }
      if (!changed) break;
    }
    ++labels;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < labels; ++l) {
    std::vector<std::size_t> members;
    cplx mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (label[i] == l) {
        members.push_back(i);
        mean += roots[i];
      }
    }
    if (members.size() < 2) continue;
    mean /= static_cast<double>(members.size());
    ComplexPoly g = p;
    for (std::size_t k = 1; k < members.size(); ++k) g = g.derivative();
    const ComplexPoly dg = g.derivative();
    cplx c = mean;
    for (int it = 0; it < 20; ++it) {
      const cplx slope = dg(c);
      if (slope == cplx(0.0)) break;
      const cplx step = g(c) / slope;
      c -= step;
      if (std::abs(step) <= 4.0 * eps * (1.0 + std::abs(c))) break;
    }
    if (std::abs(p(c)) <= 8.0 * static_cast<double>(d) * eps * poly_magnitude(p, c)) {
      for (const std::size_t i : members) roots[i] = c;
    }
  }
}

}  // namespace

std::vector<cplx> poly_roots(const ComplexPoly& p) {
  if (p.degree() < 1) {
    throw Error(ErrorKind::InvalidArgument, "poly_roots needs a polynomial of degree >= 1");
  }
  const int d = p.degree();
  const ComplexPoly m = p.monic();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -m[static_cast<std::size_t>(i)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "companion eigenvalue iteration failed");
  }

  const ComplexPoly dp = p.derivative();
  std::vector<cplx> roots(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    cplx r = solver.eigenvalues()[i];
    double best = std::abs(p(r));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
      const cplx slope = dp(r);
      if (slope == cplx(0.0)) break;
      const cplx cand = r - p(r) / slope;
      const double val = std::abs(p(cand));
      if (!(val < best)) break;
      r = cand;
      best = val;
    }
    roots[static_cast<std::size_t>(i)] = r;
  }
  refine_clusters(p, roots);
  std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return roots;
}

ComplexPoly interpolate_integer_nodes(std::span<const cplx> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "interpolation needs at least one node");
  const std::size_t d = values.size() - 1;
  // Divided differences on unit-spaced nodes: f[0..k] = Delta^k f(0) / k!.
  std::vector<cplx> work(values.begin(), values.end());
  std::vector<cplx> divided(d + 1);
  double factorial = 1.0;
  for (std::size_t k = 0; k <= d; ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    divided[k] = work[0] / factorial;
    for (std::size_t i = 0; i + 1 < work.size(); ++i) work[i] = work[i + 1] - work[i];
    work.pop_back();
  }
  ComplexPoly p = ComplexPoly::constant(divided[d]);
  for (std::size_t k = d; k-- > 0;) {
    p = p * ComplexPoly::linear(-static_cast<double>(k), 1.0) + ComplexPoly::constant(divided[k]);
  }
  return p;
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx c : v) {
    const double a = std::abs(c);
    if (!std::isfinite(a)) return std::numeric_limits<double>::infinity();
    m = std::max(m, a);
  }
  return m;
}

std::optional<NewtonPoint> newton_solve(const VectorFunction& f, std::vector<cplx> x,
                                        const NewtonOptions& opts) {
  const std::size_t d = x.size();
  std::vector<cplx> fx = f(x);
  double r = max_abs(fx);
  if (!std::isfinite(r)) return std::nullopt;

  Eigen::MatrixXcd jac(d, d);
  Eigen::VectorXcd rhs(d);
  int polish_left = opts.polish_steps;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (r < opts.tol) {
      if (polish_left-- <= 0 || r == 0.0) break;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double h = 1e-7 * (1.0 + std::abs(x[i]));
      std::vector<cplx> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const std::vector<cplx> fp = f(xp), fm = f(xm);
      for (std::size_t j = 0; j < d; ++j) jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = (fp[j] - fm[j]) / (2.0 * h);
    }
    for (std::size_t j = 0; j < d; ++j) rhs(static_cast<Eigen::Index>(j)) = -fx[j];
    const Eigen::VectorXcd step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) break;

    double t = 1.0;
    bool improved = false;
    std::vector<cplx> trial(d);
    std::vector<cplx> ftrial;
    double rtrial = 0.0;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      for (std::size_t i = 0; i < d; ++i) trial[i] = x[i] + t * step(static_cast<Eigen::Index>(i));
      ftrial = f(trial);
      rtrial = max_abs(ftrial);
      if (rtrial < r) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    x = trial;
    fx = std::move(ftrial);
    r = rtrial;
  }
  if (!(r < opts.tol)) return std::nullopt;
  return NewtonPoint{std::move(x), r, it};
}

std::vector<NewtonPoint> newton_multistart(const VectorFunction& f, std::size_t dim,
                                           std::span<const std::vector<cplx>> starts,
                                           const NewtonOptions& opts) {
  std::vector<NewtonPoint> out;
  for (const auto& s : starts) {
    if (s.size() != dim) throw Error(ErrorKind::InvalidArgument, "start point has the wrong dimension");
    if (auto res = newton_solve(f, s, opts)) out.push_back(std::move(*res));
  }
  return out;
}

void canonicalize_tail(std::vector<cplx>& point, std::size_t tail_offset) {
  if (tail_offset >= point.size()) return;
  auto before = [](cplx x, cplx y) {
    const double tol = 1e-9 * (1.0 + std::max(std::abs(x.real()), std::abs(y.real())));
    if (std::abs(x.real() - y.real()) > tol) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  // Insertion sort: the tolerant comparison is not a strict weak order.
  for (std::size_t i = tail_offset + 1; i < point.size(); ++i) {
    for (std::size_t j = i; j > tail_offset && before(point[j], point[j - 1]); --j) {
      std::swap(point[j], point[j - 1]);
    }
  }
}

std::vector<Cluster> dedupe(std::span<const std::vector<cplx>> points, double atol, double rtol,
                            std::size_t tail_offset) {
  std::vector<Cluster> clusters;
  for (auto p : points) {
    canonicalize_tail(p, tail_offset);
    auto near = [&](cplx x, cplx y) {
      return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
    };
    auto close = [&](const std::vector<cplx>& rep) {
      if (rep.size() != p.size()) return false;
      const std::size_t head = std::min(tail_offset, p.size());
      for (std::size_t i = 0; i < head; ++i) {
        if (!near(rep[i], p[i])) return false;
      }
      // Tail entries match as a multiset.
      std::vector<bool> used(p.size(), false);
      for (std::size_t i = head; i < p.size(); ++i) {
        bool found = false;
        for (std::size_t j = head; j < rep.size() && !found; ++j) {
          if (!used[j] && near(rep[j], p[i])) used[j] = found = true;
        }
        if (!found) return false;
      }
      return true;
    };
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) { return close(c.point); });
    if (it != clusters.end()) {
      ++it->multiplicity;
    } else {
      clusters.push_back({std::move(p), 1});
    }
  }
  return clusters;
}

}  // namespace heun
