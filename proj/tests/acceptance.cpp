// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "heun/error.hpp"
#include "heun/integrate.hpp"
#include "heun/quantum.hpp"
#include "heun/reduction.hpp"
#include "support/random_params.hpp"

using namespace heun;
using heun::testing::ParamGen;
using heun::testing::rel_err;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 when the criterion states no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

bool near_any(const std::vector<cplx>& xs, cplx x, double rtol) {
  return std::any_of(xs.begin(), xs.end(), [&](cplx y) { return rel_err(y, x) <= rtol; });
}

Outcome n0_identity() {
  ParamGen gen(1001);
  double q_worst = 0.0, c_worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HeunFamily f = gen.family(0);
    const cplx s = f.a * f.alpha * f.beta;
    const ReductionReport r = solve_reduction(f, 0);
    if (r.solutions.size() != 1) return {false, "expected exactly one solution"};
    q_worst = std::max(q_worst, rel_err(r.solutions[0].q, s));
    const AdmissibleSet set = solutions_at_0(f);
    const auto c = ghf_coefficients(set.items.at(0).solution.ghf(), 49);
    for (int n = 0; n < 50; ++n) c_worst = std::max(c_worst, rel_err(c[n], testing::ghf_term({f.alpha, f.beta}, {f.gamma}, n)));
  }
  return {q_worst <= 4.0 * std::numeric_limits<double>::epsilon() && c_worst <= 1e-13,
          "max |q - a alpha beta|/|q| = " + fmt("%.1e", q_worst) + ", max coefficient error " + fmt("%.1e", c_worst)};
}

Outcome n1_closed_form() {
  ParamGen gen(1002);
  double q_worst = 0.0, e_worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HeunFamily f = gen.family(1);
    const cplx s = f.a * f.alpha * f.beta;
    const cplx u = f.a * (1.0 - f.delta), v = (f.a - 1.0) * (1.0 - f.gamma);
    const cplx k = f.a * (1.0 - f.a) * (1.0 + f.alpha - f.gamma) * (1.0 + f.beta - f.gamma);
    const auto [t1, t2] = testing::quadratic_roots(1.0, u + v, u * v - k);
    const ReductionReport r = solve_reduction(f, 1);
    if (r.solutions.size() != 2) return {false, "set " + std::to_string(trial) + " returned " + std::to_string(r.solutions.size()) + " solutions"};
    for (const auto& sol : r.solutions) {
      q_worst = std::max(q_worst, std::min(rel_err(sol.q, t1 + s), rel_err(sol.q, t2 + s)));
      e_worst = std::max(e_worst, rel_err(sol.e.at(0), s / (sol.q - s)));
    }
  }
  return {q_worst <= 1e-10 && e_worst <= 1e-10,
          "max q error " + fmt("%.1e", q_worst) + ", max e1 error " + fmt("%.1e", e_worst)};
}

Outcome n2_closed_form() {
  ParamGen gen(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HeunFamily f = gen.family(2);
    const cplx a = f.a, al = f.alpha, be = f.beta, ga = f.gamma, s = a * al * be;
    // (t^2 + b t + c)(t + d) + e t in t = q - a alpha beta.
    const cplx b = 4.0 * a - 2.0 - (3.0 + al + be) * a + ga;
    const cplx c = 2.0 * a * (a - 1.0) * al * be;
    const cplx d = -2.0 * (1.0 + al + be) * a - 2.0 + 2.0 * ga;
    const cplx e = 2.0 * a * (a - 1.0) * (al * be + 1.0 + al + be);
    const ComplexPoly cubic({c * d, c + b * d + e, b + d, 1.0});
    std::vector<cplx> roots;
    for (const cplx t : poly_roots(cubic)) roots.push_back(t + s);
    const ReductionReport r = solve_reduction(f, 2);
    if (r.solutions.size() != 3) return {false, "set " + std::to_string(trial) + " returned " + std::to_string(r.solutions.size()) + " solutions"};
    for (const auto& sol : r.solutions) {
      double best = 1e300;
      for (const cplx q : roots) best = std::min(best, rel_err(sol.q, q));
      worst = std::max(worst, best);
    }
  }
  return {worst <= 1e-9, "max q error " + fmt("%.1e", worst)};
}

Outcome master_recurrence() {
  ParamGen gen(1004);
  double worst = 0.0;
  int full = 0, sets = 0, solutions = 0;
  std::string shortfalls;
  bool per_order_ok = true;
  for (int order = 1; order <= 5; ++order) {
    int full_here = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const HeunFamily f = gen.family(order);
      const ReductionReport r = solve_reduction(f, order);
      ++sets;
      if (r.complete()) {
        ++full;
        ++full_here;
      } else {
        shortfalls += " N=" + std::to_string(order) + ":" + std::to_string(r.solutions.size()) + "/" + std::to_string(order + 1);
      }
      for (const auto& sol : r.solutions) {
        const HeunParams p = f.with_q(sol.q);
        worst = std::max(worst, ratio_consistency(p, build_solution_at_0(p, sol), 200));
        ++solutions;
      }
    }
    per_order_ok = per_order_ok && full_here >= 9;
  }
  std::string detail = std::to_string(full) + "/" + std::to_string(sets) + " full sets, " + std::to_string(solutions) +
                       " solutions, max ratio mismatch " + fmt("%.1e", worst);
  if (!shortfalls.empty()) detail += ", shortfalls" + shortfalls;
  return {worst <= 1e-12 && per_order_ok, detail};
}

Outcome ode_residual_check() {
  ParamGen gen(1005);
  double res_worst = 0.0, path_worst = 0.0;
  int solutions = 0;
  for (int order = 0; order <= 3; ++order) {
    for (int trial = 0; trial < 3; ++trial) {
      const HeunFamily f = gen.family(order);
      for (const AdmissibleSet& set : {solutions_at_0(f), build_solution_at_1(f)}) {
        for (const auto& item : set.items) {
          ++solutions;
          const AssembledSolution& sol = item.solution;
          const bool at0 = sol.expansion() == Expansion::AtZero;
          const double R = sol.radius();
          int points = 0;
          while (points < 10) {
            const cplx w = gen.in_disk(0.0, 0.8 * R);
            const cplx z = at0 ? w : 1.0 - w;
            if (distance_to_singularity(item.params, z) < 1e-3) continue;
            res_worst = std::max(res_worst, scaled_residual(item.params, z, sol.evaluate(z)));
            ++points;
          }
          // Short path well inside the disk, clear of the singular points.
          const cplx w0 = cplx(0.2, 0.1) * R, w1 = cplx(0.55, -0.2) * R;
          const cplx z0 = at0 ? w0 : 1.0 - w0, z1 = at0 ? w1 : 1.0 - w1;
          const Derivatives d0 = sol.evaluate(z0), d1 = sol.evaluate(z1);
          const auto path = integrate_reference(item.params, z0, d0.u, d0.du, z1, 1e-12);
          path_worst = std::max(path_worst, rel_err(path.back().u, d1.u));
        }
      }
    }
  }
  return {res_worst < 1e-9 && path_worst <= 1e-8,
          std::to_string(solutions) + " solutions, max scaled residual " + fmt("%.1e", res_worst) +
              ", max path mismatch " + fmt("%.1e", path_worst)};
}

Outcome epsilon_coefficient() {
  ParamGen gen(1006);
  double top_worst = 0.0, vanish_worst = 0.0;
  for (int order = 0; order <= 6; ++order) {
    for (int trial = 0; trial < 30; ++trial) {
      const HeunParams p = gen.generic_params();  // epsilon unconstrained
      const auto e = gen.complex_vector(static_cast<std::size_t>(order), 3.0);
      const cplx expected = (p.a - 1.0) * (p.epsilon + static_cast<double>(order));
      const ComplexPoly A = pi_coefficients(p, e);
      top_worst = std::max(top_worst, rel_err(A[order + 1], expected));
      std::vector<cplx> values;
      for (int n = 0; n <= order + 2; ++n) values.push_back(pi_eval(p, e, static_cast<double>(n)));
      const ComplexPoly B = interpolate_integer_nodes(values);
      vanish_worst = std::max(vanish_worst, std::abs(B[order + 2]) / std::abs(expected));
    }
  }
  return {top_worst <= 1e-10 && vanish_worst <= 1e-10,
          "max A_{N+1} error " + fmt("%.1e", top_worst) + ", max |A_{N+2}| / |(a-1)(eps+N)| " + fmt("%.1e", vanish_worst)};
}

Outcome conjecture() {
  ParamGen gen(1007);
  double q_worst = 0.0, a_worst = 0.0;
  int solutions = 0;
  for (int order = 1; order <= 7; ++order) {
    for (int trial = 0; trial < 3; ++trial) {
      const HeunFamily f = gen.family(order);
      for (const auto& sol : solve_reduction(f, order).solutions) {
        if (sol.degenerate) continue;
        const ConjectureResidual c = conjecture_check(sol, f.with_q(sol.q));
        q_worst = std::max(q_worst, c.q_residual);
        a_worst = std::max(a_worst, c.a_residual);
        ++solutions;
      }
    }
  }
  return {q_worst < 1e-10 && a_worst < 1e-8, std::to_string(solutions) + " solutions, max q residual " +
                                                 fmt("%.1e", q_worst) + ", max a residual " + fmt("%.1e", a_worst)};
}

Outcome positive_epsilon() {
  ParamGen gen(1008);
  double worst = 0.0;
  int solutions = 0;
  for (const double eps : {2.0, 3.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      const HeunFamily f = family_with_epsilon(gen.uniform(1.5, 4.0), gen.uniform(0.2, 3.0) + eps,
                                               gen.uniform(0.2, 3.0) + eps, gen.uniform(0.2, 3.0), eps);
      const AdmissibleSet set = solutions_at_0(f);
      if (static_cast<int>(set.items.size()) != static_cast<int>(eps) - 1) return {false, "incomplete solution set"};
      for (const auto& item : set.items) {
        ++solutions;
        for (int k = 0; k < 10; ++k) {
          const cplx z = gen.in_disk(0.0, 0.8 * item.solution.radius());
          worst = std::max(worst, scaled_residual(item.params, z, item.solution.evaluate(z)));
        }
      }
    }
  }
  std::string message;
  const auto kind = testing::thrown_kind([&] {
    try {
      solutions_at_0(family_with_epsilon(2.5, 1.3, 2.1, 0.7, 1.0));
    } catch (const Error& e) {
      message = e.what();
      throw;
    }
  });
  const bool rejected = kind == ErrorKind::ExceptionalEpsilon && message.find("epsilon = 1") != std::string::npos;
  return {worst < 1e-9 && rejected, std::to_string(solutions) + " solutions, max scaled residual " +
                                        fmt("%.1e", worst) + (rejected ? ", epsilon = 1 rejected: " + message : ", epsilon = 1 NOT rejected")};
}

Outcome independence() {
  ParamGen gen(1009);
  double smallest = 1e300;
  int pairs = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const HeunFamily f = gen.family(1, 2.0, 4.0);
    const AdmissibleSet at0 = solutions_at_0(f), at1 = build_solution_at_1(f);
    for (const auto& i0 : at0.items) {
      for (const auto& i1 : at1.items) {
        if (rel_err(i1.params.q, i0.params.q) > 1e-8) continue;
        const Derivatives u = i0.solution.evaluate(0.5), v = i1.solution.evaluate(0.5);
        const cplx w = u.u * v.du - v.u * u.du;
        smallest = std::min(smallest, std::abs(w) / (std::abs(u.u * v.du) + std::abs(v.u * u.du)));
        ++pairs;
      }
    }
  }
  return {pairs == 20 && smallest > 1e-6,
          std::to_string(pairs) + " pairs sharing q, min normalized |W| " + fmt("%.2e", smallest)};
}

Outcome quantum_sets() {
  using namespace heun::quantum;
  struct Set {
    double V0, V1, sigma, k;
  };
  const std::vector<Set> sets{{1, -1, 1, 1}, {1, -1, 1, 3}, {1, -1, 1, 15}, {1, -1, 2, 25}, {1, -1, 1, 60}, {1, -1, 1, 90}};
  std::ostringstream detail;
  bool ok = true;
  for (const Set& s : sets) {
    PotentialParams pp;
    pp.V0 = s.V0;
    pp.V1 = s.V1;
    pp.sigma = s.sigma;
    pp.mass_scale = s.k;
    // (a) the mapped parameters satisfy the quadratic condition over an energy grid.
    const double lo = default_energy_floor(pp), hi = pp.threshold();
    double q_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double E = lo + (hi - lo) * i / 99.0;
      const HeunParams p = map_to_heun(pp, E).params;
      const cplx t = p.q - p.a * p.alpha * p.beta;
      const cplx lhs = (t + p.a * (1.0 - p.delta)) * (t + (p.a - 1.0) * (1.0 - p.gamma));
      const cplx rhs = p.a * (1.0 - p.a) * (1.0 + p.alpha - p.gamma) * (1.0 + p.beta - p.gamma);
      q_worst = std::max(q_worst, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300));
    }
    // (b) spectrum roots against the shooting oracle.
    const SpectrumResult res = spectrum(pp);
    const auto shot = shooting_roots(pp, lo, hi);
    double e_worst = 0.0;
    const bool same_size = res.energies.size() == shot.size();
    if (same_size)
      for (std::size_t i = 0; i < shot.size(); ++i) e_worst = std::max(e_worst, rel_err(res.energies[i], shot[i]));
    // (c) count against the zeros of the threshold-energy solution.
    const int zeros = count_bound_states(pp);
    const bool set_ok = q_worst <= 1e-9 && same_size && e_worst <= 1e-6 && zeros == static_cast<int>(res.energies.size());
    ok = ok && set_ok;
    detail << " [k=" << s.k << " sigma=" << s.sigma << ": " << res.energies.size() << " states, shooting "
           << shot.size() << ", zeros " << zeros << ", max dE/E " << fmt("%.1e", e_worst) << ", q-cond "
           << fmt("%.1e", q_worst) << (set_ok ? "" : " FAIL") << "]";
  }
  return {ok, detail.str().substr(1)};
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string args =
      " reduce --a 2.7 --alpha 0.6 --beta 1.9 --gamma 1.3 --N 4 --seed 20240611 --starts 200 --output ";
  const fs::path p1 = dir / "heun_acceptance_1.json", p2 = dir / "heun_acceptance_2.json";
  const int c1 = std::system((std::string(HEUN_GHF_BINARY) + args + p1.string()).c_str());
  const int c2 = std::system((std::string(HEUN_GHF_BINARY) + args + p2.string()).c_str());
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = slurp(p1), b = slurp(p2);
  fs::remove(p1);
  fs::remove(p2);
  return {c1 == 0 && c2 == 0 && !a.empty() && a == b,
          "exit codes " + std::to_string(c1) + "/" + std::to_string(c2) + ", " + std::to_string(a.size()) +
              " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "N=0 identity", 1.0, n0_identity},
      {2, "N=1 closed form", 5.0, n1_closed_form},
      {3, "N=2 closed form", 10.0, n2_closed_form},
      {4, "master recurrence property", 120.0, master_recurrence},
      {5, "ODE residual", 60.0, ode_residual_check},
      {6, "epsilon-condition coefficient", 0.0, epsilon_coefficient},
      {7, "product identities N<=7", 120.0, conjecture},
      {8, "positive epsilon", 0.0, positive_epsilon},
      {9, "independence", 0.0, independence},
      {10, "quantum potential", 120.0, quantum_sets},
      {11, "reproducibility", 0.0, reproducibility},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %-30s %s  (%.2f s%s) %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                c.budget_s > 0.0 ? (" of " + fmt("%.0f", c.budget_s) + " s").c_str() : "", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
