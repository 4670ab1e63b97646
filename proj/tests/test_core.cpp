#include <cmath>

#include "doctest.h"
#include "heun/core.hpp"
#include "heun/error.hpp"
#include "heun/integrate.hpp"
#include "support/random_params.hpp"

using namespace heun;
using heun::testing::ParamGen;
using heun::testing::rel_err;
using heun::testing::thrown_kind;

TEST_CASE("make_params derives epsilon from the Fuchsian relation") {
  const HeunParams p = make_params(2.0, 1.0, 2.0, 0.5, 3.5, 4.0);
  CHECK(std::abs(p.epsilon) < 1e-15);
  const HeunParams r = make_params(2.0, 1.0, 1.0, 1.0, 3.0, 0.0);
  CHECK(std::abs(r.epsilon - cplx(-1.0)) < 1e-15);
}

TEST_CASE("make_params rejects coincident singularities") {
  CHECK(thrown_kind([] { make_params(1.0, 0.3, 0.2, 0.5, 1.0, 0.0); }) == ErrorKind::CoincidentSingularities);
  CHECK(thrown_kind([] { make_params(0.0, 0.3, 0.2, 0.5, 1.0, 0.0); }) == ErrorKind::CoincidentSingularities);
  CHECK(thrown_kind([] { make_family(1.0, 0.3, 0.2, 0.5, 1.0); }) == ErrorKind::CoincidentSingularities);
  try {
    make_params(1.0, 0.3, 0.2, 0.5, 1.0, 0.0);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("coincident") != std::string::npos);
  }
}

TEST_CASE("Fuchsian defect vanishes for constructed parameters") {
  ParamGen gen(11);
  for (int i = 0; i < 200; ++i) {
    const HeunParams p = gen.generic_params();
    CHECK(std::abs(p.fuchsian_defect()) == 0.0);
    const HeunFamily f = family_with_epsilon(p.a, p.alpha, p.beta, p.gamma, -3.0);
    CHECK(std::abs(f.epsilon() + 3.0) < 1e-13);
  }
}

TEST_CASE("ode_residual trivial solutions") {
  ParamGen gen(12);
  for (int i = 0; i < 20; ++i) {
    HeunParams p = gen.generic_params();
    p = make_params(p.a, 0.0, p.beta, p.gamma, p.delta, 0.0);
    const cplx z = gen.in_disk(0.0, 0.4) + 0.45;
    CHECK(std::abs(ode_residual(p, {z, 1.0, 0.0}, 0.0)) == 0.0);
    CHECK(std::abs(ode_residual(p, {z, 0.0, 0.0}, 0.0)) == 0.0);
  }
}

TEST_CASE("ode_residual rejects singular points") {
  const HeunParams p = make_params(2.0, 1.0, 2.0, 0.5, 3.5, 4.0);
  for (cplx z : {cplx(0.0), cplx(1.0), cplx(2.0)})
    CHECK(thrown_kind([&] { ode_residual(p, {z, 1.0, 0.0}, 0.0); }) == ErrorKind::SingularPoint);
}

TEST_CASE("ode_residual is linear in the solution triple") {
  ParamGen gen(13);
  for (int i = 0; i < 100; ++i) {
    const HeunParams p = gen.generic_params();
    const cplx z = gen.in_disk(0.0, 3.0);
    if (distance_to_singularity(p, z) < 0.1) continue;
    const auto v = gen.complex_vector(7, 2.0);
    const cplx r1 = ode_residual(p, {z, v[0], v[1]}, v[2]);
    const cplx r2 = ode_residual(p, {z, v[3], v[4]}, v[5]);
    const cplx r = ode_residual(p, {z, v[0] + v[6] * v[3], v[1] + v[6] * v[4]}, v[2] + v[6] * v[5]);
    CHECK(std::abs(r - (r1 + v[6] * r2)) <= 1e-12 * (1.0 + std::abs(r1) + std::abs(v[6] * r2)));
  }
}

TEST_CASE("Gauss series satisfies the equation when epsilon = 0 and q = a alpha beta") {
  ParamGen gen(14);
  for (int i = 0; i < 20; ++i) {
    const HeunFamily f = gen.family(0);
    const HeunParams p = f.with_q(f.a * f.alpha * f.beta);
    std::vector<cplx> c(300);
    for (int n = 0; n < 300; ++n) c[n] = testing::ghf_term({p.alpha, p.beta}, {p.gamma}, n);
    const cplx z = gen.in_disk(0.0, 0.5);
    const auto [u, du, ddu] = testing::sum_series(c, z);
    CHECK(scaled_residual(p, z, {u, du, ddu}) < 1e-12);
  }
}

TEST_CASE("integrate_reference reproduces the Gauss function") {
  ParamGen gen(15);
  for (int i = 0; i < 10; ++i) {
    const HeunFamily f = gen.family(0);
    const HeunParams p = f.with_q(f.a * f.alpha * f.beta);
    std::vector<cplx> c(400);
    for (int n = 0; n < 400; ++n) c[n] = testing::ghf_term({p.alpha, p.beta}, {p.gamma}, n);
    const auto start = testing::sum_series(c, 0.1);
    const auto path = integrate_reference(p, 0.1, start[0], start[1], 0.4, 1e-12);
    CHECK(path.front().z == cplx(0.1));
    CHECK(path.back().z == cplx(0.4));
    const auto end = testing::sum_series(c, 0.4);
    CHECK(rel_err(path.back().u, end[0]) < 1e-8);
    CHECK(rel_err(path.back().du, end[1]) < 1e-8);
  }
}

TEST_CASE("integrate_reference keeps zero data at zero") {
  const HeunParams p = make_params(2.5, 1.0, 2.0, 0.5, 1.5, 0.3);
  const auto path = integrate_reference(p, 0.2, 0.0, 0.0, cplx(0.6, 0.3), 1e-10);
  REQUIRE(path.size() >= 2);
  for (const auto& s : path) {
    CHECK(s.u == cplx(0.0));
    CHECK(s.du == cplx(0.0));
  }
}

TEST_CASE("integrate_reference agrees with the three-term Frobenius sum for generic parameters") {
  ParamGen gen(16);
  int checked = 0;
  while (checked < 20) {
    const HeunParams p = gen.generic_params();
    if (std::abs(p.a) < 0.35 / 0.9) continue;
    const auto c = testing::three_term_coefficients(p, 1500);
    const auto start = testing::sum_series(c, 0.06);
    const auto path = integrate_reference(p, 0.06, start[0], start[1], 0.25, 1e-12);
    const auto end = testing::sum_series(c, 0.25);
    CHECK(rel_err(path.back().u, end[0]) < 1e-8);
    ++checked;
  }
}

TEST_CASE("integrate_reference error paths") {
  const HeunParams p = make_params(2.5, 1.0, 2.0, 0.5, 1.5, 0.3);
  CHECK(thrown_kind([&] { integrate_reference(p, -0.5, 1.0, 0.0, 0.5, 1e-10); }) == ErrorKind::PathTooClose);
  CHECK(thrown_kind([&] { integrate_reference(p, 0.5, 1.0, 0.0, 1.02, 1e-10); }) == ErrorKind::PathTooClose);
  CHECK(thrown_kind([&] { integrate_reference(p, 1.5, 1.0, 0.0, 2.49, 1e-10); }) == ErrorKind::PathTooClose);
  // A segment passing near, but not through, a singular point.
  CHECK(thrown_kind([&] { integrate_reference(p, cplx(0.5, 0.03), 1.0, 0.0, cplx(1.5, 0.03), 1e-10); }) ==
        ErrorKind::PathTooClose);
}

TEST_CASE("integrate_dp5 solves a linear oscillator") {
  std::array<double, 2> y{0.0, 1.0};
  const auto rhs = [](double, const std::array<double, 2>& s) { return std::array<double, 2>{s[1], -s[0]}; };
  const auto end = integrate_dp5<double, 2>(rhs, 0.0, y, 10.0, StepControl{1e-12}, [](double, const auto&) {});
  CHECK(std::abs(end[0] - std::sin(10.0)) < 1e-9);
  CHECK(std::abs(end[1] - std::cos(10.0)) < 1e-9);
}

TEST_CASE("error kinds have names") {
  CHECK(std::string(to_string(ErrorKind::EpsilonMismatch)).size() > 0);
  const Error e(ErrorKind::UnitA, "x");
  CHECK(e.kind() == ErrorKind::UnitA);
}
